#include "adhm/vortex.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>

#include "adhm/moment.hpp"

namespace adhm {

namespace {

using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// out(m, n) = x(m + dm, n + dn), indices wrapped
template <class M>
M shifted(const M& x, int dm, int dn) {
  const int nn = static_cast<int>(x.rows());
  M out(nn, nn);
  for (int m = 0; m < nn; ++m) {
    int mm = ((m + dm) % nn + nn) % nn;
    for (int n = 0; n < nn; ++n) {
      int nnx = ((n + dn) % nn + nn) % nn;
      out(m, n) = x(mm, nnx);
    }
  }
  return out;
}

Matrix rmul(const RMat& r, const Matrix& c) {
  return r.cast<Cx>().cwiseProduct(c);
}

void make_links(const RMat& th1, const RMat& th2, const RMat& a1,
                const RMat& a2, Matrix& u1, Matrix& u2) {
  const int nn = static_cast<int>(th1.rows());
  u1.resize(nn, nn);
  u2.resize(nn, nn);
  for (int m = 0; m < nn; ++m)
    for (int n = 0; n < nn; ++n) {
      u1(m, n) = std::polar(1.0, th1(m, n) + a1(m, n));
      u2(m, n) = std::polar(1.0, th2(m, n) + a2(m, n));
    }
}

// central covariant difference along axis (0 = rows, 1 = cols)
Matrix dmu(const Matrix& u, const Matrix& psi, int axis, double h) {
  int dm = axis == 0 ? 1 : 0, dn = axis == 0 ? 0 : 1;
  Matrix up = u.cwiseProduct(shifted(psi, dm, dn));
  Matrix um =
      shifted(u, -dm, -dn).conjugate().cwiseProduct(shifted(psi, -dm, -dn));
  return (up - um) / (2.0 * h);
}

Matrix dmu_fwd(const Matrix& u, const Matrix& psi, int axis, double h) {
  int dm = axis == 0 ? 1 : 0, dn = axis == 0 ? 0 : 1;
  return (u.cwiseProduct(shifted(psi, dm, dn)) - psi) / h;
}

Matrix dmu_fwd_adj(const Matrix& u, const Matrix& phi, int axis, double h) {
  int dm = axis == 0 ? 1 : 0, dn = axis == 0 ? 0 : 1;
  Matrix um =
      shifted(u, -dm, -dn).conjugate().cwiseProduct(shifted(phi, -dm, -dn));
  return (um - phi) / h;
}

const Cx kI(0.0, 1.0);

Matrix sc(const Matrix& u1, const Matrix& u2, const Matrix& psi, double h1,
          double h2) {
  return 0.5 * (dmu(u1, psi, 0, h1) + kI * dmu(u2, psi, 1, h2));
}

Matrix sc_adj(const Matrix& u1, const Matrix& u2, const Matrix& phi, double h1,
              double h2) {
  return 0.5 * (-dmu(u1, phi, 0, h1) + kI * dmu(u2, phi, 1, h2));
}

Matrix sf(const Matrix& u1, const Matrix& u2, const Matrix& psi, double h1,
          double h2) {
  return 0.5 * (dmu_fwd(u1, psi, 0, h1) + kI * dmu_fwd(u2, psi, 1, h2));
}

Matrix sf_adj(const Matrix& u1, const Matrix& u2, const Matrix& phi, double h1,
              double h2) {
  return 0.5 * (dmu_fwd_adj(u1, phi, 0, h1) - kI * dmu_fwd_adj(u2, phi, 1, h2));
}

RMat curl(const RMat& a1, const RMat& a2) {
  return a1 + shifted(a2, 1, 0) - shifted(a1, 0, 1) - a2;
}

void curl_adj(const RMat& r, RMat& g1, RMat& g2) {
  g1 = r - shifted(r, 0, -1);
  g2 = shifted(r, -1, 0) - r;
}

void require_valid(const VortexState& s, const char* who) {
  if (!state_shapes_ok(s))
    throw std::invalid_argument(std::string(who) + ": malformed state fields");
}

VortexResidual assemble_residual(const VortexState& s, bool forward) {
  require_valid(s, "vortex_residual");
  const TorusGrid& g = s.grid;
  const int nn = g.n;
  RMat th1, th2;
  background_links(g, th1, th2);
  Matrix u1, u2;
  make_links(th1, th2, s.a1, s.a2, u1, u2);

  VortexResidual r;
  if (forward) {
    r.r1 = sf(u1, u2, s.psi1, g.h1(), g.h2());
    r.r2 = sf_adj(u1, u2, s.psi2, g.h1(), g.h2());
  } else {
    r.r1 = sc(u1, u2, s.psi1, g.h1(), g.h2());
    r.r2 = sc_adj(u1, u2, s.psi2, g.h1(), g.h2());
  }
  r.r3_pair = s.psi1.conjugate().cwiseProduct(s.psi2) -
              Matrix::Constant(nn, nn, s.theta);
  double rho0 = 2.0 * M_PI * g.degree / g.area();
  double target = 2.0 * M_PI * s.lambda / g.area();
  r.r3_curv = RMat::Constant(nn, nn, rho0 - target) - curl(s.a1, s.a2) / g.cell() +
              s.psi1.cwiseAbs2() - s.psi2.cwiseAbs2();
  double c = g.cell();
  r.norm1 = std::sqrt(c * r.r1.squaredNorm());
  r.norm2 = std::sqrt(c * r.r2.squaredNorm());
  r.norm3 = std::sqrt(c * (r.r3_pair.squaredNorm() + r.r3_curv.squaredNorm()));
  r.total = std::sqrt(r.norm1 * r.norm1 + r.norm2 * r.norm2 + r.norm3 * r.norm3);
  return r;
}

// ---------------------------------------------------------------------------
// Least-squares objective over the flat coordinate vector
//   x = [a1, a2, Re psi1, Im psi1, Re psi2, Im psi2]  (site-major blocks).

struct Objective {
  TorusGrid grid;
  double lambda = 0.0;
  Cx theta = Cx(0, 0);
  bool forward = false;
  RMat th1, th2;

  Objective(const TorusGrid& g, double lam, Cx th, bool fwd)
      : grid(g), lambda(lam), theta(th), forward(fwd) {
    background_links(g, th1, th2);
  }

  int dim() const { return 6 * grid.n * grid.n; }

  void unpack(const RVec& x, RMat& a1, RMat& a2, Matrix& p, Matrix& q) const {
    const int nn = grid.n, ss = nn * nn;
    a1.resize(nn, nn);
    a2.resize(nn, nn);
    p.resize(nn, nn);
    q.resize(nn, nn);
    for (int m = 0; m < nn; ++m)
      for (int n = 0; n < nn; ++n) {
        int s = m * nn + n;
        a1(m, n) = x[s];
        a2(m, n) = x[ss + s];
        p(m, n) = Cx(x[2 * ss + s], x[3 * ss + s]);
        q(m, n) = Cx(x[4 * ss + s], x[5 * ss + s]);
      }
  }

  void pack(const RMat& a1, const RMat& a2, const Matrix& p, const Matrix& q,
            RVec& x) const {
    const int nn = grid.n, ss = nn * nn;
    x.resize(6 * ss);
    for (int m = 0; m < nn; ++m)
      for (int n = 0; n < nn; ++n) {
        int s = m * nn + n;
        x[s] = a1(m, n);
        x[ss + s] = a2(m, n);
        x[2 * ss + s] = p(m, n).real();
        x[3 * ss + s] = p(m, n).imag();
        x[4 * ss + s] = q(m, n).real();
        x[5 * ss + s] = q(m, n).imag();
      }
  }

  double operator()(const RVec& x, RVec& grad) const {
    const int nn = grid.n, ss = nn * nn;
    const double h1 = grid.h1(), h2 = grid.h2(), cell = grid.cell();
    RMat a1, a2;
    Matrix p, q;
    unpack(x, a1, a2, p, q);
    Matrix u1, u2;
    make_links(th1, th2, a1, a2, u1, u2);

    Matrix r1 = forward ? sf(u1, u2, p, h1, h2) : sc(u1, u2, p, h1, h2);
    Matrix r2 =
        forward ? sf_adj(u1, u2, q, h1, h2) : sc_adj(u1, u2, q, h1, h2);
    Matrix rp =
        p.conjugate().cwiseProduct(q) - Matrix::Constant(nn, nn, theta);
    double rho0 = 2.0 * M_PI * grid.degree / grid.area();
    double target = 2.0 * M_PI * lambda / grid.area();
    RMat rc = RMat::Constant(nn, nn, rho0 - target) - curl(a1, a2) / cell +
              p.cwiseAbs2() - q.cwiseAbs2();

    double e = cell * (r1.squaredNorm() + r2.squaredNorm() +
                       rp.squaredNorm() + rc.squaredNorm());

    // section gradients
    Matrix gp = forward ? sf_adj(u1, u2, r1, h1, h2) : sc_adj(u1, u2, r1, h1, h2);
    Matrix gq = forward ? sf(u1, u2, r2, h1, h2) : sc(u1, u2, r2, h1, h2);
    gp += rp.conjugate().cwiseProduct(q) + 2.0 * rmul(rc, p);
    gq += rp.cwiseProduct(p) - 2.0 * rmul(rc, q);

    // connection gradient: curvature part (cell factors cancel) ...
    RMat g1, g2;
    curl_adj(rc, g1, g2);
    RMat ga1 = -2.0 * g1;
    RMat ga2 = -2.0 * g2;

    // ... plus the link couplings of the Dirac rows
    if (!forward) {
      for (int axis = 0; axis < 2; ++axis) {
        const Matrix& u = axis == 0 ? u1 : u2;
        const double h = axis == 0 ? h1 : h2;
        const int dm = axis == 0 ? 1 : 0, dn = axis == 0 ? 0 : 1;
        for (int which = 0; which < 2; ++which) {
          const Matrix& psi = which == 0 ? p : q;
          const Matrix& rr = which == 0 ? r1 : r2;
          Cx coef = axis == 1 ? Cx(0, -0.5) : (which == 0 ? Cx(0.5, 0) : Cx(-0.5, 0));
          Matrix ph = coef * rr;
          Matrix t = ph.conjugate().cwiseProduct(
                         (kI * u).cwiseProduct(shifted(psi, dm, dn))) +
                     shifted(ph, dm, dn).conjugate().cwiseProduct(
                         (kI * u.conjugate()).cwiseProduct(psi));
          RMat add = cell * 2.0 * t.real() / (2.0 * h);
          if (axis == 0)
            ga1 += add;
          else
            ga2 += add;
        }
      }
    } else {
      for (int axis = 0; axis < 2; ++axis) {
        const Matrix& u = axis == 0 ? u1 : u2;
        const double h = axis == 0 ? h1 : h2;
        const int dm = axis == 0 ? 1 : 0, dn = axis == 0 ? 0 : 1;
        // forward D depends on a_mu(y) only through U_mu(y) psi(y+mu)
        Matrix ph = (axis == 0 ? Cx(0.5, 0) : Cx(0, -0.5)) * r1;
        Matrix t = ph.conjugate().cwiseProduct(
            (kI * u).cwiseProduct(shifted(p, dm, dn)));
        // adjoint row: (D^+)^adj q at y+mu depends on a_mu(y)
        Cx c = axis == 0 ? Cx(0.5, 0) : Cx(0, -0.5);
        Matrix tf = (std::conj(c) * r2).conjugate();
        Matrix tt = shifted(tf, dm, dn).cwiseProduct(
            (-kI * u.conjugate()).cwiseProduct(q));
        RMat add = cell * 2.0 * (t.real() + tt.real()) / h;
        if (axis == 0)
          ga1 += add;
        else
          ga2 += add;
      }
    }

    grad.resize(6 * ss);
    for (int m = 0; m < nn; ++m)
      for (int n = 0; n < nn; ++n) {
        int s = m * nn + n;
        grad[s] = ga1(m, n);
        grad[ss + s] = ga2(m, n);
        grad[2 * ss + s] = 2.0 * cell * gp(m, n).real();
        grad[3 * ss + s] = 2.0 * cell * gp(m, n).imag();
        grad[4 * ss + s] = 2.0 * cell * gq(m, n).real();
        grad[5 * ss + s] = 2.0 * cell * gq(m, n).imag();
      }
    return e;
  }
};

// ---------------------------------------------------------------------------
// L-BFGS with backtracking line search.  Stops at f <= f_target, on a
// vanishing gradient, after `max_iter` accepted steps, or once progress
// stays below rounding level for a long stretch.

struct MinimizeOutcome {
  double f = 0.0;
  int accepted = 0;
};

MinimizeOutcome lbfgs_minimize(
    RVec& x, const std::function<double(const RVec&, RVec&)>& fg,
    double f_target, int max_iter) {
  const int kMem = 10;
  std::deque<RVec> hs, hy;
  RVec g(x.size()), gn(x.size()), xn(x.size());
  double f = fg(x, g);
  int accepted = 0, flat = 0;

  while (accepted < max_iter && f > f_target) {
    if (g.norm() <= 1e-15 * std::max(1.0, std::abs(f))) break;

    RVec d = -g;
    const int k = static_cast<int>(hs.size());
    if (k > 0) {
      std::vector<double> alpha(k), rho(k);
      for (int i = k - 1; i >= 0; --i) {
        rho[i] = 1.0 / hy[i].dot(hs[i]);
        alpha[i] = rho[i] * hs[i].dot(d);
        d -= alpha[i] * hy[i];
      }
      d *= hs.back().dot(hy.back()) / hy.back().squaredNorm();
      for (int i = 0; i < k; ++i) {
        double beta = rho[i] * hy[i].dot(d);
        d += (alpha[i] - beta) * hs[i];
      }
    }
    double gd = g.dot(d);
    if (!(gd < 0)) {
      hs.clear();
      hy.clear();
      d = -g;
      gd = -g.squaredNorm();
      if (!(gd < 0)) break;
    }

    double step = hs.empty() ? std::min(1.0, 1.0 / std::sqrt(-gd)) : 1.0;
    double fn = f;
    bool ok = false;
    for (int ls = 0; ls < 60; ++ls) {
      xn = x + step * d;
      fn = fg(xn, gn);
      if (std::isfinite(fn) && fn <= f + 1e-4 * step * gd) {
        ok = true;
        break;
      }
      step *= 0.5;
    }
    if (!ok) {
      if (hs.empty()) break;  // no descent possible at rounding level
      hs.clear();
      hy.clear();
      continue;
    }

    RVec s = step * d, y = gn - g;
    double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      hs.push_back(std::move(s));
      hy.push_back(std::move(y));
      if (static_cast<int>(hs.size()) > kMem) {
        hs.pop_front();
        hy.pop_front();
      }
    }
    double drop = f - fn;
    x.swap(xn);
    g.swap(gn);
    f = fn;
    ++accepted;
    flat = drop <= 1e-16 * std::max(f, 1e-300) ? flat + 1 : 0;
    if (flat >= 50) break;
  }
  return {f, accepted};
}

}  // namespace

double vortex_energy(const VortexState& s, bool forward) {
  Objective obj(s.grid, s.lambda, s.theta, forward);
  RVec x, g;
  obj.pack(s.a1, s.a2, s.psi1, s.psi2, x);
  return obj(x, g);
}

VortexGradient vortex_energy_gradient(const VortexState& s, bool forward) {
  Objective obj(s.grid, s.lambda, s.theta, forward);
  RVec x, g;
  obj.pack(s.a1, s.a2, s.psi1, s.psi2, x);
  obj(x, g);
  VortexGradient out;
  const int nn = s.grid.n, ss = nn * nn;
  out.a1.resize(nn, nn);
  out.a2.resize(nn, nn);
  out.psi1.resize(nn, nn);
  out.psi2.resize(nn, nn);
  for (int m = 0; m < nn; ++m)
    for (int n = 0; n < nn; ++n) {
      int idx = m * nn + n;
      out.a1(m, n) = g[idx];
      out.a2(m, n) = g[ss + idx];
      out.psi1(m, n) = Cx(g[2 * ss + idx], g[3 * ss + idx]);
      out.psi2(m, n) = Cx(g[4 * ss + idx], g[5 * ss + idx]);
    }
  return out;
}

// ---------------------------------------------------------------------------

TorusGrid make_grid(int n, int degree, double l1, double l2) {
  if (n < 16) throw std::invalid_argument("make_grid: need at least 16 points per side");
  if (!(l1 > 0.0) || !(l2 > 0.0))
    throw std::invalid_argument("make_grid: side lengths must be positive");
  return TorusGrid{n, l1, l2, degree};
}

bool state_shapes_ok(const VortexState& s) {
  const int nn = s.grid.n;
  if (nn < 16) return false;
  auto sq = [nn](auto& m) { return m.rows() == nn && m.cols() == nn; };
  return sq(s.a1) && sq(s.a2) && sq(s.psi1) && sq(s.psi2);
}

VortexState zero_state(const TorusGrid& grid, double lambda, Cx theta) {
  VortexState s;
  s.grid = grid;
  s.a1 = RMat::Zero(grid.n, grid.n);
  s.a2 = RMat::Zero(grid.n, grid.n);
  s.psi1 = Matrix::Zero(grid.n, grid.n);
  s.psi2 = Matrix::Zero(grid.n, grid.n);
  s.lambda = lambda;
  s.theta = theta;
  return s;
}

VortexState constant_state(const TorusGrid& grid, double lambda) {
  if (grid.degree != 0)
    throw std::invalid_argument("constant_state: defined for degree 0 only");
  if (lambda < 0.0)
    throw std::invalid_argument("constant_state: needs lambda >= 0");
  VortexState s = zero_state(grid, lambda);
  double c = std::sqrt(2.0 * M_PI * lambda / grid.area());
  s.psi1 = Matrix::Constant(grid.n, grid.n, Cx(c, 0.0));
  return s;
}

void background_links(const TorusGrid& grid, Eigen::MatrixXd& th1,
                      Eigen::MatrixXd& th2) {
  const int nn = grid.n;
  const int d = grid.degree;
  th1 = RMat::Zero(nn, nn);
  th2 = RMat::Zero(nn, nn);
  for (int m = 0; m < nn; ++m)
    for (int n = 0; n < nn; ++n) {
      th2(m, n) = -2.0 * M_PI * d * m / (double(nn) * nn);
      if (m == nn - 1) th1(m, n) = 2.0 * M_PI * d * n / nn;
    }
}

Eigen::MatrixXd plaquette_flux(const VortexState& s) {
  require_valid(s, "plaquette_flux");
  const int nn = s.grid.n;
  RMat th1, th2;
  background_links(s.grid, th1, th2);
  Matrix u1, u2;
  make_links(th1, th2, s.a1, s.a2, u1, u2);
  RMat flux(nn, nn);
  for (int m = 0; m < nn; ++m)
    for (int n = 0; n < nn; ++n) {
      int mp = (m + 1) % nn, np = (n + 1) % nn;
      Cx hol = u1(m, n) * u2(mp, n) * std::conj(u1(m, np)) * std::conj(u2(m, n));
      flux(m, n) = -std::arg(hol);
    }
  return flux;
}

VortexResidual vortex_residual(const VortexState& s) {
  return assemble_residual(s, false);
}

VortexResidual vortex_residual_forward(const VortexState& s) {
  return assemble_residual(s, true);
}

VortexSolveResult solve_vortex(const TorusGrid& grid, double lambda,
                               uint64_t seed, double tol, int max_iter) {
  if (std::abs(grid.degree) > 3)
    throw std::invalid_argument("solve_vortex: |degree| must be at most 3");
  if (grid.n > 128)
    throw std::invalid_argument("solve_vortex: grid size must be at most 128");
  if (!(tol > 0.0))
    throw std::invalid_argument("solve_vortex: tolerance must be positive");
  if (max_iter < 1)
    throw std::invalid_argument("solve_vortex: need at least one iteration");
  if (lambda == static_cast<double>(grid.degree))
    throw std::invalid_argument(
        "solve_vortex: lambda equal to the degree is excluded (the integrated "
        "curvature equation forces both sections to vanish there)");

  const int nn = grid.n;
  RandomStream rs(sub_seed(seed, 1));
  double spread =
      std::sqrt(std::max(std::abs(2.0 * M_PI * (lambda - grid.degree)), 1.0) /
                grid.area());
  RMat a1(nn, nn), a2(nn, nn);
  Matrix p(nn, nn), q(nn, nn);
  for (int m = 0; m < nn; ++m)
    for (int n = 0; n < nn; ++n) {
      a1(m, n) = 0.1 * rs.normal();
      a2(m, n) = 0.1 * rs.normal();
    }
  for (int m = 0; m < nn; ++m)
    for (int n = 0; n < nn; ++n) {
      p(m, n) = spread * Cx(rs.normal(), rs.normal());
      q(m, n) = spread * Cx(rs.normal(), rs.normal());
    }

  Objective fwd(grid, lambda, Cx(0, 0), true);
  Objective cen(grid, lambda, Cx(0, 0), false);
  RVec x;
  fwd.pack(a1, a2, p, q, x);

  // warm-up on the forward scheme: its degree-d kernel is exactly
  // d-dimensional, which pins the physical branch of the least-squares
  // landscape before the central polish
  double fwd_tol = std::max(tol * 0.1, 1e-9);
  auto fo = lbfgs_minimize(
      x, [&fwd](const RVec& v, RVec& g) { return fwd(v, g); },
      fwd_tol * fwd_tol, max_iter);

  auto co = lbfgs_minimize(
      x, [&cen](const RVec& v, RVec& g) { return cen(v, g); }, tol * tol,
      max_iter);
  if (co.f > tol * tol && co.accepted < max_iter) {
    // one fresh-memory restart; the curvature model sometimes goes stale
    // near the floor
    auto extra = lbfgs_minimize(
        x, [&cen](const RVec& v, RVec& g) { return cen(v, g); }, tol * tol,
        max_iter - co.accepted);
    co.f = extra.f;
    co.accepted += extra.accepted;
  }

  VortexSolveResult out;
  out.state = zero_state(grid, lambda);
  cen.unpack(x, out.state.a1, out.state.a2, out.state.psi1, out.state.psi2);
  VortexResidual res = vortex_residual(out.state);
  out.report.iterations_forward = fo.accepted;
  out.report.iterations_central = co.accepted;
  out.report.residual_norm = res.total;
  out.report.converged = res.total <= tol;
  return out;
}

IntegralIdentity integral_identity_check(const VortexState& s) {
  require_valid(s, "integral_identity_check");
  IntegralIdentity out;
  out.lhs = s.grid.cell() * (s.psi1.squaredNorm() - s.psi2.squaredNorm());
  out.rhs = 2.0 * M_PI * (s.lambda - s.grid.degree);
  out.relative_error = std::abs(out.lhs - out.rhs) / std::max(std::abs(out.rhs), 1.0);
  return out;
}

WindingReport winding_number(const VortexState& s) {
  bool use2 = s.psi2.squaredNorm() > s.psi1.squaredNorm();
  return winding_number(s, use2);
}

WindingReport winding_number(const VortexState& s, bool use_psi2) {
  require_valid(s, "winding_number");
  const int nn = s.grid.n;
  RMat th1, th2;
  background_links(s.grid, th1, th2);
  Matrix u1, u2;
  make_links(th1, th2, s.a1, s.a2, u1, u2);
  const Matrix& psi = use_psi2 ? s.psi2 : s.psi1;

  // covariant transport phases along the two edge directions
  RMat d1(nn, nn), d2(nn, nn);
  for (int m = 0; m < nn; ++m)
    for (int n = 0; n < nn; ++n) {
      int mp = (m + 1) % nn, np = (n + 1) % nn;
      d1(m, n) = std::arg(u1(m, n) * psi(mp, n) * std::conj(psi(m, n)));
      d2(m, n) = std::arg(u2(m, n) * psi(m, np) * std::conj(psi(m, n)));
    }
  RMat circ = d1 + shifted(d2, 1, 0) - shifted(d1, 0, 1) - d2;
  RMat f = RMat::Constant(nn, nn,
                          -2.0 * M_PI * s.grid.degree / (double(nn) * nn)) +
           curl(s.a1, s.a2);

  WindingReport rep;
  rep.used_psi2 = use_psi2;
  rep.plaquette.resize(nn, nn);
  long total = 0, zeros = 0;
  for (int m = 0; m < nn; ++m)
    for (int n = 0; n < nn; ++n) {
      int w = static_cast<int>(std::lround((circ(m, n) - f(m, n)) / (2.0 * M_PI)));
      rep.plaquette(m, n) = w;
      total += w;
      zeros += std::abs(w);
    }
  rep.total = static_cast<int>(total);
  rep.zero_count = static_cast<int>(zeros);
  return rep;
}

VortexState gauge_transform(const VortexState& s, const Eigen::MatrixXd& chi) {
  require_valid(s, "gauge_transform");
  const int nn = s.grid.n;
  if (chi.rows() != nn || chi.cols() != nn)
    throw std::invalid_argument("gauge_transform: angle field has wrong shape");
  VortexState out = s;
  for (int m = 0; m < nn; ++m)
    for (int n = 0; n < nn; ++n) {
      int mp = (m + 1) % nn, np = (n + 1) % nn;
      // U(x) transports from x+mu to x, so a_mu(x) shifts by chi(x)-chi(x+mu)
      out.a1(m, n) = s.a1(m, n) + chi(m, n) - chi(mp, n);
      out.a2(m, n) = s.a2(m, n) + chi(m, n) - chi(m, np);
      Cx ph = std::polar(1.0, chi(m, n));
      out.psi1(m, n) = ph * s.psi1(m, n);
      out.psi2(m, n) = ph * s.psi2(m, n);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Reduced-system evaluator (rank 1, k = 1): fused per-site stencils written
// independently of the whole-field operators above, plus the identically
// vanishing quaternionic terms.

ReducedResidual adhm_reduced_residual(const VortexState& s,
                                      const XiQuaternionic& xi) {
  require_valid(s, "adhm_reduced_residual");
  if (xi.k() != 1)
    throw std::invalid_argument(
        "adhm_reduced_residual: quaternionic slot must be 1x1 in the reduced "
        "system");
  const TorusGrid& g = s.grid;
  const int nn = g.n;
  const double h1 = g.h1(), h2 = g.h2(), cell = g.cell();
  const double rho0 = 2.0 * M_PI * g.degree / g.area();
  const double target = 2.0 * M_PI * s.lambda / g.area();
  RMat th1, th2;
  background_links(g, th1, th2);

  Matrix red1(nn, nn), red2(nn, nn), redp(nn, nn);
  RMat redc(nn, nn);
  auto wrap = [nn](int i) { return (i % nn + nn) % nn; };
  for (int m = 0; m < nn; ++m)
    for (int n = 0; n < nn; ++n) {
      int mp = wrap(m + 1), mm = wrap(m - 1);
      int np = wrap(n + 1), nm = wrap(n - 1);
      Cx u1 = std::polar(1.0, th1(m, n) + s.a1(m, n));
      Cx u1m = std::polar(1.0, th1(mm, n) + s.a1(mm, n));
      Cx u2 = std::polar(1.0, th2(m, n) + s.a2(m, n));
      Cx u2m = std::polar(1.0, th2(m, nm) + s.a2(m, nm));

      Cx d1p = (u1 * s.psi1(mp, n) - std::conj(u1m) * s.psi1(mm, n)) / (2.0 * h1);
      Cx d2p = (u2 * s.psi1(m, np) - std::conj(u2m) * s.psi1(m, nm)) / (2.0 * h2);
      Cx d1q = (u1 * s.psi2(mp, n) - std::conj(u1m) * s.psi2(mm, n)) / (2.0 * h1);
      Cx d2q = (u2 * s.psi2(m, np) - std::conj(u2m) * s.psi2(m, nm)) / (2.0 * h2);
      red1(m, n) = 0.5 * d1p + 0.5 * kI * d2p;
      red2(m, n) = -0.5 * d1q + 0.5 * kI * d2q;
      redp(m, n) = std::conj(s.psi1(m, n)) * s.psi2(m, n) - s.theta;
      double cl = s.a1(m, n) + s.a2(mp, n) - s.a1(m, np) - s.a2(m, n);
      redc(m, n) = rho0 - cl / cell + std::norm(s.psi1(m, n)) -
                   std::norm(s.psi2(m, n)) - target;
    }

  ReducedResidual out;
  out.dirac1 = std::sqrt(cell * red1.squaredNorm());
  out.dirac2 = std::sqrt(cell * red2.squaredNorm());
  out.pairing = std::sqrt(cell * redp.squaredNorm());
  out.curvature = std::sqrt(cell * redc.squaredNorm());
  out.xi_moment = mu_of_xi(xi).norm();
  double wedge2 = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      wedge2 += commutator(xi.comp(a), xi.comp(b)).squaredNorm();
  out.xi_wedge = std::sqrt(wedge2);

  VortexResidual ref = vortex_residual(s);
  double gap = 0.0;
  for (int m = 0; m < nn; ++m)
    for (int n = 0; n < nn; ++n) {
      gap = std::max(gap, std::abs(red1(m, n) - ref.r1(m, n)));
      gap = std::max(gap, std::abs(red2(m, n) - ref.r2(m, n)));
      gap = std::max(gap, std::abs(redp(m, n) - ref.r3_pair(m, n)));
      gap = std::max(gap, std::abs(redc(m, n) - ref.r3_curv(m, n)));
    }
  out.coincidence = gap;
  return out;
}

ReducedResidual adhm_reduced_residual(const VortexState& s) {
  XiQuaternionic xi{Matrix::Zero(1, 1), Matrix::Zero(1, 1), Matrix::Zero(1, 1),
                    Matrix::Zero(1, 1)};
  return adhm_reduced_residual(s, xi);
}

// ---------------------------------------------------------------------------

json state_to_json(const VortexState& s) {
  require_valid(s, "state_to_json");
  const int nn = s.grid.n;
  json j;
  j["grid"] = {{"n", nn},
               {"l1", s.grid.l1},
               {"l2", s.grid.l2},
               {"degree", s.grid.degree}};
  j["lambda"] = s.lambda;
  j["theta"] = {s.theta.real(), s.theta.imag()};
  json a1 = json::array(), a2 = json::array();
  json p1 = json::array(), p2 = json::array();
  for (int m = 0; m < nn; ++m)
    for (int n = 0; n < nn; ++n) {
      a1.push_back(s.a1(m, n));
      a2.push_back(s.a2(m, n));
      p1.push_back({s.psi1(m, n).real(), s.psi1(m, n).imag()});
      p2.push_back({s.psi2(m, n).real(), s.psi2(m, n).imag()});
    }
  j["a1"] = std::move(a1);
  j["a2"] = std::move(a2);
  j["psi1"] = std::move(p1);
  j["psi2"] = std::move(p2);
  return j;
}

VortexState state_from_json(const json& j) {
  const json& jg = j.at("grid");
  TorusGrid grid = make_grid(jg.at("n").get<int>(), jg.at("degree").get<int>(),
                             jg.at("l1").get<double>(), jg.at("l2").get<double>());
  VortexState s = zero_state(grid, j.at("lambda").get<double>());
  const json& jt = j.at("theta");
  s.theta = Cx(jt.at(0).get<double>(), jt.at(1).get<double>());
  const int nn = grid.n;
  const json& a1 = j.at("a1");
  const json& a2 = j.at("a2");
  const json& p1 = j.at("psi1");
  const json& p2 = j.at("psi2");
  if (static_cast<int>(a1.size()) != nn * nn ||
      static_cast<int>(a2.size()) != nn * nn ||
      static_cast<int>(p1.size()) != nn * nn ||
      static_cast<int>(p2.size()) != nn * nn)
    throw std::invalid_argument("state_from_json: field length mismatch");
  for (int m = 0; m < nn; ++m)
    for (int n = 0; n < nn; ++n) {
      int idx = m * nn + n;
      s.a1(m, n) = a1.at(idx).get<double>();
      s.a2(m, n) = a2.at(idx).get<double>();
      s.psi1(m, n) = Cx(p1.at(idx).at(0).get<double>(),
                        p1.at(idx).at(1).get<double>());
      s.psi2(m, n) = Cx(p2.at(idx).at(0).get<double>(),
                        p2.at(idx).at(1).get<double>());
    }
  return s;
}

}  // namespace adhm
