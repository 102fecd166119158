#include "adhm/flow.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace adhm {

double FlowGradient::norm2() const {
  return v.squaredNorm() + w.squaredNorm() + a.squaredNorm() + b.squaredNorm();
}

double flow_energy(const ADHMConfig& c) { return mu_complex(c).norm2(); }

// E = ||R||^2 + ||C||^2 with R = (1/2)(vv^+ - ww^+ - [A,A^+] - [B,B^+]),
// C = wv^+ - [A,B]; differentiating and collecting adjoints gives
//   G_v = Rv + C^+ w,  G_w = -Rw + Cv,
//   G_A = -[R,A] + [B^+,C],  G_B = -[R,B] + [C,A^+],
// with dE = 2 Re tr(G^+ dx).  (Validated against finite differences.)
FlowGradient flow_gradient(const ADHMConfig& c) {
  ComplexMomentValue m = mu_complex(c);
  const Matrix& R = m.real_part;
  const Matrix& C = m.complex_part;
  FlowGradient g;
  g.v = 2.0 * (R * c.v + C.adjoint() * c.w);
  g.w = 2.0 * (C * c.v - R * c.w);
  g.a = 2.0 * (commutator(Matrix(c.B.adjoint()), C) - commutator(R, c.A));
  g.b = 2.0 * (commutator(C, Matrix(c.A.adjoint())) - commutator(R, c.B));
  return g;
}

namespace {

double dot(const FlowGradient& x, const FlowGradient& y) {
  return ((x.v.adjoint() * y.v).trace() + (x.w.adjoint() * y.w).trace() +
          (x.a.adjoint() * y.a).trace() + (x.b.adjoint() * y.b).trace())
      .real();
}

ADHMConfig descend(const ADHMConfig& c, const FlowGradient& g, double t) {
  ADHMConfig out = c;
  out.v -= t * g.v;
  out.w -= t * g.w;
  out.A -= t * g.a;
  out.B -= t * g.b;
  return out;
}

FlowGradient config_diff(const ADHMConfig& x, const ADHMConfig& y) {
  return {x.v - y.v, x.w - y.w, x.A - y.A, x.B - y.B};
}

FlowGradient grad_diff(const FlowGradient& x, const FlowGradient& y) {
  return {x.v - y.v, x.w - y.w, x.a - y.a, x.b - y.b};
}

void pack_residual(const ComplexMomentValue& m, Eigen::VectorXd& res) {
  const int k = static_cast<int>(m.real_part.rows());
  int row = 0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      res(row++) = m.real_part(i, j).real();
      res(row++) = m.real_part(i, j).imag();
    }
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      res(row++) = m.complex_part(i, j).real();
      res(row++) = m.complex_part(i, j).imag();
    }
}

// visit the real coordinates of (v, w, A, B) in a fixed order
template <typename F>
void for_each_coordinate(ADHMConfig& c, F&& f) {
  Matrix* mats[4] = {&c.v, &c.w, &c.A, &c.B};
  for (Matrix* m : mats)
    for (int i = 0; i < m->rows(); ++i)
      for (int j = 0; j < m->cols(); ++j) {
        f(*m, i, j, false);
        f(*m, i, j, true);
      }
}

// one Gauss-Newton step on the stacked residual (R, C); min-norm
// least-squares direction, halved until the energy decreases
bool gauss_newton_step(ADHMConfig& c, double& E) {
  const int k = c.k, r = c.r;
  const int nres = 4 * k * k;
  const int npar = 4 * k * r + 4 * k * k;

  Eigen::VectorXd res(nres);
  pack_residual(mu_complex(c), res);

  Eigen::MatrixXd jac(nres, npar);
  ADHMConfig h;
  h.r = r;
  h.k = k;
  h.v = Matrix::Zero(k, r);
  h.w = Matrix::Zero(k, r);
  h.A = Matrix::Zero(k, k);
  h.B = Matrix::Zero(k, k);
  int col = 0;
  Eigen::VectorXd colv(nres);
  for_each_coordinate(h, [&](Matrix& m, int i, int j, bool imag) {
    m(i, j) = imag ? Cx(0, 1) : Cx(1, 0);
    pack_residual(mu_complex_differential(c, h), colv);
    jac.col(col++) = colv;
    m(i, j) = 0;
  });

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd delta = svd.solve(-res);

  double scale = 1.0;
  for (int halve = 0; halve < 12; ++halve) {
    ADHMConfig cand = c;
    int idx = 0;
    for_each_coordinate(cand, [&](Matrix& m, int i, int j, bool imag) {
      m(i, j) += scale * (imag ? Cx(0, delta(idx)) : Cx(delta(idx), 0));
      ++idx;
    });
    double ec = flow_energy(cand);
    if (ec < E) {
      c = cand;
      E = ec;
      return true;
    }
    scale *= 0.5;
  }
  return false;
}

}  // namespace

FlowResult minimize_mu(const ADHMConfig& start, double tol, int max_iter,
                       std::uint64_t seed) {
  if (tol <= 0) throw std::invalid_argument("minimize_mu: tol must be > 0");
  if (!config_shapes_ok(start))
    throw std::invalid_argument("minimize_mu: malformed start config");

  FlowResult out;
  ADHMConfig c = start;
  double e = flow_energy(c);
  const double target = tol * tol;
  RandomStream kick_stream(sub_seed(seed, 0x717));

  FlowGradient g = flow_gradient(c);
  double g2 = g.norm2();
  ADHMConfig prev_c;
  FlowGradient prev_g;
  bool have_prev = false;
  double grow = 1.0;
  int iter = 0;
  int kicks = 0;

  while (e > target && iter < max_iter) {
    if (std::sqrt(e) < 1e-4 && gauss_newton_step(c, e)) {
      ++iter;
      g = flow_gradient(c);
      g2 = g.norm2();
      have_prev = false;
      continue;
    }

    // Barzilai-Borwein trial step, safeguarded, then Armijo backtracking
    double trial = grow;
    if (have_prev) {
      FlowGradient s = config_diff(c, prev_c);
      FlowGradient y = grad_diff(g, prev_g);
      double sy = dot(s, y);
      if (sy > 1e-300) {
        double bb = dot(s, s) / sy;
        if (bb > 1e-14 && bb < 1e6) trial = bb;
      }
    } else {
      trial = std::min(1.0, 1.0 / std::sqrt(std::max(g2, 1e-300)));
    }

    bool accepted = false;
    for (int ls = 0; ls < 60 && trial > 0; ++ls) {
      ADHMConfig cand = descend(c, g, trial);
      double ec = flow_energy(cand);
      if (ec <= e - 1e-4 * trial * g2) {
        prev_c = std::move(c);
        prev_g = g;
        have_prev = true;
        c = std::move(cand);
        e = ec;
        g = flow_gradient(c);
        g2 = g.norm2();
        grow = trial * 2;
        accepted = true;
        break;
      }
      trial *= 0.5;
    }
    ++iter;

    if (!accepted) {
      // stalled at a critical point; admit only strictly-decreasing kicks
      bool rescued = false;
      for (int att = 0; att < 8 && kicks < 5; ++att) {
        ADHMConfig d = random_config(c.r, c.k, kick_stream);
        double eps =
            1e-3 * std::max(std::sqrt(e), 1e-8) / std::max(d.norm(), 1e-300);
        ADHMConfig cand = c;
        cand.v += eps * d.v;
        cand.w += eps * d.w;
        cand.A += eps * d.A;
        cand.B += eps * d.B;
        double ec = flow_energy(cand);
        if (ec < e) {
          c = cand;
          e = ec;
          g = flow_gradient(c);
          g2 = g.norm2();
          have_prev = false;
          ++kicks;
          rescued = true;
          break;
        }
      }
      if (!rescued) break;
    }
  }

  out.final_config = c;
  out.iterations = iter;
  out.final_mu_norm = std::sqrt(std::max(flow_energy(c), 0.0));
  out.final_psi_norm = std::sqrt(c.v.squaredNorm() + c.w.squaredNorm());
  out.converged = out.final_mu_norm <= tol;
  if (out.converged && out.final_psi_norm < kSpectrumPsiThreshold) {
    double spec_tol =
        std::max(1e-6, 10.0 * (out.final_mu_norm +
                               out.final_psi_norm * out.final_psi_norm));
    for (int attempt = 0; attempt < 3 && !out.spectrum; ++attempt) {
      try {
        out.spectrum = joint_spectrum(xi_of(c), spec_tol);
      } catch (const std::exception&) {
        spec_tol *= 10;  // separation retries at coarser clustering
      }
    }
  }
  return out;
}

PsiVanishingReport psi_vanishing_report(
    const std::vector<FlowResult>& results) {
  PsiVanishingReport rep;
  for (const auto& r : results) {
    PsiVanishingRow row;
    row.final_mu_norm = r.final_mu_norm;
    row.final_psi_norm = r.final_psi_norm;
    row.converged = r.converged;
    if (r.spectrum) row.partition = r.spectrum->partition;
    row.psi_ratio =
        r.final_psi_norm / std::pow(std::max(r.final_mu_norm, 1e-300), 0.25);
    rep.rows.push_back(row);
    if (!r.converged) {
      ++rep.unconverged;
      continue;
    }
    rep.max_psi_norm = std::max(rep.max_psi_norm, r.final_psi_norm);
    if (row.psi_ratio > kPsiRatioBound) rep.bound_ok = false;
  }
  return rep;
}

json psi_vanishing_to_json(const PsiVanishingReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"final_mu_norm", r.final_mu_norm},
                    {"final_psi_norm", r.final_psi_norm},
                    {"partition", r.partition},
                    {"converged", r.converged},
                    {"psi_ratio", r.psi_ratio}});
  }
  return {{"rows", rows},
          {"max_psi_norm", rep.max_psi_norm},
          {"unconverged", rep.unconverged},
          {"bound_ok", rep.bound_ok}};
}

std::map<Partition, int> stratum_census(int k, int runs, std::uint64_t seed) {
  if (k < 1 || k > 6)
    throw std::invalid_argument("stratum_census: k out of range [1,6]");
  if (runs < 0) throw std::invalid_argument("stratum_census: runs < 0");
  std::map<Partition, int> counts;
  for (int run = 0; run < runs; ++run) {
    RandomStream rs(sub_seed(seed, static_cast<std::uint64_t>(run)));
    ADHMConfig c0 = random_config(1, k, rs);
    const double n = c0.norm();
    c0.v /= n;
    c0.w /= n;
    c0.A /= n;
    c0.B /= n;
    FlowResult res = minimize_mu(
        c0, 1e-10, 20000,
        sub_seed(seed, 0x100000ULL + static_cast<std::uint64_t>(run)));
    if (!res.converged) continue;
    Partition p;
    if (res.spectrum) {
      p = res.spectrum->partition;
    } else {
      double t = std::max(1e-6, 10.0 * res.final_mu_norm);
      for (int attempt = 0; attempt < 4 && p.empty(); ++attempt) {
        try {
          p = joint_spectrum(xi_of(res.final_config), t).partition;
        } catch (const std::exception&) {
          t *= 10;
        }
      }
      if (p.empty()) continue;  // unclassifiable endpoint, dropped
    }
    ++counts[p];
  }
  return counts;
}

}  // namespace adhm
