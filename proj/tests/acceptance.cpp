// Acceptance gate: runs the release criteria end to end and prints one
// [PASS]/[FAIL] line per criterion.  Exit status 0 iff everything passed.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "adhm/config.hpp"
#include "adhm/f2.hpp"
#include "adhm/flow.hpp"
#include "adhm/moment.hpp"
#include "adhm/series.hpp"
#include "adhm/strata.hpp"
#include "adhm/vortex.hpp"

using namespace adhm;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %-34s %s\n", ok ? "PASS" : "FAIL", idx, name,
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double seconds_since(
    const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(const char* pattern, double a, double b = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

std::vector<std::array<double, 4>> random_values(int blocks,
                                                 RandomStream& rs) {
  std::vector<std::array<double, 4>> vals(static_cast<size_t>(blocks));
  for (auto& v : vals)
    for (auto& x : v) x = rs.normal();
  return vals;
}

// 1. moment-map norm identity on random xi, k = 2..6
void criterion_norm_identity() {
  auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  for (int k = 2; k <= 6; ++k) {
    RandomStream rs(sub_seed(1001, static_cast<uint64_t>(k)));
    for (int i = 0; i < 1000; ++i)
      worst = std::max(worst,
                       check_mu_norm_identity(random_xi(k, rs)).rel_err());
  }
  double dt = seconds_since(t0);
  report(1, "norm identity", worst < 1e-10 && dt < 10.0,
         fmt("max rel %.2e, %.1fs", worst, dt));
}

// 2. linearized identity at diagonal (commuting) xi, k = 2..5
void criterion_linearized_identity() {
  double worst = 0;
  for (int k = 2; k <= 5; ++k) {
    RandomStream rs(sub_seed(1002, static_cast<uint64_t>(k)));
    Partition ones(static_cast<size_t>(k), 1);
    for (int i = 0; i < 500; ++i) {
      XiQuaternionic xi = xi_with_spectrum(ones, random_values(k, rs),
                                           Matrix::Identity(k, k));
      XiQuaternionic eta = random_xi(k, rs);
      worst = std::max(worst, check_linearized_identity(xi, eta).rel_err());
    }
  }
  report(2, "linearized identity", worst < 1e-10,
         fmt("max rel %.2e", worst));
}

// 3. equivariance on random pairs; chart agreement near the zero locus
void criterion_equivariance_chart() {
  double worst_eq = 0;
  {
    RandomStream rs(1003);
    for (int i = 0; i < 1000; ++i) {
      int k = 2 + i % 4;
      ADHMConfig c = random_config(1 + i % 3, k, rs);
      Matrix g = random_unitary(k, rs);
      worst_eq = std::max(worst_eq, equivariance_defect(g, c) / c.norm2());
    }
  }
  double worst_chart = 0, worst_mu = 0;
  {
    RandomStream rs(1004);
    for (int i = 0; i < 1000; ++i) {
      int k = 2 + i % 4;
      // exact zero (commuting normal pair, empty flavor slots) plus a
      // small perturbation
      ADHMConfig c;
      c.r = 1;
      c.k = k;
      c.v = Matrix::Zero(k, 1);
      c.w = Matrix::Zero(k, 1);
      c.A = Matrix::Zero(k, k);
      c.B = Matrix::Zero(k, k);
      for (int d = 0; d < k; ++d) {
        c.A(d, d) = rs.cnormal();
        c.B(d, d) = rs.cnormal();
      }
      c = gauge_act(random_unitary(k, rs), c);
      ADHMConfig h = random_config(1, k, rs);
      const double eps = 1e-6;
      c.v += eps * h.v;
      c.w += eps * h.w;
      c.A += eps * h.A;
      c.B += eps * h.B;

      worst_mu = std::max(worst_mu, mu_quaternionic(c).norm());
      worst_chart = std::max(worst_chart, chart_agreement_defect(c));
    }
  }
  bool ok = worst_eq < 1e-10 && worst_chart < 1e-10 && worst_mu < 1e-3;
  report(3, "equivariance + chart agreement", ok,
         fmt("equivariance %.2e, chart %.2e", worst_eq, worst_chart) +
             fmt(", max |mu| %.2e", worst_mu));
}

// 4. flows reach mu = 0 with collapsing psi
void criterion_psi_vanishing() {
  auto t0 = std::chrono::steady_clock::now();
  int converged = 0, total = 0;
  double worst_psi = 0, worst_mu = 0;
  for (int k : {2, 3}) {
    for (int run = 0; run < 50; ++run, ++total) {
      RandomStream rs(sub_seed(1005, static_cast<uint64_t>(100 * k + run)));
      ADHMConfig start = random_config(1, k, rs);
      double n = start.norm();
      start.v /= n;
      start.w /= n;
      start.A /= n;
      start.B /= n;
      FlowResult res = minimize_mu(
          start, 1e-12, 40000,
          sub_seed(1006, static_cast<uint64_t>(100 * k + run)));
      if (!res.converged) continue;
      ++converged;
      worst_mu = std::max(worst_mu, res.final_mu_norm);
      worst_psi = std::max(worst_psi, res.final_psi_norm);
    }
  }
  double dt = seconds_since(t0);
  bool ok = converged >= 90 && worst_mu < 1e-12 && worst_psi < 1e-5 &&
            dt < 300.0;
  std::ostringstream det;
  det << converged << "/" << total << " converged, "
      << fmt("max |mu| %.1e, max |psi| %.1e", worst_mu, worst_psi)
      << fmt(", %.1fs", dt);
  report(4, "psi vanishing at zeros", ok, det.str());
}

// 5. joint spectrum round trip over all partitions of k <= 5
void criterion_spectrum_roundtrip() {
  double worst = 0;
  int bad_partitions = 0, trials = 0;
  for (int k = 1; k <= 5; ++k) {
    for (const auto& p : enumerate_partitions(k)) {
      RandomStream rs(sub_seed(1007, static_cast<uint64_t>(
                                         100 * k + partition_stats(p).dim_t)));
      for (int i = 0; i < 100; ++i, ++trials) {
        auto vals = random_values(static_cast<int>(p.size()), rs);
        XiQuaternionic xi = xi_with_spectrum(p, vals, random_unitary(k, rs));
        SpectrumPoint sp = joint_spectrum(xi, 1e-8);
        if (sp.partition != p) {
          ++bad_partitions;
          continue;
        }
        std::vector<std::array<double, 4>> want;
        for (size_t b = 0; b < p.size(); ++b)
          for (int c = 0; c < p[b]; ++c) want.push_back(vals[b]);
        std::sort(want.begin(), want.end());
        for (size_t v = 0; v < want.size(); ++v)
          for (int c = 0; c < 4; ++c)
            worst = std::max(worst,
                             std::abs(sp.values[v][c] - want[v][c]));
      }
    }
  }
  bool ok = bad_partitions == 0 && worst < 1e-8;
  std::ostringstream det;
  det << trials << " trials, " << bad_partitions
      << " partition misses, " << fmt("max value err %.1e", worst);
  report(5, "joint spectrum round trip", ok, det.str());
}

// 6. v is orthogonal to the invariant subspace of w (rank-one commutator)
void criterion_krylov_orthogonality() {
  double worst = 0;
  bool all_ok = true;
  RandomStream rs(1008);
  for (int i = 0; i < 100; ++i) {
    int k = 2 + i % 5;
    int split = std::max(1, k / 2);
    Matrix A = Matrix::Zero(k, k);
    for (int d = 0; d < k; ++d) A(d, d) = d + 0.4 * rs.uniform();
    Vector v = Vector::Zero(k), w = Vector::Zero(k);
    for (int d = 0; d < split; ++d) v(d) = rs.cnormal();
    for (int d = split; d < k; ++d) w(d) = rs.cnormal();
    Matrix B = Matrix::Zero(k, k);
    for (int m = 0; m < k; ++m)
      for (int n = 0; n < k; ++n)
        B(m, n) = m == n ? Cx(rs.cnormal())
                         : w(m) * std::conj(v(n)) / (A(m, m) - A(n, n));
    PerpCheck pc = check_v_perp_V1(A, B, v, w);
    all_ok = all_ok && pc.ok;
    worst = std::max(worst, pc.max_overlap);
  }
  report(6, "krylov orthogonality", all_ok && worst < 1e-9,
         fmt("max overlap %.2e", worst));
}

// 7. exactness of the cone triangle on random chain maps
void criterion_triangle_exactness() {
  RandomStream rs(1009);
  int exact = 0, additive = 0;
  const int trials = 200;
  for (int i = 0; i < trials; ++i) {
    F2Complex src = random_complex(-1, 3, 6, rs);
    F2Complex tgt = random_complex(-1, 3, 6, rs);
    ChainMap f = random_chain_map(src, tgt, rs);
    TriangleData t = triangle_data(f);
    if (t.exact) ++exact;
    if (euler_characteristic(t.cone) ==
        euler_characteristic(tgt) - euler_characteristic(src))
      ++additive;
  }
  std::ostringstream det;
  det << exact << "/" << trials << " exact, " << additive << "/" << trials
      << " euler-additive";
  report(7, "triangle exactness", exact == trials && additive == trials,
         det.str());
}

// 8. the standard surgery triad pairs to -1 cyclically
void criterion_surgery_triad() {
  Slope m1{0, 1}, m2{-1, 0}, m3{1, -1};
  bool ok = slope_pairing(m1, m2) == -1 && slope_pairing(m2, m3) == -1 &&
            slope_pairing(m3, m1) == -1 && is_surgery_triad(m1, m2, m3);
  report(8, "surgery triad pairing", ok, "(0,1),(-1,0),(1,-1) -> -1,-1,-1");
}

// 9. series fixtures, cross-route agreement, symmetry, q = 1 guards
void criterion_series() {
  bool ok = true;
  std::string why = "all fixtures hold";

  LaurentSeries g1 = sw_series(1, -10, 10);
  ok = ok && g1.coeff(0) == 1 && g1.coeffs.size() == 1;

  LaurentSeries g2 = sw_series(2, -10, 10);
  ok = ok && g2.coeff(-1) == 1 && g2.coeff(0) == 2 && g2.coeff(1) == 1 &&
       g2.coeffs.size() == 3 && evaluate_at_one(g2, 2) == 4;

  LaurentSeries g0 = sw_series(0, -10, 20);
  for (int d = 1; d <= 20; ++d)
    ok = ok && g0.coeff(d) == (d % 2 == 1 ? d : -d);
  for (int d = -10; d <= 0; ++d) ok = ok && g0.coeff(d) == 0;

  for (int g = 0; g <= 6; ++g)
    ok = ok && sw_series(g, -10, 10) == pt_series(g, -10, 10);

  for (int g = 1; g <= 6; ++g) {
    LaurentSeries s = sw_series(g, -10, 10);
    for (int d = 0; d <= 10; ++d) {
      ok = ok && s.coeff(d) == s.coeff(-d);
      if (d > g - 1) ok = ok && s.coeff(d) == 0;
    }
  }

  bool threw = false;
  try {
    evaluate_at_one(g0, 0);
  } catch (const std::invalid_argument&) {
    threw = true;
  }
  ok = ok && threw;
  if (!ok) why = "a fixture or guard failed";
  report(9, "series fixtures", ok, why);
}

// 10. stability clauses on the worked fixtures
void criterion_stability() {
  const double two_pi = 2 * M_PI;
  StabilityVerdict a = is_delta_stable({2, 0}, 1.0, two_pi, false, true, {});
  StabilityVerdict b = is_delta_stable({1, 0}, 1.0, two_pi, true, true, {});
  StabilityVerdict c = is_delta_stable({2, 0}, 1.0, two_pi, true, true,
                                       {{1, 1, true, false}});
  bool ok = !a.stable && a.violated_clause == 1 && b.stable && !c.stable &&
            c.violated_clause == 2 && c.witness.has_value();
  report(10, "stability clauses", ok,
         "psi1 flag, rank-one vacuous, slope witness");
}

// 11. vortex solves on the production grid
void criterion_vortex() {
  bool ok = true;
  std::ostringstream det;

  {
    auto t0 = std::chrono::steady_clock::now();
    TorusGrid g = make_grid(64, 0);
    VortexSolveResult res = solve_vortex(g, 1.0, 1);
    double dt = seconds_since(t0);
    double mass = g.cell() * res.state.psi1.squaredNorm();
    double want = 2 * M_PI;
    bool this_ok = res.report.converged &&
                   std::abs(mass - want) < 0.01 * want && dt < 600.0;
    ok = ok && this_ok;
    det << fmt("d=0: |psi1|^2 off by %.2e%%", 100 * std::abs(mass - want) / want)
        << fmt(", %.0fs", dt);
  }
  {
    auto t0 = std::chrono::steady_clock::now();
    TorusGrid g = make_grid(64, 1);
    VortexSolveResult res = solve_vortex(g, 3.0, 1);
    double dt = seconds_since(t0);
    double n1 = res.state.psi1.norm(), n2 = res.state.psi2.norm();
    WindingReport w = winding_number(res.state);
    IntegralIdentity ii = integral_identity_check(res.state);
    bool this_ok = res.report.converged && n2 / n1 < 1e-3 && !w.used_psi2 &&
                   w.total == 1 && w.zero_count == 1 &&
                   ii.relative_error < 1e-2 && dt < 600.0;
    ok = ok && this_ok;
    det << fmt("; d=1: ratio %.1e", n2 / n1) << ", winding " << w.total
        << fmt(", integral %.1e", ii.relative_error) << fmt(", %.0fs", dt);
  }
  report(11, "vortex correspondence", ok, det.str());
}

}  // namespace

int main() {
  criterion_norm_identity();
  criterion_linearized_identity();
  criterion_equivariance_chart();
  criterion_psi_vanishing();
  criterion_spectrum_roundtrip();
  criterion_krylov_orthogonality();
  criterion_triangle_exactness();
  criterion_surgery_triad();
  criterion_series();
  criterion_stability();
  criterion_vortex();

  if (g_failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criterion(s) failed\n", g_failures);
  return 1;
}
