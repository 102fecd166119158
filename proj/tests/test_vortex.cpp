#include <doctest.h>

#include "adhm/vortex.hpp"

using namespace adhm;

TEST_SUITE_BEGIN("vortex");

namespace {

VortexState random_state(const TorusGrid& g, double lambda, uint64_t seed,
                         double amp = 0.3) {
  VortexState s = zero_state(g, lambda, Cx(0.05, -0.02));
  RandomStream rs(seed);
  for (int m = 0; m < g.n; ++m)
    for (int n = 0; n < g.n; ++n) {
      s.a1(m, n) = amp * rs.normal();
      s.a2(m, n) = amp * rs.normal();
      s.psi1(m, n) = amp * rs.cnormal();
      s.psi2(m, n) = amp * rs.cnormal();
    }
  return s;
}

double state_gap(const VortexState& a, const VortexState& b) {
  return (a.a1 - b.a1).norm() + (a.a2 - b.a2).norm() +
         (a.psi1 - b.psi1).norm() + (a.psi2 - b.psi2).norm();
}

}  // namespace

TEST_CASE("grid construction and validation") {
  TorusGrid g = make_grid(16, 1);
  CHECK(g.n == 16);
  CHECK(g.degree == 1);
  CHECK(g.h1() == doctest::Approx(g.l1 / 16));
  CHECK(g.cell() == doctest::Approx(g.h1() * g.h2()));
  CHECK(g.area() == doctest::Approx(g.l1 * g.l2));

  CHECK_THROWS_AS(make_grid(8, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(16, 0, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("background flux is uniform and quantized") {
  for (int d : {-2, 0, 1, 3}) {
    TorusGrid g = make_grid(16, d);
    VortexState s = zero_state(g, 0.5, Cx(0, 0));
    Eigen::MatrixXd f = plaquette_flux(s);
    double total = f.sum();
    CHECK(std::abs(total - 2 * M_PI * d) < 1e-9);
    // every plaquette carries the same fraction
    double want = 2 * M_PI * d / (g.n * g.n);
    for (int m = 0; m < g.n; ++m)
      for (int n = 0; n < g.n; ++n)
        CHECK(std::abs(f(m, n) - want) < 1e-12);
  }
}

TEST_CASE("constant state solves the degree zero system exactly") {
  TorusGrid g = make_grid(16, 0);
  VortexState s = constant_state(g, 1.5);
  VortexResidual r = vortex_residual(s);
  CHECK(r.total < 1e-12);
  // density matches the curvature equation
  double want = 2 * M_PI * 1.5 / g.area();
  CHECK(std::norm(s.psi1(3, 7)) == doctest::Approx(want));
  CHECK(s.psi2.norm() == 0.0);

  CHECK(vortex_energy(s) < 1e-24);
  CHECK_THROWS_AS(constant_state(g, -1.0), std::invalid_argument);
}

TEST_CASE("residual norms are gauge invariant") {
  TorusGrid g = make_grid(16, 1);
  VortexState s = random_state(g, 2.0, 42);
  RandomStream rs(43);
  Eigen::MatrixXd chi(g.n, g.n);
  for (int m = 0; m < g.n; ++m)
    for (int n = 0; n < g.n; ++n) chi(m, n) = rs.normal();

  VortexState t = gauge_transform(s, chi);
  REQUIRE(state_gap(s, t) > 1e-3);  // a real transformation

  VortexResidual rs1 = vortex_residual(s), rs2 = vortex_residual(t);
  CHECK(rs1.norm1 == doctest::Approx(rs2.norm1).epsilon(1e-12));
  CHECK(rs1.norm2 == doctest::Approx(rs2.norm2).epsilon(1e-12));
  CHECK(rs1.norm3 == doctest::Approx(rs2.norm3).epsilon(1e-12));
  CHECK(rs1.total == doctest::Approx(rs2.total).epsilon(1e-12));

  VortexResidual rf1 = vortex_residual_forward(s),
                 rf2 = vortex_residual_forward(t);
  CHECK(rf1.total == doctest::Approx(rf2.total).epsilon(1e-12));

  // plaquette fluxes are gauge invariant pointwise
  CHECK((plaquette_flux(s) - plaquette_flux(t)).cwiseAbs().maxCoeff() <
        1e-11);

  // winding of either section is unchanged
  WindingReport w1 = winding_number(s, false), w2 = winding_number(t, false);
  CHECK(w1.total == w2.total);
  CHECK(w1.zero_count == w2.zero_count);
}

TEST_CASE("energy gradient matches central differences") {
  TorusGrid g = make_grid(16, 1);
  VortexState s = random_state(g, 2.0, 7, 0.2);
  RandomStream rs(8);
  const double t = 1e-6;

  for (bool forward : {false, true}) {
    VortexGradient grad = vortex_energy_gradient(s, forward);
    // directional derivative along a random tangent
    VortexState plus = s, minus = s;
    double pairing = 0;
    for (int m = 0; m < g.n; ++m)
      for (int n = 0; n < g.n; ++n) {
        double da1 = rs.normal(), da2 = rs.normal();
        Cx dp = rs.cnormal(), dq = rs.cnormal();
        plus.a1(m, n) += t * da1;
        plus.a2(m, n) += t * da2;
        plus.psi1(m, n) += t * dp;
        plus.psi2(m, n) += t * dq;
        minus.a1(m, n) -= t * da1;
        minus.a2(m, n) -= t * da2;
        minus.psi1(m, n) -= t * dp;
        minus.psi2(m, n) -= t * dq;
        pairing += grad.a1(m, n) * da1 + grad.a2(m, n) * da2 +
                   grad.psi1(m, n).real() * dp.real() +
                   grad.psi1(m, n).imag() * dp.imag() +
                   grad.psi2(m, n).real() * dq.real() +
                   grad.psi2(m, n).imag() * dq.imag();
      }
    double fd = (vortex_energy(plus, forward) -
                 vortex_energy(minus, forward)) /
                (2 * t);
    CHECK(std::abs(fd - pairing) < 1e-6 * std::max(1.0, std::abs(pairing)));
  }
}

TEST_CASE("solver reaches the vortex branch at degree one") {
  TorusGrid g = make_grid(16, 1);
  VortexSolveResult res = solve_vortex(g, 3.0, 1);
  REQUIRE(res.report.converged);
  CHECK(res.report.residual_norm <= 1e-6);
  CHECK(res.report.iterations_forward > 0);

  const double cell = g.cell();
  double n1 = std::sqrt(cell) * res.state.psi1.norm();
  double n2 = std::sqrt(cell) * res.state.psi2.norm();
  CHECK(n2 / n1 < 1e-3);  // dichotomy: one section survives

  WindingReport w = winding_number(res.state);
  CHECK_FALSE(w.used_psi2);
  CHECK(w.total == 1);
  CHECK(w.zero_count == 1);

  IntegralIdentity ii = integral_identity_check(res.state);
  CHECK(ii.relative_error < 1e-2);
  CHECK(ii.rhs == doctest::Approx(2 * M_PI * (3.0 - 1.0)));
}

TEST_CASE("mirror branch: negative degree selects the other section") {
  TorusGrid g = make_grid(16, -1);
  VortexSolveResult res = solve_vortex(g, -3.0, 1);
  REQUIRE(res.report.converged);

  const double cell = g.cell();
  double n1 = std::sqrt(cell) * res.state.psi1.norm();
  double n2 = std::sqrt(cell) * res.state.psi2.norm();
  CHECK(n1 / n2 < 1e-3);

  WindingReport w = winding_number(res.state);
  CHECK(w.used_psi2);
  CHECK(w.total == -1);
  CHECK(w.zero_count == 1);
}

TEST_CASE("degree zero converges to the constant solution") {
  TorusGrid g = make_grid(16, 0);
  VortexSolveResult res = solve_vortex(g, 1.0, 2);
  REQUIRE(res.report.converged);
  double mass = g.cell() * res.state.psi1.squaredNorm() -
                g.cell() * res.state.psi2.squaredNorm();
  CHECK(std::abs(mass - 2 * M_PI) < 0.01 * 2 * M_PI);
  WindingReport w = winding_number(res.state);
  CHECK(w.total == 0);
  CHECK(w.zero_count == 0);
}

TEST_CASE("solver precondition guards") {
  TorusGrid g = make_grid(16, 1);
  CHECK_THROWS_AS(solve_vortex(g, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(solve_vortex(make_grid(16, 4), 6.0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_vortex(g, 3.0, 1, -1.0), std::invalid_argument);
}

TEST_CASE("reduced evaluator coincides with the vortex residual") {
  TorusGrid g = make_grid(16, 1);
  VortexState s = random_state(g, 2.0, 99);

  ReducedResidual rr = adhm_reduced_residual(s);
  CHECK(rr.coincidence < 1e-12);
  CHECK(rr.xi_moment == 0.0);
  CHECK(rr.xi_wedge == 0.0);

  // the scalar quaternionic slot stays decoupled
  RandomStream rs(100);
  XiQuaternionic xi = random_xi(1, rs);
  ReducedResidual rx = adhm_reduced_residual(s, xi);
  CHECK(rx.coincidence < 1e-12);
  CHECK(rx.xi_moment < 1e-14);
  CHECK(rx.xi_wedge < 1e-14);
  VortexResidual vr = vortex_residual(s);
  CHECK(rx.dirac1 == doctest::Approx(vr.norm1).epsilon(1e-12));
  CHECK(rx.dirac2 == doctest::Approx(vr.norm2).epsilon(1e-12));

  XiQuaternionic big = random_xi(2, rs);
  CHECK_THROWS_AS(adhm_reduced_residual(s, big), std::invalid_argument);
}

TEST_CASE("state json round trip is exact") {
  TorusGrid g = make_grid(16, 2);
  VortexState s = random_state(g, 1.25, 123);
  VortexState back = state_from_json(state_to_json(s));
  CHECK(back.grid.n == s.grid.n);
  CHECK(back.grid.degree == s.grid.degree);
  CHECK(back.lambda == s.lambda);
  CHECK(back.theta == s.theta);
  CHECK(state_gap(s, back) == 0.0);
}

TEST_SUITE_END();
