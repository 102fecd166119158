#include <doctest.h>

#include "adhm/moment.hpp"
#include "adhm/strata.hpp"

using namespace adhm;

TEST_SUITE_BEGIN("moment");

namespace {

double re_inner(const Matrix& x, const Matrix& y) {
  return (x.adjoint() * y).trace().real();
}

// scale-invariant gap between two matrices
double rel_gap(const Matrix& got, const Matrix& want) {
  return (got - want).norm() / std::max(1.0, want.norm());
}

ADHMConfig scaled(const ADHMConfig& c, double t) {
  return {c.r, c.k, t * c.v, t * c.w, t * c.A, t * c.B};
}

ADHMConfig shifted(const ADHMConfig& c, const ADHMConfig& h, double t) {
  return {c.r, c.k, c.v + t * h.v, c.w + t * h.w, c.A + t * h.A,
          c.B + t * h.B};
}

XiQuaternionic xi_shifted(const XiQuaternionic& xi, const XiQuaternionic& eta,
                          double t) {
  return {xi.x0 + t * eta.x0, xi.x1 + t * eta.x1, xi.x2 + t * eta.x2,
          xi.x3 + t * eta.x3};
}

// exact zero-locus xi with one value per point, conjugated
XiQuaternionic commuting_xi(int k, RandomStream& rs) {
  Partition p(static_cast<size_t>(k), 1);
  std::vector<std::array<double, 4>> vals(static_cast<size_t>(k));
  for (auto& v : vals)
    for (auto& x : v) x = rs.normal();
  return xi_with_spectrum(p, vals, random_unitary(k, rs));
}

}  // namespace

TEST_CASE("clifford momentum realizes the pairing with the unit action") {
  // <M_u(s), eta> = <s, u.(eta a, eta b)> for every anti-Hermitian eta
  RandomStream rs(41);
  for (int k : {1, 2, 4}) {
    QuaternionicVector s{rs.gaussian_matrix(k, 1), rs.gaussian_matrix(k, 1)};
    for (int trial = 0; trial < 20; ++trial) {
      Matrix eta = random_antihermitian(k, rs);
      for (ImUnit u : {ImUnit::I, ImUnit::J, ImUnit::K}) {
        Matrix m = clifford_momentum(u, s);
        QuaternionicVector acted =
            clifford_apply(u, {eta * s.a, eta * s.b});
        double lhs = re_inner(m, eta);
        double rhs = re_inner(s.a, acted.a) + re_inner(s.b, acted.b);
        CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(rhs)));
      }
    }
  }
}

TEST_CASE("the two moment map code paths agree through the fixed chart") {
  RandomStream rs(43);
  for (int trial = 0; trial < 50; ++trial) {
    int k = 1 + trial % 5, r = 1 + trial % 3;
    ADHMConfig c = random_config(r, k, rs);
    CHECK(chart_agreement_defect(c) < 1e-12);

    // frozen norm ratio between the two value spaces
    double q2 = mu_quaternionic(c).norm2();
    double c2 = mu_complex(c).norm2();
    CHECK(std::abs(q2 - kMuChartNormRatio * c2) < 1e-12 * std::max(1.0, q2));
  }
}

TEST_CASE("chart map and unmap invert each other") {
  RandomStream rs(47);
  ADHMConfig c = random_config(2, 3, rs);
  ComplexMomentValue mc = mu_complex(c);
  ComplexMomentValue back = chart_unmap(chart_map(mc));
  CHECK(rel_gap(back.real_part, mc.real_part) < 1e-14);
  CHECK(rel_gap(back.complex_part, mc.complex_part) < 1e-14);

  MomentValue mq = mu_quaternionic(c);
  MomentValue back_q = chart_map(chart_unmap(mq));
  CHECK(rel_gap(back_q.mi, mq.mi) < 1e-14);
  CHECK(rel_gap(back_q.mj, mq.mj) < 1e-14);
  CHECK(rel_gap(back_q.mk, mq.mk) < 1e-14);
}

TEST_CASE("moment map components are anti-Hermitian valued") {
  RandomStream rs(53);
  ADHMConfig c = random_config(2, 4, rs);
  MomentValue m = mu_quaternionic(c);
  CHECK(is_antihermitian(m.mi, 1e-12));
  CHECK(is_antihermitian(m.mj, 1e-12));
  CHECK(is_antihermitian(m.mk, 1e-12));
}

TEST_CASE("gauge equivariance of the moment map") {
  RandomStream rs(59);
  for (int trial = 0; trial < 100; ++trial) {
    int k = 2 + trial % 4;
    ADHMConfig c = random_config(1 + trial % 2, k, rs);
    Matrix g = random_unitary(k, rs);
    CHECK(equivariance_defect(g, c) < 1e-10 * c.norm2());
  }
}

TEST_CASE("moment map scales quadratically") {
  RandomStream rs(61);
  ADHMConfig c = random_config(1, 3, rs);
  MomentValue m1 = mu_quaternionic(c);
  MomentValue m2 = mu_quaternionic(scaled(c, 2.0));
  CHECK(rel_gap(m2.mi, 4.0 * m1.mi) < 1e-13);
  CHECK(rel_gap(m2.mj, 4.0 * m1.mj) < 1e-13);
  CHECK(rel_gap(m2.mk, 4.0 * m1.mk) < 1e-13);
}

TEST_CASE("differential matches central differences") {
  // mu is quadratic, so the central difference is exact up to rounding
  RandomStream rs(67);
  const double t = 1e-4;
  for (int trial = 0; trial < 50; ++trial) {
    int k = 1 + trial % 4, r = 1 + trial % 2;
    ADHMConfig c = random_config(r, k, rs);
    ADHMConfig h = random_config(r, k, rs);

    MomentValue plus = mu_quaternionic(shifted(c, h, t));
    MomentValue minus = mu_quaternionic(shifted(c, h, -t));
    MomentValue d = mu_differential(c, h);
    CHECK(rel_gap((plus.mi - minus.mi) / (2 * t), d.mi) < 1e-6);
    CHECK(rel_gap((plus.mj - minus.mj) / (2 * t), d.mj) < 1e-6);
    CHECK(rel_gap((plus.mk - minus.mk) / (2 * t), d.mk) < 1e-6);

    ComplexMomentValue cplus = mu_complex(shifted(c, h, t));
    ComplexMomentValue cminus = mu_complex(shifted(c, h, -t));
    ComplexMomentValue dc = mu_complex_differential(c, h);
    CHECK(rel_gap((cplus.real_part - cminus.real_part) / (2 * t),
                  dc.real_part) < 1e-6);
    CHECK(rel_gap((cplus.complex_part - cminus.complex_part) / (2 * t),
                  dc.complex_part) < 1e-6);
  }
}

TEST_CASE("xi-only differential matches central differences") {
  RandomStream rs(71);
  const double t = 1e-4;
  for (int trial = 0; trial < 30; ++trial) {
    int k = 2 + trial % 3;
    XiQuaternionic xi = random_xi(k, rs), eta = random_xi(k, rs);
    MomentValue plus = mu_of_xi(xi_shifted(xi, eta, t));
    MomentValue minus = mu_of_xi(xi_shifted(xi, eta, -t));
    MomentValue d = mu_xi_differential(xi, eta);
    CHECK(rel_gap((plus.mi - minus.mi) / (2 * t), d.mi) < 1e-6);
    CHECK(rel_gap((plus.mj - minus.mj) / (2 * t), d.mj) < 1e-6);
    CHECK(rel_gap((plus.mk - minus.mk) / (2 * t), d.mk) < 1e-6);
  }
}

TEST_CASE("action_adjoint is adjoint to the infinitesimal action") {
  // <R_xi tau, eta> = <tau, R_xi^* eta> with R_xi tau = ([tau, xi_a])_a
  RandomStream rs(73);
  for (int trial = 0; trial < 40; ++trial) {
    int k = 2 + trial % 4;
    XiQuaternionic xi = random_xi(k, rs), eta = random_xi(k, rs);
    Matrix tau = random_antihermitian(k, rs);
    double lhs = 0;
    for (int a = 0; a < 4; ++a)
      lhs += re_inner(commutator(tau, xi.comp(a)), eta.comp(a));
    double rhs = re_inner(tau, action_adjoint(xi, eta));
    CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("norm identity: |mu(xi)|^2 = half the bracket sum") {
  RandomStream rs(79);
  for (int trial = 0; trial < 200; ++trial) {
    XiQuaternionic xi = random_xi(2 + trial % 4, rs);
    CHECK(check_mu_norm_identity(xi).rel_err() < 1e-12);
  }
}

TEST_CASE("zero moment forces every commutator pair to vanish") {
  RandomStream rs(83);
  XiQuaternionic xi = commuting_xi(4, rs);
  CHECK(mu_of_xi(xi).norm() < 1e-12);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      CHECK(commutator(xi.comp(a), xi.comp(b)).norm() < 1e-12);
}

TEST_CASE("linearized identity on the zero locus") {
  RandomStream rs(89);
  for (int trial = 0; trial < 60; ++trial) {
    int k = 2 + trial % 4;
    XiQuaternionic xi = commuting_xi(k, rs);
    XiQuaternionic eta = random_xi(k, rs);
    CHECK(check_linearized_identity(xi, eta).rel_err() < 1e-12);
  }
}

TEST_CASE("linearized identity edge cases") {
  RandomStream rs(97);

  // eta = 0: both sides vanish
  XiQuaternionic xi = commuting_xi(3, rs);
  Matrix z = Matrix::Zero(3, 3);
  XiQuaternionic eta0{z, z, z, z};
  IdentityCheck c = check_linearized_identity(xi, eta0);
  CHECK(c.lhs == 0.0);
  CHECK(c.rhs == 0.0);
  CHECK(c.rel_err() < 1e-15);

  // xi = 0 sits on the zero locus; all brackets vanish
  XiQuaternionic zero{z, z, z, z};
  XiQuaternionic eta = random_xi(3, rs);
  IdentityCheck c0 = check_linearized_identity(zero, eta);
  CHECK(c0.lhs == 0.0);
  CHECK(c0.rhs == 0.0);

  // scalar xi (single-block spectrum): both sides are rounding noise and
  // the scale-aware relative error must stay tiny
  Partition whole{3};
  std::vector<std::array<double, 4>> vals{{0.3, -1.2, 0.7, 2.1}};
  XiQuaternionic scalar = xi_with_spectrum(whole, vals, random_unitary(3, rs));
  CHECK(check_linearized_identity(scalar, eta).rel_err() < 1e-12);

  // off the zero locus the precondition is enforced
  XiQuaternionic bad = random_xi(3, rs);
  REQUIRE(mu_of_xi(bad).norm() > 1e-4);
  CHECK_THROWS_AS(check_linearized_identity(bad, eta), std::invalid_argument);
}

TEST_SUITE_END();
