#include "adhm/moment.hpp"

namespace adhm {

Matrix clifford_momentum(ImUnit u, const QuaternionicVector& s) {
  const Cx im(0, 1);
  Matrix aa = s.a * s.a.adjoint();
  Matrix bb = s.b * s.b.adjoint();
  Matrix ab = s.a * s.b.adjoint();
  Matrix ba = s.b * s.a.adjoint();
  switch (u) {
    case ImUnit::I: return im * (bb - aa);
    case ImUnit::J: return ba - ab;
    case ImUnit::K: return im * (ab + ba);
  }
  throw std::logic_error("clifford_momentum: bad unit");
}

MomentValue mu_of_psi(const Matrix& v, const Matrix& w) {
  int k = static_cast<int>(v.rows());
  MomentValue m{Matrix::Zero(k, k), Matrix::Zero(k, k), Matrix::Zero(k, k)};
  for (int c = 0; c < v.cols(); ++c) {
    QuaternionicVector s{v.col(c), w.col(c)};
    m.mi += clifford_momentum(ImUnit::I, s);
    m.mj += clifford_momentum(ImUnit::J, s);
    m.mk += clifford_momentum(ImUnit::K, s);
  }
  m.mi *= 0.5;
  m.mj *= 0.5;
  m.mk *= 0.5;
  return m;
}

MomentValue mu_of_xi(const XiQuaternionic& xi) {
  MomentValue m;
  m.mi = commutator(xi.x0, xi.x1) + commutator(xi.x2, xi.x3);
  m.mj = commutator(xi.x0, xi.x2) + commutator(xi.x3, xi.x1);
  m.mk = commutator(xi.x0, xi.x3) + commutator(xi.x1, xi.x2);
  return m;
}

MomentValue mu_quaternionic(const ADHMConfig& c) {
  MomentValue p = mu_of_psi(c.v, c.w);
  MomentValue x = mu_of_xi(xi_of(c));
  return {p.mi + x.mi, p.mj + x.mj, p.mk + x.mk};
}

ComplexMomentValue mu_complex(const ADHMConfig& c) {
  ComplexMomentValue m;
  m.real_part = 0.5 * (c.v * c.v.adjoint() - c.w * c.w.adjoint() -
                       commutator(c.A, c.A.adjoint()) -
                       commutator(c.B, c.B.adjoint()));
  m.complex_part = c.w * c.v.adjoint() - commutator(c.A, c.B);
  return m;
}

MomentValue chart_map(const ComplexMomentValue& m) {
  const Cx im(0, 1);
  MomentValue out;
  out.mi = -im * m.real_part;
  out.mj = (m.complex_part - m.complex_part.adjoint()) / 2.0;
  out.mk = im * (m.complex_part + m.complex_part.adjoint()) / 2.0;
  return out;
}

ComplexMomentValue chart_unmap(const MomentValue& m) {
  const Cx im(0, 1);
  return {im * m.mi, m.mj - im * m.mk};
}

MomentValue mu_differential(const ADHMConfig& c, const ADHMConfig& h) {
  const Cx ih(0, 0.5);
  MomentValue m;
  // Psi part: polarization of the column Gram forms
  m.mi = ih * (c.w * h.w.adjoint() + h.w * c.w.adjoint() -
               c.v * h.v.adjoint() - h.v * c.v.adjoint());
  m.mj = 0.5 * (c.w * h.v.adjoint() + h.w * c.v.adjoint() -
                c.v * h.w.adjoint() - h.v * c.w.adjoint());
  m.mk = ih * (c.v * h.w.adjoint() + h.v * c.w.adjoint() +
               c.w * h.v.adjoint() + h.w * c.v.adjoint());
  // xi part
  MomentValue x = mu_xi_differential(xi_of(c), xi_of(h));
  m.mi += x.mi;
  m.mj += x.mj;
  m.mk += x.mk;
  return m;
}

ComplexMomentValue mu_complex_differential(const ADHMConfig& c,
                                           const ADHMConfig& h) {
  ComplexMomentValue m;
  m.real_part =
      0.5 * (h.v * c.v.adjoint() + c.v * h.v.adjoint() -
             h.w * c.w.adjoint() - c.w * h.w.adjoint() -
             commutator(h.A, c.A.adjoint()) - commutator(c.A, h.A.adjoint()) -
             commutator(h.B, c.B.adjoint()) - commutator(c.B, h.B.adjoint()));
  m.complex_part = h.w * c.v.adjoint() + c.w * h.v.adjoint() -
                   commutator(h.A, c.B) - commutator(c.A, h.B);
  return m;
}

MomentValue mu_xi_differential(const XiQuaternionic& xi,
                               const XiQuaternionic& eta) {
  MomentValue m;
  m.mi = commutator(eta.x0, xi.x1) + commutator(xi.x0, eta.x1) +
         commutator(eta.x2, xi.x3) + commutator(xi.x2, eta.x3);
  m.mj = commutator(eta.x0, xi.x2) + commutator(xi.x0, eta.x2) +
         commutator(eta.x3, xi.x1) + commutator(xi.x3, eta.x1);
  m.mk = commutator(eta.x0, xi.x3) + commutator(xi.x0, eta.x3) +
         commutator(eta.x1, xi.x2) + commutator(xi.x1, eta.x2);
  return m;
}

Matrix action_adjoint(const XiQuaternionic& xi, const XiQuaternionic& eta) {
  Matrix out = commutator(xi.x0, eta.x0);
  out += commutator(xi.x1, eta.x1);
  out += commutator(xi.x2, eta.x2);
  out += commutator(xi.x3, eta.x3);
  return out;
}

IdentityCheck check_mu_norm_identity(const XiQuaternionic& xi) {
  IdentityCheck c;
  c.lhs = mu_of_xi(xi).norm2();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      c.rhs += 0.5 * commutator(xi.comp(a), xi.comp(b)).squaredNorm();
  c.scale = xi.norm2() * xi.norm2();
  return c;
}

IdentityCheck check_linearized_identity(const XiQuaternionic& xi,
                                        const XiQuaternionic& eta,
                                        double mu_tol) {
  double mu_norm = mu_of_xi(xi).norm();
  if (mu_norm > mu_tol * std::max(1.0, xi.norm2()))
    throw std::invalid_argument(
        "check_linearized_identity: xi is not on the zero locus, |mu(xi)| = " +
        std::to_string(mu_norm));
  IdentityCheck c;
  c.lhs = mu_xi_differential(xi, eta).norm2() +
          action_adjoint(xi, eta).squaredNorm();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      c.rhs += commutator(xi.comp(a), eta.comp(b)).squaredNorm();
  c.scale = xi.norm2() * eta.norm2();
  return c;
}

MomentValue gauge_act_moment(const Matrix& g, const MomentValue& m) {
  Matrix gh = g.adjoint();
  return {g * m.mi * gh, g * m.mj * gh, g * m.mk * gh};
}

double equivariance_defect(const Matrix& g, const ADHMConfig& c) {
  ADHMConfig gc = gauge_act(g, c);

  MomentValue mq = mu_quaternionic(c);
  MomentValue mq_g = mu_quaternionic(gc);
  MomentValue ad = gauge_act_moment(g, mq);
  double dq = std::sqrt((mq_g.mi - ad.mi).squaredNorm() +
                        (mq_g.mj - ad.mj).squaredNorm() +
                        (mq_g.mk - ad.mk).squaredNorm());

  ComplexMomentValue mc = mu_complex(c);
  ComplexMomentValue mc_g = mu_complex(gc);
  Matrix gh = g.adjoint();
  double dc = std::sqrt(
      (mc_g.real_part - g * mc.real_part * gh).squaredNorm() +
      (mc_g.complex_part - g * mc.complex_part * gh).squaredNorm());

  return std::max(dq, dc);
}

double chart_agreement_defect(const ADHMConfig& c) {
  MomentValue a = mu_quaternionic(c);
  MomentValue b = chart_map(mu_complex(c));
  double d = 0;
  d = std::max(d, (a.mi - b.mi).cwiseAbs().maxCoeff());
  d = std::max(d, (a.mj - b.mj).cwiseAbs().maxCoeff());
  d = std::max(d, (a.mk - b.mk).cwiseAbs().maxCoeff());
  return d;
}

}  // namespace adhm
