#pragma once

#include "adhm/linalg.hpp"

namespace adhm {

// Flat-space ADHM data for U(k) with r flavors, stored in the complex chart:
//   Psi = v + j w        (v, w : k x r)
//   xi  = A^+ + j B      (A, B : k x k)
// The quaternionic components of xi under this chart:
//   xi0 = (A^+ - A)/2              xi1 = -(i/2)(A + A^+)
//   xi2 = (B - B^+)/2              xi3 =  (i/2)(B + B^+)
// This identification is fixed once; every cross-check (zero locus,
// equivariance, norm ratio) is tested against it.
struct ADHMConfig {
  int r = 1;
  int k = 1;
  Matrix v, w;  // k x r
  Matrix A, B;  // k x k

  double norm2() const {
    return v.squaredNorm() + w.squaredNorm() + A.squaredNorm() +
           B.squaredNorm();
  }
  double norm() const { return std::sqrt(norm2()); }
};

bool config_shapes_ok(const ADHMConfig& c);

ADHMConfig random_config(int r, int k, RandomStream& rs);

// g in U(k): v -> g v, w -> g w, A -> g A g^+, B -> g B g^+.
ADHMConfig gauge_act(const Matrix& g, const ADHMConfig& c);

// chart: (A,B) <-> quaternionic xi
XiQuaternionic xi_from_chart(const Matrix& A, const Matrix& B);
void chart_from_xi(const XiQuaternionic& xi, Matrix& A, Matrix& B);

XiQuaternionic xi_of(const ADHMConfig& c);

// Psi column c is the quaternionic vector (v.col(c), w.col(c)).
QuaternionicVector psi_column(const ADHMConfig& c, int col);

XiQuaternionic gauge_act_xi(const Matrix& g, const XiQuaternionic& xi);

json config_to_json(const ADHMConfig& c);
ADHMConfig config_from_json(const json& j);

}  // namespace adhm
