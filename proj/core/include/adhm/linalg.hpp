#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

namespace adhm {

using Cx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Deterministic RNG. One master seed per run; sub-streams are derived with a
// fixed splittable scheme so adding a consumer never perturbs the others.

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline uint64_t sub_seed(uint64_t master, uint64_t stream) {
  uint64_t s = master ^ (0xD1B54A32D192ED03ull * (stream + 1));
  return splitmix64(s);
}

class RandomStream {
 public:
  explicit RandomStream(uint64_t seed) : state_(seed) {}

  uint64_t u64() { return splitmix64(state_); }

  // uniform in (0,1]
  double uniform() {
    return (static_cast<double>(u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  Cx cnormal() { return Cx(normal(), normal()) / std::sqrt(2.0); }

  Matrix gaussian_matrix(int rows, int cols) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = cnormal();
    return m;
  }

 private:
  uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// ---------------------------------------------------------------------------
// Basic matrix helpers.

inline Matrix commutator(const Matrix& x, const Matrix& y) {
  return x * y - y * x;
}

inline double fnorm2(const Matrix& x) { return x.squaredNorm(); }
inline double fnorm(const Matrix& x) { return x.norm(); }

inline bool is_hermitian(const Matrix& x, double tol) {
  return (x - x.adjoint()).norm() <= tol * std::max(1.0, x.norm());
}

inline bool is_antihermitian(const Matrix& x, double tol) {
  return (x + x.adjoint()).norm() <= tol * std::max(1.0, x.norm());
}

inline bool is_unitary(const Matrix& g, double tol) {
  Matrix d = g.adjoint() * g - Matrix::Identity(g.rows(), g.cols());
  return d.norm() <= tol * std::sqrt(static_cast<double>(g.rows()));
}

// eigenvalues ascending, columns of .vectors orthonormal
struct HermitianEigen {
  Eigen::VectorXd values;
  Matrix vectors;
};

inline HermitianEigen eigen_hermitian(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigen_hermitian: solver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

// Haar-distributed unitary: QR of a Ginibre sample with phase fix.
inline Matrix random_unitary(int k, RandomStream& rs) {
  Matrix g = rs.gaussian_matrix(k, k);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < k; ++i) {
    Cx d = r(i, i);
    double a = std::abs(d);
    q.col(i) *= (a > 0) ? d / a : Cx(1, 0);
  }
  return q;
}

// ---------------------------------------------------------------------------
// Quaternionic types.  H (x) C^k is stored as a pair (a, b) ~ a + j b with
// a, b in C^k.  The fixed Clifford realization on pairs:
//   i.(a,b) = (ia, -ib),  j.(a,b) = (-b, a),  k.(a,b) = (-ib, -ia),
// so gamma(i)gamma(j) = gamma(k) and the gamma's are orthogonal
// anti-selfadjoint complex structures for <(a,b),(a',b')> = Re(a^+a' + b^+b').

struct QuaternionicVector {
  Vector a, b;

  int dim() const { return static_cast<int>(a.size()); }
  double norm2() const { return a.squaredNorm() + b.squaredNorm(); }
};

enum class ImUnit { I, J, K };

inline QuaternionicVector clifford_apply(ImUnit u, const QuaternionicVector& s) {
  const Cx im(0, 1);
  switch (u) {
    case ImUnit::I: return {im * s.a, -im * s.b};
    case ImUnit::J: return {-s.b, s.a};
    case ImUnit::K: return {-im * s.b, -im * s.a};
  }
  throw std::logic_error("clifford_apply: bad unit");
}

// xi = xi0 + i xi1 + j xi2 + k xi3 with each component in u(k).
struct XiQuaternionic {
  Matrix x0, x1, x2, x3;

  int k() const { return static_cast<int>(x0.rows()); }
  double norm2() const {
    return x0.squaredNorm() + x1.squaredNorm() + x2.squaredNorm() +
           x3.squaredNorm();
  }
  const Matrix& comp(int alpha) const {
    switch (alpha) {
      case 0: return x0;
      case 1: return x1;
      case 2: return x2;
      default: return x3;
    }
  }
  Matrix& comp(int alpha) {
    switch (alpha) {
      case 0: return x0;
      case 1: return x1;
      case 2: return x2;
      default: return x3;
    }
  }
};

inline bool xi_components_antihermitian(const XiQuaternionic& xi, double tol) {
  for (int a = 0; a < 4; ++a)
    if (!is_antihermitian(xi.comp(a), tol)) return false;
  return true;
}

// random anti-Hermitian matrix, entries O(1)
inline Matrix random_antihermitian(int k, RandomStream& rs) {
  Matrix g = rs.gaussian_matrix(k, k);
  return (g - g.adjoint()) / 2.0;
}

inline XiQuaternionic random_xi(int k, RandomStream& rs) {
  return {random_antihermitian(k, rs), random_antihermitian(k, rs),
          random_antihermitian(k, rs), random_antihermitian(k, rs)};
}

// ---------------------------------------------------------------------------
// JSON: {"rows": r, "cols": c, "entries": [[re, im], ...]} row-major.

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);

}  // namespace adhm
