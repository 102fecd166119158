#include "adhm/strata.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adhm {

bool partition_valid(const Partition& p) {
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0) return false;
    if (i > 0 && p[i] > p[i - 1]) return false;
  }
  return true;
}

int partition_sum(const Partition& p) {
  int s = 0;
  for (int x : p) s += x;
  return s;
}

namespace {

void enumerate_rec(int remaining, int cap, Partition& cur,
                   std::vector<Partition>& out) {
  if (remaining == 0) {
    out.push_back(cur);
    return;
  }
  for (int part = std::min(cap, remaining); part >= 1; --part) {
    cur.push_back(part);
    enumerate_rec(remaining - part, part, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<Partition> enumerate_partitions(int k) {
  if (k < 1 || k > 20)
    throw std::invalid_argument("enumerate_partitions: k out of range [1,20]");
  std::vector<Partition> out;
  Partition cur;
  enumerate_rec(k, k, cur, out);
  return out;
}

PartitionStats partition_stats(const Partition& p) {
  if (!partition_valid(p))
    throw std::invalid_argument("partition_stats: not a partition");
  PartitionStats st;
  st.length = static_cast<int>(p.size());
  for (int x : p) st.dim_t += x * x;
  // |G_lambda|: product over distinct part values of multiplicity!
  size_t i = 0;
  while (i < p.size()) {
    size_t j = i;
    while (j < p.size() && p[j] == p[i]) ++j;
    for (size_t m = 2; m <= j - i; ++m)
      st.order_g *= static_cast<long long>(m);
    i = j;
  }
  st.stratum_dim = 4 * st.length;
  return st;
}

namespace {

// real basis of u(k): i E_mm; (E_mn - E_nm), i(E_mn + E_nm) for m < n
std::vector<Matrix> u_k_basis(int k) {
  std::vector<Matrix> basis;
  basis.reserve(static_cast<size_t>(k) * static_cast<size_t>(k));
  const Cx iu(0, 1);
  for (int m = 0; m < k; ++m) {
    Matrix e = Matrix::Zero(k, k);
    e(m, m) = iu;
    basis.push_back(e);
  }
  for (int m = 0; m < k; ++m)
    for (int n = m + 1; n < k; ++n) {
      Matrix e = Matrix::Zero(k, k);
      e(m, n) = 1;
      e(n, m) = -1;
      basis.push_back(e);
      Matrix f = Matrix::Zero(k, k);
      f(m, n) = iu;
      f(n, m) = iu;
      basis.push_back(f);
    }
  return basis;
}

// columns: stacked real coordinates of [basis_b, xi_a] over a = 0..3
Eigen::MatrixXd ad_xi_matrix(const XiQuaternionic& xi,
                             const std::vector<Matrix>& basis) {
  const int k = static_cast<int>(xi.x0.rows());
  const int nb = static_cast<int>(basis.size());
  Eigen::MatrixXd m(8 * k * k, nb);
  for (int b = 0; b < nb; ++b) {
    int row = 0;
    for (int a = 0; a < 4; ++a) {
      Matrix c = commutator(basis[static_cast<size_t>(b)], xi.comp(a));
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          m(row++, b) = c(i, j).real();
          m(row++, b) = c(i, j).imag();
        }
    }
  }
  return m;
}

// orthonormal (Frobenius) basis of the commutant of xi inside u(k)
std::vector<Matrix> commutant_basis(const XiQuaternionic& xi) {
  const int k = static_cast<int>(xi.x0.rows());
  auto basis = u_k_basis(k);
  Eigen::MatrixXd m = ad_xi_matrix(xi, basis);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // rank cutoff against the natural scale of ad_xi (singular values are
  // linear in xi); sv(0) alone collapses to rounding noise when xi is
  // block-scalar and ad_xi vanishes identically
  const double scale =
      std::max(sv.size() > 0 ? sv(0) : 0.0, std::sqrt(xi.norm2()));
  const double cutoff = 1e-8 * scale;
  const int nb = static_cast<int>(basis.size());
  std::vector<Matrix> null_dirs;
  for (int c = 0; c < nb; ++c) {
    const bool in_null = c >= sv.size() || sv(c) <= cutoff;
    if (!in_null) continue;
    Matrix e = Matrix::Zero(k, k);
    for (int b = 0; b < nb; ++b)
      e += svd.matrixV()(b, c) * basis[static_cast<size_t>(b)];
    null_dirs.push_back(e);
  }
  // the u(k) basis is orthogonal but not orthonormal (off-diagonal
  // generators have squared norm 2); re-orthonormalize in Frobenius metric
  std::vector<Matrix> ortho;
  for (auto& e : null_dirs) {
    Matrix r = e;
    for (const auto& q : ortho) {
      Cx coef = (q.adjoint() * r).trace();
      r -= coef.real() * q;  // real-linear span; imaginary part is noise
    }
    double n = fnorm(r);
    if (n > 1e-12) ortho.push_back(r / n);
  }
  return ortho;
}

}  // namespace

int stabilizer_dimension(const XiQuaternionic& xi) {
  const int k = static_cast<int>(xi.x0.rows());
  auto basis = u_k_basis(k);
  Eigen::MatrixXd m = ad_xi_matrix(xi, basis);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  const double scale =
      std::max(sv.size() > 0 ? sv(0) : 0.0, std::sqrt(xi.norm2()));
  if (scale == 0.0) return k * k;
  const double cutoff = 1e-8 * scale;
  int dim = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) <= cutoff) ++dim;
  dim += k * k - static_cast<int>(sv.size());
  return dim;
}

bool commutant_membership(const XiQuaternionic& xi0, const XiQuaternionic& xi1,
                          double tol, double* projection_residual) {
  const double scale =
      std::max(1.0, std::sqrt(xi0.norm2()) * std::sqrt(xi1.norm2()));
  double max_cross = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      max_cross =
          std::max(max_cross, fnorm(commutator(xi0.comp(a), xi1.comp(b))));
  if (max_cross > tol * scale)
    throw std::invalid_argument(
        "commutant_membership: [xi0 ^ xi1] != 0, max cross-commutator " +
        std::to_string(max_cross));

  auto ortho = commutant_basis(xi0);
  double worst = 0;
  for (int a = 0; a < 4; ++a) {
    Matrix r = xi1.comp(a);
    for (const auto& q : ortho) {
      Cx coef = (q.adjoint() * r).trace();
      r -= coef.real() * q;
    }
    worst = std::max(worst, fnorm(r));
  }
  if (projection_residual) *projection_residual = worst;
  return worst <= tol * std::max(1.0, std::sqrt(xi1.norm2()));
}

namespace {

struct RawValue {
  std::array<double, 4> x{};
  int multiplicity = 1;
};

// Hermitian restriction of -i xi_a to the subspace spanned by q's columns
Matrix restricted(const XiQuaternionic& xi, const Matrix& q, int a) {
  Matrix m = q.adjoint() * (Cx(0, -1) * xi.comp(a)) * q;
  return Cx(0.5, 0) * (m + Matrix(m.adjoint()));
}

// index ranges of ascending eigenvalues separated by gaps > gap_tol
std::vector<std::pair<int, int>> eigen_clusters(const Eigen::VectorXd& ev,
                                                double gap_tol) {
  std::vector<std::pair<int, int>> cl;
  int start = 0;
  for (int i = 1; i < ev.size(); ++i) {
    if (ev(i) - ev(i - 1) > gap_tol) {
      cl.emplace_back(start, i);
      start = i;
    }
  }
  cl.emplace_back(start, static_cast<int>(ev.size()));
  return cl;
}

void spectrum_rec(const XiQuaternionic& xi, const Matrix& q, double gap_tol,
                  double scalar_tol, RandomStream& rng,
                  std::vector<RawValue>& out) {
  const int m = static_cast<int>(q.cols());
  if (m == 0) return;
  std::array<Matrix, 4> rest;
  for (int a = 0; a < 4; ++a)
    rest[static_cast<size_t>(a)] = restricted(xi, q, a);

  if (m == 1) {
    RawValue v;
    for (int a = 0; a < 4; ++a)
      v.x[static_cast<size_t>(a)] = rest[static_cast<size_t>(a)](0, 0).real();
    out.push_back(v);
    return;
  }

  // component cascade, then random recombinations
  constexpr int kMaxRandom = 8;
  for (int attempt = 0; attempt < 4 + kMaxRandom; ++attempt) {
    Matrix probe;
    if (attempt < 4) {
      probe = rest[static_cast<size_t>(attempt)];
    } else {
      probe = Matrix::Zero(m, m);
      for (int a = 0; a < 4; ++a)
        probe += Cx(rng.normal(), 0) * rest[static_cast<size_t>(a)];
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(probe);
    auto clusters = eigen_clusters(es.eigenvalues(), gap_tol);
    if (clusters.size() <= 1) continue;
    for (auto [lo, hi] : clusters) {
      Matrix sub = q * es.eigenvectors().middleCols(lo, hi - lo);
      spectrum_rec(xi, sub, gap_tol, scalar_tol, rng, out);
    }
    return;
  }

  // nothing splits: certify the block is scalar (genuine multiplicity)
  RawValue v;
  v.multiplicity = m;
  double defect = 0;
  for (int a = 0; a < 4; ++a) {
    const Matrix& r = rest[static_cast<size_t>(a)];
    double mean = r.trace().real() / m;
    v.x[static_cast<size_t>(a)] = mean;
    defect = std::max(defect, fnorm(r - mean * Matrix::Identity(m, m)));
  }
  if (defect > scalar_tol)
    throw std::runtime_error(
        "joint_spectrum: subspace of dim " + std::to_string(m) +
        " neither splits nor is scalar (defect " + std::to_string(defect) +
        "): failed to separate spectrum");
  out.push_back(v);
}

double dist4(const std::array<double, 4>& a, const std::array<double, 4>& b) {
  double s = 0;
  for (size_t i = 0; i < 4; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

SpectrumPoint joint_spectrum(const XiQuaternionic& xi, double tol) {
  const int k = static_cast<int>(xi.x0.rows());
  if (!xi_components_antihermitian(xi, 1e-8))
    throw std::invalid_argument("joint_spectrum: components not in u(k)");
  MomentValue mu = mu_of_xi(xi);
  if (mu.norm() > tol)
    throw std::invalid_argument("joint_spectrum: ||mu(xi)|| = " +
                                std::to_string(mu.norm()) + " exceeds tol " +
                                std::to_string(tol));

  std::vector<RawValue> raw;
  RandomStream rng(0x5eedULL);  // fixed: deterministic output per input
  spectrum_rec(xi, Matrix::Identity(k, k), tol, 10.0 * k * std::max(tol, 1e-14),
               rng, raw);

  // single-linkage merge within tol
  const int n = static_cast<int>(raw.size());
  std::vector<int> parent(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) parent[static_cast<size_t>(i)] = i;
  auto find = [&](int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] =
          parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (dist4(raw[static_cast<size_t>(i)].x, raw[static_cast<size_t>(j)].x) <=
          tol)
        parent[static_cast<size_t>(find(i))] = find(j);

  std::vector<RawValue> merged;
  std::vector<int> slot(static_cast<size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    int r = find(i);
    const RawValue& cur = raw[static_cast<size_t>(i)];
    if (slot[static_cast<size_t>(r)] < 0) {
      slot[static_cast<size_t>(r)] = static_cast<int>(merged.size());
      merged.push_back(cur);
    } else {
      RawValue& v = merged[static_cast<size_t>(slot[static_cast<size_t>(r)])];
      for (size_t a = 0; a < 4; ++a)
        v.x[a] = (v.x[a] * v.multiplicity + cur.x[a] * cur.multiplicity) /
                 (v.multiplicity + cur.multiplicity);
      v.multiplicity += cur.multiplicity;
    }
  }

  SpectrumPoint sp;
  sp.cluster_tolerance = tol;
  for (const auto& v : merged) {
    sp.partition.push_back(v.multiplicity);
    for (int c = 0; c < v.multiplicity; ++c) sp.values.push_back(v.x);
  }
  std::sort(sp.values.begin(), sp.values.end());
  std::sort(sp.partition.begin(), sp.partition.end(), std::greater<int>());
  return sp;
}

XiQuaternionic xi_with_spectrum(const Partition& p,
                                const std::vector<std::array<double, 4>>& vals,
                                const Matrix& u) {
  if (!partition_valid(p))
    throw std::invalid_argument("xi_with_spectrum: bad partition");
  if (vals.size() != p.size())
    throw std::invalid_argument("xi_with_spectrum: values/parts mismatch");
  const int k = partition_sum(p);
  if (u.rows() != k || u.cols() != k)
    throw std::invalid_argument("xi_with_spectrum: unitary size mismatch");
  XiQuaternionic xi;
  for (int a = 0; a < 4; ++a) {
    Matrix d = Matrix::Zero(k, k);
    int pos = 0;
    for (size_t n = 0; n < p.size(); ++n) {
      for (int i = 0; i < p[n]; ++i)
        d(pos + i, pos + i) = Cx(0, vals[n][static_cast<size_t>(a)]);
      pos += p[n];
    }
    xi.comp(a) = u * d * u.adjoint();
  }
  return xi;
}

namespace {

// approximate common eigenvector of two nearly commuting matrices
Vector common_eigenvector(const Matrix& a, const Matrix& b) {
  const int m = static_cast<int>(a.rows());
  if (m == 1) return Vector::Ones(1);
  Eigen::ComplexEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("simultaneous_triangularize: eigensolver failed");
  const auto& ev = es.eigenvalues();
  const double scale = std::max(1.0, a.norm());
  // eigenvalue cluster around ev(0); its eigenspace is b-invariant
  Cx lam = ev(0);
  std::vector<int> idx;
  for (int i = 0; i < m; ++i)
    if (std::abs(ev(i) - lam) <= 1e-7 * scale) idx.push_back(i);
  Matrix p(m, static_cast<int>(idx.size()));
  for (size_t i = 0; i < idx.size(); ++i)
    p.col(static_cast<int>(i)) = es.eigenvectors().col(idx[i]);
  Eigen::HouseholderQR<Matrix> qr(p);
  Matrix q = qr.householderQ() *
             Matrix::Identity(m, static_cast<int>(idx.size()));
  if (idx.size() == 1) return q.col(0);
  Matrix br = q.adjoint() * b * q;
  Eigen::ComplexEigenSolver<Matrix> es2(br);
  if (es2.info() != Eigen::Success)
    throw std::runtime_error("simultaneous_triangularize: eigensolver failed");
  return q * es2.eigenvectors().col(0);
}

// unitary whose first column is x/||x||
Matrix unitary_from_first_column(const Vector& x) {
  const int m = static_cast<int>(x.size());
  Matrix seed = Matrix::Identity(m, m);
  seed.col(0) = x / x.norm();
  Eigen::HouseholderQR<Matrix> qr(seed);
  Matrix q = qr.householderQ();
  // undo the phase QR may put on the first column
  Cx phase = (q.col(0).adjoint() * seed.col(0))(0, 0);
  q.col(0) *= phase;
  return q;
}

}  // namespace

double strict_lower_norm(const Matrix& m) {
  double s = 0;
  for (int j = 0; j < m.cols(); ++j)
    for (int i = j + 1; i < m.rows(); ++i) s += std::norm(m(i, j));
  return std::sqrt(s);
}

Triangularization simultaneous_triangularize(const Matrix& A,
                                             const Matrix& B) {
  const int k = static_cast<int>(A.rows());
  if (A.cols() != k || B.rows() != k || B.cols() != k)
    throw std::invalid_argument("simultaneous_triangularize: shape mismatch");
  const double scale = std::max({1.0, A.norm(), B.norm()});
  const double comm = fnorm(commutator(A, B));
  if (comm > kStrataTol * scale * scale)
    throw std::invalid_argument(
        "simultaneous_triangularize: ||[A,B]|| = " + std::to_string(comm) +
        " too large");

  Triangularization tr;
  tr.u = Matrix::Identity(k, k);
  Matrix a = A, b = B;
  for (int s = 0; s < k - 1; ++s) {
    const int m = k - s;
    Vector x = common_eigenvector(a.bottomRightCorner(m, m),
                                  b.bottomRightCorner(m, m));
    Matrix step = Matrix::Identity(k, k);
    step.bottomRightCorner(m, m) = unitary_from_first_column(x);
    tr.u = tr.u * step;
    a = step.adjoint() * a * step;
    b = step.adjoint() * b * step;
  }
  tr.ta = a;
  tr.tb = b;
  return tr;
}

bool check_simdiag(const Matrix& A, const Matrix& B, double tol) {
  const int k = static_cast<int>(A.rows());
  if (A.cols() != k || B.rows() != k || B.cols() != k)
    throw std::invalid_argument("check_simdiag: shape mismatch");
  const double scale = std::max({1.0, A.norm(), B.norm()});
  const double comm = fnorm(commutator(A, B));
  if (comm > tol * scale * scale)
    throw std::invalid_argument("check_simdiag: ||[A,B]|| = " +
                                std::to_string(comm) + " violates tolerance");
  Matrix nsd = commutator(A, Matrix(A.adjoint())) +
               commutator(B, Matrix(B.adjoint()));
  Eigen::SelfAdjointEigenSolver<Matrix> es(Cx(0.5, 0) *
                                           (nsd + Matrix(nsd.adjoint())));
  const double lam_max = es.eigenvalues().maxCoeff();
  if (lam_max > tol * scale * scale)
    throw std::invalid_argument(
        "check_simdiag: [A,A^+]+[B,B^+] has positive eigenvalue " +
        std::to_string(lam_max));

  // the sum is traceless, so near-NSD forces all its eigenvalues small;
  // with [A,B]=0 each summand must then vanish
  const double assert_tol = 100.0 * k * tol * scale * scale;
  const double na = fnorm(commutator(A, Matrix(A.adjoint())));
  const double nb = fnorm(commutator(B, Matrix(B.adjoint())));
  if (na > assert_tol || nb > assert_tol)
    throw std::runtime_error(
        "check_simdiag: conclusion failed, ||[A,A^+]|| = " +
        std::to_string(na) + ", ||[B,B^+]|| = " + std::to_string(nb));
  return true;
}

Matrix krylov_invariant_subspace(const Matrix& A, const Matrix& B,
                                 const Vector& w, double rank_tol) {
  const int k = static_cast<int>(A.rows());
  std::vector<Vector> basis;
  std::vector<Vector> queue;
  queue.push_back(w);
  size_t head = 0;
  while (head < queue.size() && static_cast<int>(basis.size()) < k) {
    Vector cand = queue[head++];
    const double cn = cand.norm();
    if (cn < rank_tol) continue;
    Vector r = cand;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) r -= (q.adjoint() * r)(0, 0) * q;
    if (r.norm() <= rank_tol * cn) continue;
    r /= r.norm();
    basis.push_back(r);
    queue.push_back(A * r);
    queue.push_back(B * r);
  }
  Matrix out(k, static_cast<int>(basis.size()));
  for (size_t i = 0; i < basis.size(); ++i)
    out.col(static_cast<int>(i)) = basis[i];
  return out;
}

PerpCheck check_v_perp_V1(const Matrix& A, const Matrix& B, const Vector& v,
                          const Vector& w, double tol) {
  PerpCheck out;
  Matrix lhs = w * v.adjoint();
  out.precondition_residual = fnorm(lhs - commutator(A, B));
  const double scale =
      std::max({1.0, A.norm() * B.norm(), w.norm() * v.norm()});
  if (out.precondition_residual > tol * scale)
    throw std::invalid_argument("check_v_perp_V1: w v^+ != [A,B], residual " +
                                std::to_string(out.precondition_residual));
  Matrix basis = krylov_invariant_subspace(A, B, w);
  out.subspace_dim = static_cast<int>(basis.cols());
  for (int c = 0; c < basis.cols(); ++c)
    out.max_overlap =
        std::max(out.max_overlap, std::abs((basis.col(c).adjoint() * v)(0, 0)));
  out.ok = out.max_overlap <= tol * std::max(1.0, v.norm());
  return out;
}

}  // namespace adhm
