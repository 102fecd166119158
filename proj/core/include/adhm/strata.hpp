#pragma once

#include <array>

#include "adhm/moment.hpp"

namespace adhm {

// default tolerance for the relative precondition / membership checks below
inline constexpr double kStrataTol = 1e-8;

// Partition of k: non-increasing positive parts (unpadded; the padded
// convention's |lambda| = index of last nonzero part = our length).
using Partition = std::vector<int>;

bool partition_valid(const Partition& p);
int partition_sum(const Partition& p);

// all partitions of k, lexicographically decreasing; requires 1 <= k <= 20
std::vector<Partition> enumerate_partitions(int k);

struct PartitionStats {
  int length = 0;        // number of parts
  int dim_t = 0;         // dim T_lambda = sum lambda_n^2
  long long order_g = 1; // |G_lambda| = prod (multiplicity of each value)!
  int stratum_dim = 0;   // 4 * length
};

PartitionStats partition_stats(const Partition& p);

// real dimension of { eta in u(k) : [eta, xi_a] = 0 for all a }
int stabilizer_dimension(const XiQuaternionic& xi);

// pre: all cross-commutators [xi0_a, xi1_b] vanish within tol (relative);
// violations throw std::invalid_argument carrying the max commutator norm.
// true iff every component of xi1 lies in the commutant of xi0 (the Lie
// algebra of the stabilizer torus) within tol.
bool commutant_membership(const XiQuaternionic& xi0, const XiQuaternionic& xi1,
                          double tol = kStrataTol,
                          double* projection_residual = nullptr);

struct SpectrumPoint {
  // k quaternions (repeats included), sorted lexicographically
  std::vector<std::array<double, 4>> values;
  Partition partition;  // cluster multiplicities, non-increasing
  double cluster_tolerance = 0;
};

// Joint spectrum of the four components of xi: the k simultaneous
// approximate eigenvalues x with (xi_a)v = i x_a v on a common basis.
// pre: components anti-Hermitian, ||mu(xi)|| <= tol.  Eigenspaces are split
// by a cascade of the four components then up to 8 random recombinations;
// failure to separate throws.  Values are clustered (single linkage,
// radius tol) to extract the partition.
SpectrumPoint joint_spectrum(const XiQuaternionic& xi, double tol);

// block-scalar xi with the given partition and per-block values, conjugated
// by u; exact member of mu^{-1}(0)
XiQuaternionic xi_with_spectrum(const Partition& p,
                                const std::vector<std::array<double, 4>>& vals,
                                const Matrix& u);

struct Triangularization {
  Matrix u;   // unitary
  Matrix ta;  // u^+ A u
  Matrix tb;  // u^+ B u
};

// requires ||[A,B]|| <= kStrataTol * scale^2; strict lower triangles of the
// results vanish to 1e-9 relative
Triangularization simultaneous_triangularize(const Matrix& A, const Matrix& B);

double strict_lower_norm(const Matrix& m);

// pre: [A,B] = 0 and [A,A^+] + [B,B^+] negative semidefinite (within tol).
// Then both self-commutators must vanish; asserts this numerically and
// returns true.  Precondition violations throw std::invalid_argument.
bool check_simdiag(const Matrix& A, const Matrix& B, double tol = kStrataTol);

// smallest (A,B)-invariant subspace containing w; returns an orthonormal
// basis (k x m), built breadth-first with rank tolerance 1e-10
Matrix krylov_invariant_subspace(const Matrix& A, const Matrix& B,
                                 const Vector& w, double rank_tol = 1e-10);

struct PerpCheck {
  bool ok = false;
  double precondition_residual = 0;  // ||w v^+ - [A,B]||
  double max_overlap = 0;            // max_j |<v, basis_j>|
  int subspace_dim = 0;
};

// pre: w v^+ = [A,B] (within tol; violations throw); then v must be
// orthogonal to the smallest invariant subspace containing w
PerpCheck check_v_perp_V1(const Matrix& A, const Matrix& B, const Vector& v,
                          const Vector& w, double tol = kStrataTol);

}  // namespace adhm
