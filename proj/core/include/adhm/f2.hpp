#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "adhm/linalg.hpp"

namespace adhm {

// Dense matrix over F2, bit-packed rows.  All arithmetic exact.
struct F2Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint64_t> bits;  // row-major, ceil(cols/64) words per row

  F2Matrix() = default;
  F2Matrix(int r, int c);
  static F2Matrix identity(int n);

  int words_per_row() const { return (cols + 63) / 64; }
  int get(int i, int j) const;
  void set(int i, int j, int v);
  void row_xor(int dst, int src);  // row dst += row src

  F2Matrix operator*(const F2Matrix& o) const;
  F2Matrix operator+(const F2Matrix& o) const;  // XOR
  bool operator==(const F2Matrix& o) const;
  bool is_zero() const;

  F2Matrix hstack(const F2Matrix& o) const;
  F2Matrix col_slice(int lo, int hi) const;
};

struct RrefResult {
  F2Matrix m;
  std::vector<int> pivot_cols;
};

RrefResult f2_rref(const F2Matrix& a);
int f2_rank(const F2Matrix& a);

// columns span {x : a x = 0}
F2Matrix f2_kernel_basis(const F2Matrix& a);

// maximal independent subset of the columns, in order
F2Matrix f2_independent_columns(const F2Matrix& a);

// columns of cand that extend the (independent) columns of base
F2Matrix f2_extend_basis(const F2Matrix& base, const F2Matrix& cand);

// particular solution X of A X = B (free variables zero), or nullopt
std::optional<F2Matrix> f2_solve(const F2Matrix& a, const F2Matrix& b);

json f2_matrix_to_json(const F2Matrix& m);
F2Matrix f2_matrix_from_json(const json& j, int rows, int cols);

// Chain complex over F2: differential[d] maps degree d to degree d-1.
struct F2Complex {
  std::map<int, int> dims;
  std::map<int, F2Matrix> differential;  // dims[d-1] x dims[d]

  int dim(int d) const;
  F2Matrix diff(int d) const;  // materialized (zero if absent)
  int min_degree() const;      // lowest degree with dim > 0 (0 if empty)
  int max_degree() const;
};

// shape agreement and exact d(d(x)) = 0; violations explain the degree
void validate_complex(const F2Complex& c);

std::map<int, int> homology_dims(const F2Complex& c);
long long euler_characteristic(const F2Complex& c);

json complex_to_json(const F2Complex& c);
F2Complex complex_from_json(const json& j);

// Degree-preserving chain map; missing blocks are zero.
struct ChainMap {
  F2Complex source;
  F2Complex target;
  std::map<int, F2Matrix> blocks;  // target.dims[d] x source.dims[d]

  F2Matrix block(int d) const;
};

void validate_chain_map(const ChainMap& f);

// cone_d = source_{d-1} (+) target_d, differential [[ds, 0], [f, dt]]
F2Complex mapping_cone(const ChainMap& f);

// homology bases: independent boundary columns plus completing cycle reps
struct HomologyData {
  std::map<int, int> dims;
  std::map<int, F2Matrix> image_basis;
  std::map<int, F2Matrix> reps;

  F2Matrix image(int d) const;
  F2Matrix rep(int d) const;
  int dim(int d) const;
};

HomologyData homology_data(const F2Complex& c);

// map induced on homology by a chain-level block (columns of src_reps are
// cycles; their images are expressed in the target homology basis)
F2Matrix induced_on_homology(const F2Matrix& block, const F2Matrix& src_reps,
                             const F2Matrix& tgt_image,
                             const F2Matrix& tgt_reps);

// the long exact sequence data of the cone triangle
//   H_d(src) -f*-> H_d(tgt) -i*-> H_d(cone) -p*-> H_{d-1}(src) -> ...
struct TriangleData {
  F2Complex cone;
  std::map<int, int> h_src, h_tgt, h_cone;
  std::map<int, F2Matrix> f_star;  // H_d(src)  -> H_d(tgt)
  std::map<int, F2Matrix> i_star;  // H_d(tgt)  -> H_d(cone)
  std::map<int, F2Matrix> p_star;  // H_d(cone) -> H_{d-1}(src)
  bool exact = false;
};

TriangleData triangle_data(const ChainMap& f);
bool exact_triangle_check(const ChainMap& f);

struct IndexedMap {
  int from = 0;
  int to = 0;
  ChainMap map;  // only .blocks is consulted; complexes come from `blocks`
};

// Direct sum of blocks with the maps as strictly-triangular differential
// components.  Each map must drop exactly one level of the (acyclic) map
// graph; block b is regraded by its level.  d(d(x)) = 0 is verified on the
// result and violations are rejected naming the offending degree.
F2Complex assemble_cma(const std::vector<F2Complex>& blocks,
                       const std::vector<IndexedMap>& maps);

// random instances for property tests and demos ------------------------------

// spheres and disks in degrees [min_deg, max_deg], basis scrambled by
// random invertible changes of basis; total dimension <= max_total_dim
F2Complex random_complex(int min_deg, int max_deg, int max_total_dim,
                         RandomStream& rs);

// uniform sample from the F2 vector space of chain maps source -> target
ChainMap random_chain_map(const F2Complex& source, const F2Complex& target,
                          RandomStream& rs);

// Dehn slope combinatorics ----------------------------------------------------

struct Slope {
  long long p = 0;
  long long q = 0;
};

bool slope_valid(const Slope& s);  // coprime, not (0,0)

// q_m p_n - p_m q_n (antisymmetric; fixed so the standard triple
// (0,1), (-1,0), (1,-1) has all cyclic pairings -1)
long long slope_pairing_raw(long long pm, long long qm, long long pn,
                            long long qn);
long long slope_pairing(const Slope& m, const Slope& n);

bool is_surgery_triad(const Slope& m1, const Slope& m2, const Slope& m3);

}  // namespace adhm
