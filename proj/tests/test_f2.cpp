#include <doctest.h>

#include <set>

#include "adhm/f2.hpp"

using namespace adhm;

TEST_SUITE_BEGIN("f2");

namespace {

F2Matrix random_f2(int rows, int cols, RandomStream& rs) {
  F2Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m.set(i, j, rs.u64() & 1);
  return m;
}

// independent rank oracle: the row space of an r x c matrix (c <= 64) has
// exactly 2^rank elements; enumerate it by closing under XOR
int span_rank(const F2Matrix& m) {
  std::set<uint64_t> span{0};
  for (int i = 0; i < m.rows; ++i) {
    uint64_t row = 0;
    for (int j = 0; j < m.cols; ++j)
      row |= static_cast<uint64_t>(m.get(i, j)) << j;
    std::set<uint64_t> next = span;
    for (uint64_t x : span) next.insert(x ^ row);
    span = next;
  }
  int r = 0;
  while ((size_t{1} << r) < span.size()) ++r;
  REQUIRE((size_t{1} << r) == span.size());
  return r;
}

F2Complex interval_complex() {
  // two vertices, one edge joining them
  F2Complex c;
  c.dims[0] = 2;
  c.dims[1] = 1;
  F2Matrix d(2, 1);
  d.set(0, 0, 1);
  d.set(1, 0, 1);
  c.differential[1] = d;
  return c;
}

ChainMap identity_map(const F2Complex& c) {
  ChainMap f;
  f.source = c;
  f.target = c;
  for (const auto& [d, n] : c.dims)
    if (n > 0) f.blocks[d] = F2Matrix::identity(n);
  return f;
}

}  // namespace

TEST_CASE("rank agrees with the row-span cardinality oracle") {
  RandomStream rs(191);
  for (int trial = 0; trial < 100; ++trial) {
    int rows = 1 + static_cast<int>(rs.u64() % 8);
    int cols = 1 + static_cast<int>(rs.u64() % 8);
    F2Matrix m = random_f2(rows, cols, rs);
    CHECK(f2_rank(m) == span_rank(m));
  }
  CHECK(f2_rank(F2Matrix::identity(64)) == 64);
}

TEST_CASE("rref has staircase shape and cleared pivot columns") {
  RandomStream rs(193);
  F2Matrix m = random_f2(6, 9, rs);
  RrefResult r = f2_rref(m);
  REQUIRE(static_cast<int>(r.pivot_cols.size()) == f2_rank(m));
  for (size_t i = 0; i + 1 < r.pivot_cols.size(); ++i)
    CHECK(r.pivot_cols[i] < r.pivot_cols[i + 1]);
  for (size_t i = 0; i < r.pivot_cols.size(); ++i)
    for (int row = 0; row < r.m.rows; ++row)
      CHECK(r.m.get(row, r.pivot_cols[i]) ==
            (row == static_cast<int>(i) ? 1 : 0));
}

TEST_CASE("kernel basis spans the null space") {
  RandomStream rs(197);
  for (int trial = 0; trial < 50; ++trial) {
    F2Matrix m = random_f2(1 + static_cast<int>(rs.u64() % 7),
                           1 + static_cast<int>(rs.u64() % 7), rs);
    F2Matrix k = f2_kernel_basis(m);
    CHECK(k.rows == m.cols);
    CHECK(k.cols == m.cols - f2_rank(m));
    if (k.cols > 0) {
      CHECK((m * k).is_zero());
      CHECK(f2_rank(k) == k.cols);
    }
  }
}

TEST_CASE("solve finds a preimage exactly when one exists") {
  RandomStream rs(199);
  for (int trial = 0; trial < 50; ++trial) {
    F2Matrix a = random_f2(5, 7, rs);
    F2Matrix x = random_f2(7, 2, rs);
    F2Matrix b = a * x;
    auto sol = f2_solve(a, b);
    REQUIRE(sol.has_value());
    CHECK(a * *sol == b);
  }
  // unsolvable: zero map cannot hit a nonzero target
  F2Matrix zero(2, 2);
  CHECK_FALSE(f2_solve(zero, F2Matrix::identity(2)).has_value());
}

TEST_CASE("hstack and col_slice invert each other") {
  RandomStream rs(211);
  F2Matrix a = random_f2(4, 3, rs), b = random_f2(4, 5, rs);
  F2Matrix joined = a.hstack(b);
  CHECK(joined.col_slice(0, 3) == a);
  CHECK(joined.col_slice(3, 8) == b);
}

TEST_CASE("homology of small fixed complexes") {
  // single point
  F2Complex pt;
  pt.dims[0] = 1;
  auto h = homology_dims(pt);
  CHECK(h[0] == 1);
  CHECK(euler_characteristic(pt) == 1);

  // interval: contractible
  F2Complex iv = interval_complex();
  validate_complex(iv);
  h = homology_dims(iv);
  CHECK(h[0] == 1);
  CHECK(h[1] == 0);
  CHECK(euler_characteristic(iv) == 1);

  // torus cells with zero differentials: 1, 2, 1
  F2Complex torus;
  torus.dims[0] = 1;
  torus.dims[1] = 2;
  torus.dims[2] = 1;
  h = homology_dims(torus);
  CHECK(h[0] == 1);
  CHECK(h[1] == 2);
  CHECK(h[2] == 1);
  CHECK(euler_characteristic(torus) == 0);
}

TEST_CASE("complex validation rejects d^2 != 0") {
  F2Complex bad;
  bad.dims[0] = 1;
  bad.dims[1] = 1;
  bad.dims[2] = 1;
  F2Matrix one(1, 1);
  one.set(0, 0, 1);
  bad.differential[1] = one;
  bad.differential[2] = one;
  CHECK_THROWS_AS(validate_complex(bad), std::invalid_argument);
}

TEST_CASE("euler characteristic equals the alternating homology sum") {
  RandomStream rs(223);
  for (int trial = 0; trial < 30; ++trial) {
    F2Complex c = random_complex(-1, 3, 8, rs);
    long long chi = 0;
    for (const auto& [d, hd] : homology_dims(c))
      chi += (d % 2 == 0 ? 1 : -1) * hd;
    CHECK(chi == euler_characteristic(c));
  }
}

TEST_CASE("cone of the identity is acyclic") {
  RandomStream rs(227);
  F2Complex c = random_complex(0, 3, 10, rs);
  F2Complex cone = mapping_cone(identity_map(c));
  validate_complex(cone);
  for (const auto& [d, hd] : homology_dims(cone)) CHECK(hd == 0);
}

TEST_CASE("cone dimensions stack source and target") {
  RandomStream rs(229);
  F2Complex src = random_complex(-1, 2, 8, rs);
  F2Complex tgt = random_complex(-1, 2, 8, rs);
  ChainMap f = random_chain_map(src, tgt, rs);
  F2Complex cone = mapping_cone(f);
  for (int d = -2; d <= 4; ++d)
    CHECK(cone.dim(d) == src.dim(d - 1) + tgt.dim(d));
}

TEST_CASE("random triangles are exact with additive euler characteristic") {
  RandomStream rs(233);
  for (int trial = 0; trial < 60; ++trial) {
    F2Complex src = random_complex(-1, 3, 6, rs);
    F2Complex tgt = random_complex(-1, 3, 6, rs);
    ChainMap f = random_chain_map(src, tgt, rs);
    TriangleData t = triangle_data(f);
    CHECK(t.exact);
    CHECK(exact_triangle_check(f));
    CHECK(euler_characteristic(t.cone) ==
          euler_characteristic(tgt) - euler_characteristic(src));
  }
}

TEST_CASE("assembled complex reproduces the mapping cone") {
  RandomStream rs(239);
  F2Complex src = random_complex(0, 2, 6, rs);
  F2Complex tgt = random_complex(0, 2, 6, rs);
  ChainMap f = random_chain_map(src, tgt, rs);

  // one block, no maps: the block itself
  F2Complex single = assemble_cma({src}, {});
  CHECK(homology_dims(single) == homology_dims(src));

  // two blocks, one map: the cone up to regrading
  IndexedMap im;
  im.from = 0;
  im.to = 1;
  im.map = f;
  F2Complex total = assemble_cma({src, tgt}, {im});
  auto ht = homology_dims(total);
  auto hc = homology_dims(mapping_cone(f));
  for (const auto& [d, n] : hc)
    CHECK(ht[d] == n);
}

TEST_CASE("assembly with two maps into a shared target") {
  RandomStream rs(241);
  F2Complex a = random_complex(0, 2, 5, rs);
  F2Complex b = random_complex(0, 2, 5, rs);
  F2Complex c = random_complex(0, 2, 5, rs);
  IndexedMap f, g;
  f.from = 0;
  f.to = 2;
  f.map = random_chain_map(a, c, rs);
  g.from = 1;
  g.to = 2;
  g.map = random_chain_map(b, c, rs);
  F2Complex total = assemble_cma({a, b, c}, {f, g});
  validate_complex(total);
  long long chi = euler_characteristic(total);
  CHECK(chi == euler_characteristic(c) - euler_characteristic(a) -
                   euler_characteristic(b));
}

TEST_CASE("assembly rejections") {
  RandomStream rs(251);
  F2Complex c;
  c.dims[0] = 1;

  // cycle in the map graph
  IndexedMap ab, ba;
  ab.from = 0;
  ab.to = 1;
  ab.map = identity_map(c);
  ba.from = 1;
  ba.to = 0;
  ba.map = identity_map(c);
  CHECK_THROWS_AS(assemble_cma({c, c}, {ab, ba}), std::invalid_argument);

  // index out of range
  IndexedMap oob = ab;
  oob.to = 5;
  CHECK_THROWS_AS(assemble_cma({c, c}, {oob}), std::invalid_argument);

  // a chord skipping a level cannot be strictly triangular with unit shifts
  IndexedMap bc, ac;
  bc.from = 1;
  bc.to = 2;
  bc.map = identity_map(c);
  ac.from = 0;
  ac.to = 2;
  ac.map = identity_map(c);
  CHECK_THROWS_AS(assemble_cma({c, c, c}, {ab, bc, ac}),
                  std::invalid_argument);

  // composable identities square to a nonzero differential
  CHECK_THROWS_AS(assemble_cma({c, c, c}, {ab, bc}), std::invalid_argument);
}

TEST_CASE("complex json round trip") {
  RandomStream rs(257);
  F2Complex c = random_complex(-1, 3, 9, rs);
  F2Complex back = complex_from_json(complex_to_json(c));
  CHECK(back.dims == c.dims);
  for (const auto& [d, m] : c.differential) CHECK(back.diff(d) == m);
  CHECK(homology_dims(back) == homology_dims(c));
}

TEST_CASE("slope validity and pairing") {
  CHECK(slope_valid({0, 1}));
  CHECK(slope_valid({-1, 0}));
  CHECK(slope_valid({1, -1}));
  CHECK_FALSE(slope_valid({0, 0}));
  CHECK_FALSE(slope_valid({2, 4}));

  Slope m1{0, 1}, m2{-1, 0}, m3{1, -1};
  CHECK(slope_pairing(m1, m2) == -1);
  CHECK(slope_pairing(m2, m3) == -1);
  CHECK(slope_pairing(m3, m1) == -1);
  CHECK(slope_pairing(m2, m1) == 1);  // antisymmetry
  CHECK(is_surgery_triad(m1, m2, m3));
  CHECK_FALSE(is_surgery_triad(m1, m2, {1, 0}));
}

TEST_SUITE_END();
