#include "adhm/f2.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

namespace adhm {

F2Matrix::F2Matrix(int r, int c) : rows(r), cols(c) {
  if (r < 0 || c < 0) throw std::invalid_argument("F2Matrix: negative shape");
  bits.assign(static_cast<size_t>(r) * static_cast<size_t>(words_per_row()),
              0ULL);
}

F2Matrix F2Matrix::identity(int n) {
  F2Matrix m(n, n);
  for (int i = 0; i < n; ++i) m.set(i, i, 1);
  return m;
}

int F2Matrix::get(int i, int j) const {
  const size_t w = static_cast<size_t>(i) * static_cast<size_t>(words_per_row()) +
                   static_cast<size_t>(j / 64);
  return static_cast<int>((bits[w] >> (j % 64)) & 1ULL);
}

void F2Matrix::set(int i, int j, int v) {
  const size_t w = static_cast<size_t>(i) * static_cast<size_t>(words_per_row()) +
                   static_cast<size_t>(j / 64);
  const std::uint64_t mask = 1ULL << (j % 64);
  if (v & 1)
    bits[w] |= mask;
  else
    bits[w] &= ~mask;
}

void F2Matrix::row_xor(int dst, int src) {
  const int wpr = words_per_row();
  std::uint64_t* d = bits.data() + static_cast<size_t>(dst) * wpr;
  const std::uint64_t* s = bits.data() + static_cast<size_t>(src) * wpr;
  for (int w = 0; w < wpr; ++w) d[w] ^= s[w];
}

F2Matrix F2Matrix::operator*(const F2Matrix& o) const {
  if (cols != o.rows) throw std::invalid_argument("F2Matrix: mul shape");
  F2Matrix out(rows, o.cols);
  const int wpr = words_per_row();
  const int owpr = o.words_per_row();
  for (int i = 0; i < rows; ++i) {
    std::uint64_t* dst = out.bits.data() + static_cast<size_t>(i) * owpr;
    for (int w = 0; w < wpr; ++w) {
      std::uint64_t word = bits[static_cast<size_t>(i) * wpr + w];
      while (word) {
        const int b = __builtin_ctzll(word);
        word &= word - 1;
        const int j = w * 64 + b;
        const std::uint64_t* src = o.bits.data() + static_cast<size_t>(j) * owpr;
        for (int u = 0; u < owpr; ++u) dst[u] ^= src[u];
      }
    }
  }
  return out;
}

F2Matrix F2Matrix::operator+(const F2Matrix& o) const {
  if (rows != o.rows || cols != o.cols)
    throw std::invalid_argument("F2Matrix: add shape");
  F2Matrix out = *this;
  for (size_t w = 0; w < bits.size(); ++w) out.bits[w] ^= o.bits[w];
  return out;
}

bool F2Matrix::operator==(const F2Matrix& o) const {
  return rows == o.rows && cols == o.cols && bits == o.bits;
}

bool F2Matrix::is_zero() const {
  for (std::uint64_t w : bits)
    if (w) return false;
  return true;
}

F2Matrix F2Matrix::hstack(const F2Matrix& o) const {
  if (rows != o.rows) throw std::invalid_argument("F2Matrix: hstack shape");
  F2Matrix out(rows, cols + o.cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j)
      if (get(i, j)) out.set(i, j, 1);
    for (int j = 0; j < o.cols; ++j)
      if (o.get(i, j)) out.set(i, cols + j, 1);
  }
  return out;
}

F2Matrix F2Matrix::col_slice(int lo, int hi) const {
  if (lo < 0 || hi < lo || hi > cols)
    throw std::invalid_argument("F2Matrix: col_slice range");
  F2Matrix out(rows, hi - lo);
  for (int i = 0; i < rows; ++i)
    for (int j = lo; j < hi; ++j)
      if (get(i, j)) out.set(i, j - lo, 1);
  return out;
}

RrefResult f2_rref(const F2Matrix& a) {
  RrefResult rr;
  rr.m = a;
  int r = 0;
  for (int c = 0; c < a.cols && r < a.rows; ++c) {
    int pivot = -1;
    for (int i = r; i < a.rows; ++i)
      if (rr.m.get(i, c)) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    if (pivot != r) {
      const int wpr = rr.m.words_per_row();
      for (int w = 0; w < wpr; ++w)
        std::swap(rr.m.bits[static_cast<size_t>(pivot) * wpr + w],
                  rr.m.bits[static_cast<size_t>(r) * wpr + w]);
    }
    for (int i = 0; i < a.rows; ++i)
      if (i != r && rr.m.get(i, c)) rr.m.row_xor(i, r);
    rr.pivot_cols.push_back(c);
    ++r;
  }
  return rr;
}

int f2_rank(const F2Matrix& a) {
  return static_cast<int>(f2_rref(a).pivot_cols.size());
}

F2Matrix f2_kernel_basis(const F2Matrix& a) {
  RrefResult rr = f2_rref(a);
  std::vector<int> is_pivot(static_cast<size_t>(a.cols), 0);
  for (int c : rr.pivot_cols) is_pivot[static_cast<size_t>(c)] = 1;
  std::vector<int> free_cols;
  for (int c = 0; c < a.cols; ++c)
    if (!is_pivot[static_cast<size_t>(c)]) free_cols.push_back(c);
  F2Matrix out(a.cols, static_cast<int>(free_cols.size()));
  for (size_t f = 0; f < free_cols.size(); ++f) {
    out.set(free_cols[f], static_cast<int>(f), 1);
    for (size_t r = 0; r < rr.pivot_cols.size(); ++r)
      if (rr.m.get(static_cast<int>(r), free_cols[f]))
        out.set(rr.pivot_cols[r], static_cast<int>(f), 1);
  }
  return out;
}

F2Matrix f2_independent_columns(const F2Matrix& a) {
  RrefResult rr = f2_rref(a);
  F2Matrix out(a.rows, static_cast<int>(rr.pivot_cols.size()));
  for (size_t c = 0; c < rr.pivot_cols.size(); ++c)
    for (int i = 0; i < a.rows; ++i)
      if (a.get(i, rr.pivot_cols[c])) out.set(i, static_cast<int>(c), 1);
  return out;
}

F2Matrix f2_extend_basis(const F2Matrix& base, const F2Matrix& cand) {
  RrefResult rr = f2_rref(base.hstack(cand));
  std::vector<int> chosen;
  for (int c : rr.pivot_cols)
    if (c >= base.cols) chosen.push_back(c - base.cols);
  F2Matrix out(cand.rows, static_cast<int>(chosen.size()));
  for (size_t c = 0; c < chosen.size(); ++c)
    for (int i = 0; i < cand.rows; ++i)
      if (cand.get(i, chosen[c])) out.set(i, static_cast<int>(c), 1);
  return out;
}

std::optional<F2Matrix> f2_solve(const F2Matrix& a, const F2Matrix& b) {
  if (a.rows != b.rows) throw std::invalid_argument("f2_solve: shape");
  RrefResult rr = f2_rref(a.hstack(b));
  for (int c : rr.pivot_cols)
    if (c >= a.cols) return std::nullopt;  // inconsistent row
  F2Matrix x(a.cols, b.cols);
  for (size_t r = 0; r < rr.pivot_cols.size(); ++r)
    for (int j = 0; j < b.cols; ++j)
      if (rr.m.get(static_cast<int>(r), a.cols + j))
        x.set(rr.pivot_cols[r], j, 1);
  return x;
}

json f2_matrix_to_json(const F2Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows; ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols; ++j) row.push_back(m.get(i, j));
    rows.push_back(row);
  }
  return rows;
}

F2Matrix f2_matrix_from_json(const json& j, int rows, int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw std::invalid_argument("F2 matrix json: bad row count");
  F2Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const json& row = j[static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw std::invalid_argument("F2 matrix json: bad column count");
    for (int c = 0; c < cols; ++c) {
      int v = row[static_cast<size_t>(c)].get<int>();
      if (v != 0 && v != 1)
        throw std::invalid_argument("F2 matrix json: entries must be 0/1");
      m.set(i, c, v);
    }
  }
  return m;
}

int F2Complex::dim(int d) const {
  auto it = dims.find(d);
  return it == dims.end() ? 0 : it->second;
}

F2Matrix F2Complex::diff(int d) const {
  auto it = differential.find(d);
  if (it != differential.end()) return it->second;
  return F2Matrix(dim(d - 1), dim(d));
}

int F2Complex::min_degree() const {
  for (const auto& [d, n] : dims)
    if (n > 0) return d;
  return 0;
}

int F2Complex::max_degree() const {
  int out = 0;
  for (const auto& [d, n] : dims)
    if (n > 0) out = d;
  return out;
}

void validate_complex(const F2Complex& c) {
  for (const auto& [d, n] : c.dims)
    if (n < 0)
      throw std::invalid_argument("complex: negative dimension at degree " +
                                  std::to_string(d));
  for (const auto& [d, m] : c.differential) {
    if (m.rows != c.dim(d - 1) || m.cols != c.dim(d))
      throw std::invalid_argument("complex: differential shape at degree " +
                                  std::to_string(d));
  }
  if (c.dims.empty()) return;
  const int lo = c.dims.begin()->first;
  const int hi = c.dims.rbegin()->first;
  for (int d = lo; d + 1 <= hi; ++d) {
    if (c.dim(d + 1) == 0 || c.dim(d - 1) == 0) continue;
    if (!(c.diff(d) * c.diff(d + 1)).is_zero())
      throw std::invalid_argument("complex: d(d(x)) != 0 from degree " +
                                  std::to_string(d + 1));
  }
}

std::map<int, int> homology_dims(const F2Complex& c) {
  validate_complex(c);
  std::map<int, int> h;
  for (const auto& [d, n] : c.dims) {
    if (n == 0) continue;
    h[d] = n - f2_rank(c.diff(d)) - f2_rank(c.diff(d + 1));
  }
  return h;
}

long long euler_characteristic(const F2Complex& c) {
  long long chi = 0;
  for (const auto& [d, n] : c.dims)
    chi += (((d % 2) + 2) % 2 == 0) ? n : -n;
  return chi;
}

json complex_to_json(const F2Complex& c) {
  json dims = json::object();
  for (const auto& [d, n] : c.dims)
    if (n > 0) dims[std::to_string(d)] = n;
  json diffs = json::object();
  for (const auto& [d, n] : c.dims) {
    if (n > 0 && c.dim(d - 1) > 0)
      diffs[std::to_string(d)] = f2_matrix_to_json(c.diff(d));
  }
  return {{"dims", dims}, {"differential", diffs}};
}

F2Complex complex_from_json(const json& j) {
  F2Complex c;
  if (!j.contains("dims") || !j.at("dims").is_object())
    throw std::invalid_argument("complex json: missing dims");
  for (const auto& [key, val] : j.at("dims").items())
    c.dims[std::stoi(key)] = val.get<int>();
  if (j.contains("differential"))
    for (const auto& [key, val] : j.at("differential").items()) {
      const int d = std::stoi(key);
      c.differential[d] = f2_matrix_from_json(val, c.dim(d - 1), c.dim(d));
    }
  validate_complex(c);
  return c;
}

F2Matrix ChainMap::block(int d) const {
  auto it = blocks.find(d);
  if (it != blocks.end()) return it->second;
  return F2Matrix(target.dim(d), source.dim(d));
}

void validate_chain_map(const ChainMap& f) {
  validate_complex(f.source);
  validate_complex(f.target);
  for (const auto& [d, m] : f.blocks)
    if (m.rows != f.target.dim(d) || m.cols != f.source.dim(d))
      throw std::invalid_argument("chain map: block shape at degree " +
                                  std::to_string(d));
  std::map<int, int> degrees = f.source.dims;
  for (const auto& [d, n] : degrees) {
    if (n == 0) continue;
    // target ∂ ∘ f = f ∘ source ∂ at degree d
    F2Matrix lhs = f.target.diff(d) * f.block(d);
    F2Matrix rhs = f.block(d - 1) * f.source.diff(d);
    if (!(lhs + rhs).is_zero())
      throw std::invalid_argument("chain map: does not commute with d at " +
                                  std::to_string(d));
  }
}

namespace {

void emplace_block(F2Matrix& dst, int r0, int c0, const F2Matrix& src) {
  for (int i = 0; i < src.rows; ++i)
    for (int j = 0; j < src.cols; ++j)
      if (src.get(i, j)) dst.set(r0 + i, c0 + j, 1);
}

}  // namespace

F2Complex mapping_cone(const ChainMap& f) {
  validate_chain_map(f);
  F2Complex cone;
  std::map<int, int> degrees;
  for (const auto& [d, n] : f.source.dims)
    if (n > 0) degrees[d + 1] = 1;
  for (const auto& [d, n] : f.target.dims)
    if (n > 0) degrees[d] = 1;
  for (const auto& [d, one] : degrees) {
    (void)one;
    cone.dims[d] = f.source.dim(d - 1) + f.target.dim(d);
  }
  for (const auto& [d, n] : cone.dims) {
    if (n == 0) continue;
    const int rows = f.source.dim(d - 2) + f.target.dim(d - 1);
    F2Matrix m(rows, n);
    emplace_block(m, 0, 0, f.source.diff(d - 1));
    emplace_block(m, f.source.dim(d - 2), 0, f.block(d - 1));
    emplace_block(m, f.source.dim(d - 2), f.source.dim(d - 1),
                  f.target.diff(d));
    cone.differential[d] = std::move(m);
  }
  validate_complex(cone);
  return cone;
}

F2Matrix HomologyData::image(int d) const {
  auto it = image_basis.find(d);
  return it == image_basis.end() ? F2Matrix(0, 0) : it->second;
}

F2Matrix HomologyData::rep(int d) const {
  auto it = reps.find(d);
  return it == reps.end() ? F2Matrix(0, 0) : it->second;
}

int HomologyData::dim(int d) const {
  auto it = dims.find(d);
  return it == dims.end() ? 0 : it->second;
}

HomologyData homology_data(const F2Complex& c) {
  validate_complex(c);
  HomologyData h;
  for (const auto& [d, n] : c.dims) {
    if (n == 0) continue;
    F2Matrix cycles = f2_kernel_basis(c.diff(d));
    F2Matrix image = f2_independent_columns(c.diff(d + 1));
    F2Matrix reps = f2_extend_basis(image, cycles);
    h.dims[d] = reps.cols;
    h.image_basis[d] = std::move(image);
    h.reps[d] = std::move(reps);
  }
  return h;
}

F2Matrix induced_on_homology(const F2Matrix& block, const F2Matrix& src_reps,
                             const F2Matrix& tgt_image,
                             const F2Matrix& tgt_reps) {
  if (block.rows == 0 || tgt_reps.cols == 0)
    return F2Matrix(tgt_reps.cols, src_reps.cols);
  F2Matrix images = block * src_reps;
  auto sol = f2_solve(tgt_image.hstack(tgt_reps), images);
  if (!sol)
    throw std::logic_error(
        "induced_on_homology: image of a cycle is not a cycle");
  F2Matrix out(tgt_reps.cols, src_reps.cols);
  for (int i = 0; i < tgt_reps.cols; ++i)
    for (int j = 0; j < src_reps.cols; ++j)
      if (sol->get(tgt_image.cols + i, j)) out.set(i, j, 1);
  return out;
}

TriangleData triangle_data(const ChainMap& f) {
  TriangleData t;
  t.cone = mapping_cone(f);
  HomologyData hs = homology_data(f.source);
  HomologyData ht = homology_data(f.target);
  HomologyData hc = homology_data(t.cone);
  t.h_src = hs.dims;
  t.h_tgt = ht.dims;
  t.h_cone = hc.dims;

  int lo = 0, hi = 0;
  bool any = false;
  const F2Complex& cone_ref = t.cone;
  for (const auto* dm : {&f.source.dims, &f.target.dims, &cone_ref.dims})
    for (const auto& [d, n] : *dm)
      if (n > 0) {
        lo = any ? std::min(lo, d) : d;
        hi = any ? std::max(hi, d) : d;
        any = true;
      }
  if (!any) {
    t.exact = true;
    return t;
  }

  for (int d = lo - 1; d <= hi + 1; ++d) {
    // f*: H_d(src) -> H_d(tgt)
    t.f_star[d] =
        induced_on_homology(f.block(d), hs.rep(d), ht.image(d), ht.rep(d));
    // i: tgt -> cone, y -> (0, y)
    F2Matrix inc(t.cone.dim(d), f.target.dim(d));
    for (int j = 0; j < f.target.dim(d); ++j)
      inc.set(f.source.dim(d - 1) + j, j, 1);
    t.i_star[d] = induced_on_homology(inc, ht.rep(d), hc.image(d), hc.rep(d));
    // p: cone -> src[-1], (x, y) -> x
    F2Matrix proj(f.source.dim(d - 1), t.cone.dim(d));
    for (int i = 0; i < f.source.dim(d - 1); ++i) proj.set(i, i, 1);
    t.p_star[d] =
        induced_on_homology(proj, hc.rep(d), hs.image(d - 1), hs.rep(d - 1));
  }

  t.exact = true;
  for (int d = lo - 1; d <= hi + 1 && t.exact; ++d) {
    const F2Matrix& fs = t.f_star[d];
    const F2Matrix& is = t.i_star[d];
    const F2Matrix& ps = t.p_star[d];
    // exactness at H_d(target)
    if (!(is * fs).is_zero()) t.exact = false;
    if (f2_rank(fs) + f2_rank(is) != (t.h_tgt.count(d) ? t.h_tgt[d] : 0))
      t.exact = false;
    // exactness at H_d(cone)
    if (!(ps * is).is_zero()) t.exact = false;
    if (f2_rank(is) + f2_rank(ps) != (t.h_cone.count(d) ? t.h_cone[d] : 0))
      t.exact = false;
    // exactness at H_{d-1}(source)
    const F2Matrix& fs1 = t.f_star[d - 1];  // 0x0 below the populated range
    if (!(fs1 * ps).is_zero()) t.exact = false;
    if (f2_rank(ps) + f2_rank(fs1) !=
        (t.h_src.count(d - 1) ? t.h_src[d - 1] : 0))
      t.exact = false;
  }
  return t;
}

bool exact_triangle_check(const ChainMap& f) { return triangle_data(f).exact; }

F2Complex assemble_cma(const std::vector<F2Complex>& blocks,
                       const std::vector<IndexedMap>& maps) {
  const int nb = static_cast<int>(blocks.size());
  for (const auto& b : blocks) validate_complex(b);
  for (const auto& m : maps) {
    if (m.from < 0 || m.from >= nb || m.to < 0 || m.to >= nb)
      throw std::invalid_argument("assemble_cma: map indices out of range");
    ChainMap f;
    f.source = blocks[static_cast<size_t>(m.from)];
    f.target = blocks[static_cast<size_t>(m.to)];
    f.blocks = m.map.blocks;
    validate_chain_map(f);
  }

  // level = longest path to a sink along map edges; cycles are rejected
  std::vector<std::vector<int>> succ(static_cast<size_t>(nb));
  for (const auto& m : maps)
    succ[static_cast<size_t>(m.from)].push_back(m.to);
  std::vector<int> level(static_cast<size_t>(nb), -1);
  std::vector<int> state(static_cast<size_t>(nb), 0);  // 0 new, 1 open, 2 done
  std::function<int(int)> depth = [&](int v) -> int {
    if (state[static_cast<size_t>(v)] == 1)
      throw std::invalid_argument("assemble_cma: map graph has a cycle");
    if (state[static_cast<size_t>(v)] == 2)
      return level[static_cast<size_t>(v)];
    state[static_cast<size_t>(v)] = 1;
    int d = 0;
    for (int s : succ[static_cast<size_t>(v)]) d = std::max(d, depth(s) + 1);
    state[static_cast<size_t>(v)] = 2;
    level[static_cast<size_t>(v)] = d;
    return d;
  };
  for (int v = 0; v < nb; ++v) depth(v);
  for (const auto& m : maps)
    if (level[static_cast<size_t>(m.from)] !=
        level[static_cast<size_t>(m.to)] + 1)
      throw std::invalid_argument(
          "assemble_cma: map from block " + std::to_string(m.from) +
          " to block " + std::to_string(m.to) +
          " does not drop exactly one level (no strictly triangular order "
          "with unit shifts)");

  // total degree t receives block b at internal degree t - level[b]
  F2Complex total;
  for (int b = 0; b < nb; ++b)
    for (const auto& [d, n] : blocks[static_cast<size_t>(b)].dims)
      if (n > 0) total.dims[d + level[static_cast<size_t>(b)]] += n;

  auto offset_of = [&](int t, int b) {
    int off = 0;
    for (int x = 0; x < b; ++x)
      off += blocks[static_cast<size_t>(x)].dim(t - level[static_cast<size_t>(x)]);
    return off;
  };

  for (const auto& [t, n] : total.dims) {
    if (n == 0) continue;
    const int rows = total.dims.count(t - 1) ? total.dims.at(t - 1) : 0;
    F2Matrix m(rows, n);
    for (int b = 0; b < nb; ++b) {
      const int d = t - level[static_cast<size_t>(b)];
      if (blocks[static_cast<size_t>(b)].dim(d) == 0) continue;
      emplace_block(m, offset_of(t - 1, b), offset_of(t, b),
                    blocks[static_cast<size_t>(b)].diff(d));
    }
    for (const auto& mp : maps) {
      const int d = t - level[static_cast<size_t>(mp.from)];
      ChainMap f;
      f.source = blocks[static_cast<size_t>(mp.from)];
      f.target = blocks[static_cast<size_t>(mp.to)];
      f.blocks = mp.map.blocks;
      if (f.source.dim(d) == 0 || f.target.dim(d) == 0) continue;
      emplace_block(m, offset_of(t - 1, mp.to), offset_of(t, mp.from),
                    f.block(d));
    }
    total.differential[t] = std::move(m);
  }

  if (!total.dims.empty()) {
    const int lo = total.dims.begin()->first;
    const int hi = total.dims.rbegin()->first;
    for (int t = lo; t + 1 <= hi; ++t) {
      if (total.dim(t + 1) == 0 || total.dim(t - 1) == 0) continue;
      if (!(total.diff(t) * total.diff(t + 1)).is_zero())
        throw std::invalid_argument(
            "assemble_cma: d(d(x)) != 0 from degree " + std::to_string(t + 1) +
            " (nonvanishing composite without a compensating term)");
    }
  }
  return total;
}

namespace {

// invertible over F2: unit-triangular L and U with random off-diagonal
// bits, times a random permutation
F2Matrix random_invertible(int n, RandomStream& rs) {
  F2Matrix l = F2Matrix::identity(n);
  F2Matrix u = F2Matrix::identity(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      if (rs.uniform() < 0.5) l.set(i, j, 1);
      if (rs.uniform() < 0.5) u.set(j, i, 1);
    }
  std::vector<int> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rs.uniform() * (i + 1));
    if (j > i) j = i;
    std::swap(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]);
  }
  F2Matrix p(n, n);
  for (int i = 0; i < n; ++i) p.set(i, perm[static_cast<size_t>(i)], 1);
  return l * u * p;
}

F2Matrix f2_invert(const F2Matrix& m) {
  auto inv = f2_solve(m, F2Matrix::identity(m.rows));
  if (!inv) throw std::logic_error("f2_invert: singular");
  return *inv;
}

}  // namespace

F2Complex random_complex(int min_deg, int max_deg, int max_total_dim,
                         RandomStream& rs) {
  if (max_deg < min_deg)
    throw std::invalid_argument("random_complex: empty degree range");
  F2Complex c;
  // split basis: spheres (one generator) and disks (two, identity d)
  std::map<int, int> sphere_count, disk_count;
  int total = 0;
  int misses = 0;
  while (total < max_total_dim && misses < 16) {
    const bool disk = rs.uniform() < 0.5 && max_deg > min_deg;
    if (disk && total + 2 <= max_total_dim) {
      int d = min_deg + 1 +
              static_cast<int>(rs.uniform() * (max_deg - min_deg));
      d = std::min(d, max_deg);
      ++disk_count[d];
      total += 2;
    } else if (!disk && total + 1 <= max_total_dim) {
      int d = min_deg + static_cast<int>(rs.uniform() * (max_deg - min_deg + 1));
      d = std::min(d, max_deg);
      ++sphere_count[d];
      ++total;
    } else {
      ++misses;
    }
  }
  if (total == 0) ++sphere_count[min_deg];

  for (int d = min_deg; d <= max_deg; ++d) {
    int n = 0;
    if (sphere_count.count(d)) n += sphere_count[d];
    if (disk_count.count(d)) n += disk_count[d];        // top generators
    if (disk_count.count(d + 1)) n += disk_count[d + 1];  // bottom generators
    if (n > 0) c.dims[d] = n;
  }
  // layout per degree: [spheres | disk tops at d | disk bottoms from d+1]
  for (int d = min_deg; d <= max_deg; ++d) {
    if (c.dim(d) == 0 || c.dim(d - 1) == 0) continue;
    F2Matrix m(c.dim(d - 1), c.dim(d));
    const int tops = disk_count.count(d) ? disk_count[d] : 0;
    const int top_off =
        (sphere_count.count(d) ? sphere_count[d] : 0);  // cols of tops
    const int bot_off = (sphere_count.count(d - 1) ? sphere_count[d - 1] : 0) +
                        (disk_count.count(d - 1) ? disk_count[d - 1] : 0);
    for (int t = 0; t < tops; ++t) m.set(bot_off + t, top_off + t, 1);
    c.differential[d] = std::move(m);
  }

  // scramble by change of basis: d' = P_{d-1} d P_d^{-1}
  std::map<int, F2Matrix> p, pinv;
  for (const auto& [d, n] : c.dims) {
    p[d] = random_invertible(n, rs);
    pinv[d] = f2_invert(p[d]);
  }
  for (auto& [d, m] : c.differential) {
    if (p.count(d - 1)) m = p[d - 1] * m;
    if (pinv.count(d)) m = m * pinv[d];
  }
  validate_complex(c);
  return c;
}

ChainMap random_chain_map(const F2Complex& source, const F2Complex& target,
                          RandomStream& rs) {
  validate_complex(source);
  validate_complex(target);

  // variables: entries of every block f_d; constraints: d f = f d
  std::map<int, int> var_offset;
  int nvars = 0;
  for (const auto& [d, n] : source.dims) {
    if (n == 0 || target.dim(d) == 0) continue;
    var_offset[d] = nvars;
    nvars += target.dim(d) * n;
  }
  auto var_index = [&](int d, int row, int col) {
    return var_offset.at(d) + row * source.dim(d) + col;
  };

  int neqs = 0;
  for (const auto& [d, n] : source.dims)
    if (n > 0 && target.dim(d - 1) > 0) neqs += target.dim(d - 1) * n;

  F2Matrix constraints(neqs, nvars);
  int eq = 0;
  for (const auto& [d, n] : source.dims) {
    if (n == 0 || target.dim(d - 1) == 0) continue;
    F2Matrix dt = target.diff(d);
    F2Matrix ds = source.diff(d);
    for (int i = 0; i < target.dim(d - 1); ++i)
      for (int j = 0; j < n; ++j) {
        // (d_tgt f_d)_{ij}: sum_k d_tgt(i,k) f_d(k,j)
        if (target.dim(d) > 0 && var_offset.count(d))
          for (int k = 0; k < target.dim(d); ++k)
            if (dt.get(i, k)) constraints.set(eq, var_index(d, k, j), 1);
        // (f_{d-1} d_src)_{ij}: sum_m f_{d-1}(i,m) d_src(m,j)
        if (source.dim(d - 1) > 0 && var_offset.count(d - 1))
          for (int m = 0; m < source.dim(d - 1); ++m)
            if (ds.get(m, j)) constraints.set(eq, var_index(d - 1, i, m), 1);
        ++eq;
      }
  }

  F2Matrix kernel = f2_kernel_basis(constraints);
  std::vector<int> x(static_cast<size_t>(nvars), 0);
  for (int c = 0; c < kernel.cols; ++c) {
    if (rs.uniform() >= 0.5) continue;
    for (int v = 0; v < nvars; ++v) x[static_cast<size_t>(v)] ^= kernel.get(v, c);
  }

  ChainMap f;
  f.source = source;
  f.target = target;
  for (const auto& [d, off] : var_offset) {
    (void)off;
    F2Matrix m(target.dim(d), source.dim(d));
    for (int i = 0; i < target.dim(d); ++i)
      for (int j = 0; j < source.dim(d); ++j)
        m.set(i, j, x[static_cast<size_t>(var_index(d, i, j))]);
    f.blocks[d] = std::move(m);
  }
  validate_chain_map(f);
  return f;
}

bool slope_valid(const Slope& s) {
  if (s.p == 0 && s.q == 0) return false;
  return std::gcd(std::abs(s.p), std::abs(s.q)) == 1;
}

long long slope_pairing_raw(long long pm, long long qm, long long pn,
                            long long qn) {
  return qm * pn - pm * qn;
}

long long slope_pairing(const Slope& m, const Slope& n) {
  if (!slope_valid(m) || !slope_valid(n))
    throw std::invalid_argument("slope_pairing: invalid slope");
  return slope_pairing_raw(m.p, m.q, n.p, n.q);
}

bool is_surgery_triad(const Slope& m1, const Slope& m2, const Slope& m3) {
  return slope_pairing(m1, m2) == -1 && slope_pairing(m2, m3) == -1 &&
         slope_pairing(m3, m1) == -1;
}

}  // namespace adhm
