#pragma once

#include <map>
#include <optional>
#include <vector>

#include "adhm/linalg.hpp"

namespace adhm {

// Integer Laurent series truncated to a window [d_min, d_max] (inclusive).
// Absent coefficient = 0; all arithmetic exact.
struct LaurentSeries {
  int d_min = 0;
  int d_max = -1;  // empty window when d_max < d_min
  std::map<int, long long> coeffs;

  long long coeff(int d) const;
  void set(int d, long long v);  // validates the window; drops zeros
  bool operator==(const LaurentSeries& o) const;
};

// windows intersect (coefficients outside a window are unknown, not zero)
LaurentSeries series_add(const LaurentSeries& a, const LaurentSeries& b);

json series_coeffs_json(const LaurentSeries& s);

// chi of the n-th symmetric product of a genus-g surface: coefficient of
// q^n in (1-q)^(2g-2); for g >= 1 that is (-1)^n binom(2g-2, n), for g = 0
// it is n+1.  Requires 0 <= g <= 30, 0 <= n <= 10^4.
long long chi_sym(int g, int n);

// coefficient of q^d is (-1)^(g-1+d) chi_sym(g, g-1+d), zero when
// g-1+d < 0
LaurentSeries sw_series(int g, int d_min, int d_max);

// same series by an independent route: iterated convolution by (1+q) for
// g >= 1 (the shifted binomial row), and the (1+q)^2 s = q recurrence for
// g = 0.  Never calls chi_sym.
LaurentSeries pt_series(int g, int d_min, int d_max);

// sum of all coefficients; defined only for g >= 1, and the window must
// cover the full support [-(g-1), g-1]
long long evaluate_at_one(const LaurentSeries& s, int g);

// sub-bundle data for the delta-stability predicate
struct BundleDatum {
  int rank = 1;
  long long degree = 0;
  bool contains_im_psi1 = false;
  bool contained_in_ker_psi2 = false;
};

// mu_delta = (2 pi / vol) (deg / rk) + delta / rk;  mu = mu_0
double slope_delta(const BundleDatum& d, double delta, double vol);

struct StabilityVerdict {
  bool stable = true;
  int violated_clause = 0;  // 1, 2, or 3 when unstable
  std::optional<BundleDatum> witness;
};

// Clauses: (1) delta > 0 requires psi1 != 0, delta < 0 requires psi2 != 0;
// (2) invariant sub-objects containing im psi1 need mu_delta(G) < mu_delta(H);
// (3) invariant sub-objects inside ker psi2 need mu(G) < mu_delta(H).
// Sub-objects must be proper: 0 < rank < ambient rank.
StabilityVerdict is_delta_stable(const BundleDatum& ambient, double delta,
                                 double vol, bool psi1_nonzero,
                                 bool psi2_nonzero,
                                 const std::vector<BundleDatum>& subobjects);

json bundle_datum_to_json(const BundleDatum& d);
BundleDatum bundle_datum_from_json(const json& j);

}  // namespace adhm
