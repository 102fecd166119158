#include "adhm/series.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace adhm {

long long LaurentSeries::coeff(int d) const {
  auto it = coeffs.find(d);
  return it == coeffs.end() ? 0 : it->second;
}

void LaurentSeries::set(int d, long long v) {
  if (d < d_min || d > d_max)
    throw std::out_of_range("LaurentSeries::set: degree " + std::to_string(d) +
                            " outside window");
  if (v == 0)
    coeffs.erase(d);
  else
    coeffs[d] = v;
}

bool LaurentSeries::operator==(const LaurentSeries& o) const {
  if (d_min != o.d_min || d_max != o.d_max) return false;
  for (int d = d_min; d <= d_max; ++d)
    if (coeff(d) != o.coeff(d)) return false;
  return true;
}

LaurentSeries series_add(const LaurentSeries& a, const LaurentSeries& b) {
  LaurentSeries out;
  out.d_min = std::max(a.d_min, b.d_min);
  out.d_max = std::min(a.d_max, b.d_max);
  for (int d = out.d_min; d <= out.d_max; ++d)
    out.set(d, a.coeff(d) + b.coeff(d));
  return out;
}

json series_coeffs_json(const LaurentSeries& s) {
  json out = json::object();
  for (const auto& [d, c] : s.coeffs) out[std::to_string(d)] = c;
  return out;
}

long long chi_sym(int g, int n) {
  if (g < 0 || g > 30) throw std::invalid_argument("chi_sym: g out of range");
  if (n < 0 || n > 10000)
    throw std::invalid_argument("chi_sym: n out of range");
  if (g == 0) return n + 1;
  const int e = 2 * g - 2;
  if (n > e) return 0;
  long long binom = 1;
  for (int i = 1; i <= n; ++i) binom = binom * (e - i + 1) / i;
  return (n % 2 == 0) ? binom : -binom;
}

LaurentSeries sw_series(int g, int d_min, int d_max) {
  if (d_max < d_min) throw std::invalid_argument("sw_series: empty window");
  LaurentSeries s;
  s.d_min = d_min;
  s.d_max = d_max;
  for (int d = d_min; d <= d_max; ++d) {
    const int n = g - 1 + d;
    if (n < 0) continue;
    const long long c = chi_sym(g, n);
    s.set(d, (n % 2 == 0) ? c : -c);
  }
  return s;
}

LaurentSeries pt_series(int g, int d_min, int d_max) {
  if (g < 0 || g > 30) throw std::invalid_argument("pt_series: g out of range");
  if (d_max < d_min) throw std::invalid_argument("pt_series: empty window");
  LaurentSeries s;
  s.d_min = d_min;
  s.d_max = d_max;
  if (g >= 1) {
    // row of (1+q)^(2g-2) by repeated convolution, then shift by 1-g
    std::vector<long long> row{1};
    for (int step = 0; step < 2 * g - 2; ++step) {
      std::vector<long long> next(row.size() + 1, 0);
      for (size_t i = 0; i < row.size(); ++i) {
        next[i] += row[i];
        next[i + 1] += row[i];
      }
      row = std::move(next);
    }
    for (size_t n = 0; n < row.size(); ++n) {
      const int d = static_cast<int>(n) - (g - 1);
      if (d >= d_min && d <= d_max) s.set(d, row[n]);
    }
  } else {
    // (1+q)^2 s(q) = q:  s_d = [d==1] - 2 s_{d-1} - s_{d-2},  s_d = 0, d <= 0
    long long prev2 = 0, prev1 = 0;  // s_{d-2}, s_{d-1}
    for (int d = 1; d <= d_max; ++d) {
      long long cur = (d == 1 ? 1 : 0) - 2 * prev1 - prev2;
      if (d >= d_min) s.set(d, cur);
      prev2 = prev1;
      prev1 = cur;
    }
  }
  return s;
}

long long evaluate_at_one(const LaurentSeries& s, int g) {
  if (g < 1)
    throw std::invalid_argument(
        "evaluate_at_one: undefined for genus 0 — the series has infinitely "
        "many nonzero coefficients and does not sum at q=1");
  if (s.d_min > -(g - 1) || s.d_max < g - 1)
    throw std::invalid_argument(
        "evaluate_at_one: window does not cover the support [-(g-1), g-1]");
  long long total = 0;
  for (const auto& [d, c] : s.coeffs) total += c;
  return total;
}

double slope_delta(const BundleDatum& d, double delta, double vol) {
  if (vol <= 0) throw std::invalid_argument("slope_delta: vol must be > 0");
  if (d.rank <= 0) throw std::invalid_argument("slope_delta: rank must be > 0");
  const double pi = std::acos(-1.0);
  return (2.0 * pi / vol) * (static_cast<double>(d.degree) / d.rank) +
         delta / d.rank;
}

StabilityVerdict is_delta_stable(const BundleDatum& ambient, double delta,
                                 double vol, bool psi1_nonzero,
                                 bool psi2_nonzero,
                                 const std::vector<BundleDatum>& subobjects) {
  for (const auto& g : subobjects)
    if (g.rank <= 0 || g.rank >= ambient.rank)
      throw std::invalid_argument(
          "is_delta_stable: sub-objects must be proper (0 < rank < ambient)");

  StabilityVerdict v;
  if ((delta > 0 && !psi1_nonzero) || (delta < 0 && !psi2_nonzero)) {
    v.stable = false;
    v.violated_clause = 1;
    return v;
  }
  const double mu_h = slope_delta(ambient, delta, vol);
  for (const auto& g : subobjects) {
    if (g.contains_im_psi1 && !(slope_delta(g, delta, vol) < mu_h)) {
      v.stable = false;
      v.violated_clause = 2;
      v.witness = g;
      return v;
    }
    if (g.contained_in_ker_psi2 && !(slope_delta(g, 0.0, vol) < mu_h)) {
      v.stable = false;
      v.violated_clause = 3;
      v.witness = g;
      return v;
    }
  }
  return v;
}

json bundle_datum_to_json(const BundleDatum& d) {
  return {{"rank", d.rank},
          {"degree", d.degree},
          {"contains_im_psi1", d.contains_im_psi1},
          {"contained_in_ker_psi2", d.contained_in_ker_psi2}};
}

BundleDatum bundle_datum_from_json(const json& j) {
  BundleDatum d;
  d.rank = j.at("rank").get<int>();
  d.degree = j.at("degree").get<long long>();
  d.contains_im_psi1 = j.value("contains_im_psi1", false);
  d.contained_in_ker_psi2 = j.value("contained_in_ker_psi2", false);
  return d;
}

}  // namespace adhm
