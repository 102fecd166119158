#pragma once

#include <map>
#include <optional>

#include "adhm/strata.hpp"

namespace adhm {

// psi-vanishing proxy near (not at) zeros: require
// final_psi_norm <= kPsiRatioBound * final_mu_norm^(1/4).
// Calibrated once over seeded k<=5 sweeps (observed max ratio ~4.5e-3) and
// frozen with two orders of margin.
inline constexpr double kPsiRatioBound = 0.5;

// spectrum is attached to a flow result only below this psi norm
inline constexpr double kSpectrumPsiThreshold = 1e-3;

struct FlowResult {
  ADHMConfig final_config;
  int iterations = 0;
  double final_mu_norm = 0;
  double final_psi_norm = 0;
  std::optional<SpectrumPoint> spectrum;
  bool converged = false;
};

struct FlowGradient {
  Matrix v, w, a, b;
  double norm2() const;
};

// E(c) = ||mu(c)||^2 in the complex chart (equals the quaternionic norm)
double flow_energy(const ADHMConfig& c);

// gradient of flow_energy: d/dt E(c + t h) = Re tr sum(grad^+ . h)
FlowGradient flow_gradient(const ADHMConfig& c);

// Gradient descent with Armijo backtracking (c = 1e-4, shrink 1/2) on
// ||mu||^2, Barzilai-Borwein trial steps, Gauss-Newton polish once
// ||mu|| < 1e-4.  Accepted steps never increase the energy.  Stops at
// ||mu|| <= tol or max_iter; non-convergence is reported, not thrown.
FlowResult minimize_mu(const ADHMConfig& start, double tol, int max_iter,
                       std::uint64_t seed);

struct PsiVanishingRow {
  double final_mu_norm = 0;
  double final_psi_norm = 0;
  Partition partition;  // empty if no spectrum
  bool converged = false;
  double psi_ratio = 0;  // psi / mu^(1/4)
};

struct PsiVanishingReport {
  std::vector<PsiVanishingRow> rows;
  double max_psi_norm = 0;  // over converged rows
  int unconverged = 0;
  bool bound_ok = true;  // every converged row within kPsiRatioBound
};

PsiVanishingReport psi_vanishing_report(const std::vector<FlowResult>& results);

json psi_vanishing_to_json(const PsiVanishingReport& rep);

// seeded random starts (r = 1, norm 1), flow to zeros, classify endpoints
// by partition; requires k <= 6.  Counts sum to the number of converged runs.
std::map<Partition, int> stratum_census(int k, int runs, std::uint64_t seed);

}  // namespace adhm
