#pragma once

#include <cstdint>
#include <string>

#include "adhm/linalg.hpp"

namespace adhm {

// ---------------------------------------------------------------------------
// Lattice vortex system on an N x N flat torus, abelian gauge group.
//
// Discretization: sections live on sites, the connection perturbation on
// edges, curvature on plaquettes.  The degree-d background connection is
// realized by fixed link angles whose plaquette phases are all exp(-2*pi*i*
// d/N^2), so the total background flux is 2*pi*d exactly.  psi2 stores the
// conjugated (1,0)-component, which transforms with the same charge as psi1;
// both are therefore plain site fields under one set of links.
//
// Index conventions: fields are N x N matrices indexed (m, n); axis 0 is m
// (rows, spacing h1 = L1/N), axis 1 is n (cols, spacing h2 = L2/N).  Site-
// major flattening is s = m*N + n.

struct TorusGrid {
  int n = 16;
  double l1 = 2.0 * M_PI;
  double l2 = 2.0 * M_PI;
  int degree = 0;

  double h1() const { return l1 / n; }
  double h2() const { return l2 / n; }
  double cell() const { return h1() * h2(); }
  double area() const { return l1 * l2; }
};

// validates: n >= 16, positive side lengths
TorusGrid make_grid(int n, int degree, double l1 = 2.0 * M_PI,
                    double l2 = 2.0 * M_PI);

struct VortexState {
  TorusGrid grid;
  Eigen::MatrixXd a1, a2;    // edge perturbation of the connection
  Matrix psi1, psi2;         // site fields (psi2 = conjugated (1,0)-part)
  double lambda = 0.0;
  Cx theta = Cx(0, 0);       // constant perturbing pairing value
};

bool state_shapes_ok(const VortexState& s);

// all perturbation fields zero
VortexState zero_state(const TorusGrid& grid, double lambda,
                       Cx theta = Cx(0, 0));

// exact solution for degree 0: a = 0, psi2 = 0, psi1 constant with
// |psi1|^2 = 2*pi*lambda / area  (requires lambda >= 0)
VortexState constant_state(const TorusGrid& grid, double lambda);

// fixed background link angles (th1, th2) realizing total flux 2*pi*d
void background_links(const TorusGrid& grid, Eigen::MatrixXd& th1,
                      Eigen::MatrixXd& th2);

// per-plaquette flux of the full connection (background + a), principal
// branch; sums to 2*pi*d for small a
Eigen::MatrixXd plaquette_flux(const VortexState& s);

// ---------------------------------------------------------------------------
// Residuals.  Four equations, grouped as two Dirac-type fields plus the
// moment-type pair (complex pairing + real curvature):
//   r1  = (1/2)(D1 + i D2) psi1                      (central differences)
//   r2  = (1/2)(-D1 + i D2) psi2
//   r3p = conj(psi1) psi2 - theta
//   r3c = 2*pi*d/area - curl(a)/cell + |psi1|^2 - |psi2|^2 - 2*pi*lambda/area
// Norms are cell-weighted L2 norms; norm3 combines pairing and curvature.

struct VortexResidual {
  Matrix r1, r2, r3_pair;
  Eigen::MatrixXd r3_curv;
  double norm1 = 0.0, norm2 = 0.0, norm3 = 0.0;
  double total = 0.0;  // sqrt(norm1^2 + norm2^2 + norm3^2)
};

VortexResidual vortex_residual(const VortexState& s);

// same system with forward covariant differences in the Dirac rows; used as
// the solver's warm-up objective (its d=1 kernel is one-dimensional, which
// pins the physical branch before the central polish)
VortexResidual vortex_residual_forward(const VortexState& s);

// value and analytic gradient of the least-squares energy
//   E(s) = norm1^2 + norm2^2 + norm3^2
// that the solver minimizes (forward selects the warm-up scheme); complex
// entries collect (dE/dRe, dE/dIm) pairs
struct VortexGradient {
  Eigen::MatrixXd a1, a2;
  Matrix psi1, psi2;
};

double vortex_energy(const VortexState& s, bool forward = false);
VortexGradient vortex_energy_gradient(const VortexState& s,
                                      bool forward = false);

// ---------------------------------------------------------------------------
// Solver: least-squares minimization of the summed squared residuals with
// L-BFGS + backtracking, forward warm-up phase then central polish.

struct VortexReport {
  int iterations_forward = 0;
  int iterations_central = 0;
  double residual_norm = 0.0;  // central total residual at the end
  bool converged = false;      // residual_norm <= tol
};

struct VortexSolveResult {
  VortexState state;
  VortexReport report;
};

// pre: |degree| <= 3, n <= 128; lambda == degree rejected (no solutions with
// both sections nonzero exist there, and the sign rule degenerates)
VortexSolveResult solve_vortex(const TorusGrid& grid, double lambda,
                               uint64_t seed, double tol = 1e-6,
                               int max_iter = 40000);

// ---------------------------------------------------------------------------
// Diagnostics.

struct IntegralIdentity {
  double lhs = 0.0;  // integral of |psi1|^2 - |psi2|^2
  double rhs = 0.0;  // 2*pi*(lambda - degree)
  double relative_error = 0.0;
};

IntegralIdentity integral_identity_check(const VortexState& s);

struct WindingReport {
  Eigen::MatrixXi plaquette;  // per-plaquette winding of the chosen section
  int total = 0;              // sum, equals the degree for the dominant field
  int zero_count = 0;         // sum of |n_p|
  bool used_psi2 = false;
};

// winding of the dominant (larger-norm) section; per-plaquette gauge-
// covariant phase circulation minus the connection flux
WindingReport winding_number(const VortexState& s);
WindingReport winding_number(const VortexState& s, bool use_psi2);

// site-wise gauge transformation by angles chi: psi -> e^{i chi} psi,
// a_mu -> a_mu + d_mu chi.  All residual norms are invariant.
VortexState gauge_transform(const VortexState& s, const Eigen::MatrixXd& chi);

// ---------------------------------------------------------------------------
// Reduced-system evaluator for the rank-1, k=1 case.  The quaternionic slot
// enters as a decoupled auxiliary: all its commutator terms vanish
// identically for k=1, so the reduced residual must coincide with the vortex
// residual on the shared variables.  Implemented as an independent fused
// per-site code path and compared entrywise.

struct ReducedResidual {
  double dirac1 = 0.0, dirac2 = 0.0;  // cell-weighted norms
  double pairing = 0.0, curvature = 0.0;
  double xi_moment = 0.0;  // norm of the quaternionic moment terms (k=1: 0)
  double xi_wedge = 0.0;   // norm of the internal commutator terms (k=1: 0)
  double coincidence = 0.0;  // max entrywise gap vs vortex_residual
};

ReducedResidual adhm_reduced_residual(const VortexState& s,
                                      const XiQuaternionic& xi);
ReducedResidual adhm_reduced_residual(const VortexState& s);  // xi = 0

// ---------------------------------------------------------------------------
// JSON: {"grid": {"n","l1","l2","degree"}, "lambda", "theta": [re,im],
//        "a1": [..], "a2": [..], "psi1": [[re,im],..], "psi2": [[re,im],..]}
// fields site-major (s = m*N + n).

json state_to_json(const VortexState& s);
VortexState state_from_json(const json& j);

}  // namespace adhm
