#pragma once

#include <string>
#include <utility>
#include <vector>

#include "flowref/field.hpp"
#include "flowref/hs.hpp"
#include "flowref/refine.hpp"

namespace flowref {

/// Linearized brightness-constancy data: B w := fx u + fy v, c := -ft,
/// so the constraint reads B w = c.
struct OfcData {
  ScalarField fx;  ///< B acting on u
  ScalarField fy;  ///< B acting on v
  ScalarField c;   ///< right-hand side -ft

  /// Builds the data from two frames, optionally Gaussian-presmoothed with
  /// the same sigma the flow estimator used.
  static OfcData from_frames(const ScalarField& f1, const ScalarField& f2,
                             double presmooth_sigma = 0.0);
};

/// Pointwise constraint residual fx u + fy v - c.
ScalarField ofc_residual(const FlowField& w, const OfcData& ofc);

/// Augmented Lagrangian
///   L = J_C(w) + (mu_c / 2) ||B w - c||^2 + <lambda1, B w - c>.
/// Evaluates both this form and the J_R-based reformulation
///   L = J_R(w; beta=1, phi=f^2, same alpha) + ||B w - c||^2
///     + (mu_c / 2) ||B w - c||^2 + <lambda1 + 2 f div w, B w - c>
/// with the reformulation's data pieces taken from the shared interior
/// quadrature, and throws IdentityError if the two disagree beyond 1e-8
/// relative (they are algebraically identical). Returns the first form.
double augmented_lagrangian(const FlowField& w, const ScalarField& lambda1,
                            double mu_c, const OfcData& ofc,
                            const ScalarField& f1, const ScalarField& f2,
                            double alpha);

/// Uzawa multiplier step lambda + 2 f d + rho * residual (pointwise).
ScalarField uzawa_update(const ScalarField& lambda1, const ScalarField& f,
                         const ScalarField& d, double rho,
                         const ScalarField& residual);

/// Scales both frames to [0, 1] by their joint maximum, then multiplies the
/// second frame by G_sigma*f1 / (G_sigma*f2 + 1e-6), cancelling smooth
/// illumination gain between the frames.
std::pair<ScalarField, ScalarField> illumination_correct(const ScalarField& f1,
                                                         const ScalarField& f2,
                                                         double sigma);

/// Bounded Constraint Algorithm configuration. Values the source material
/// leaves open are set here: lambda^0 = 0, rho^0 = 1, the tolerances start
/// at the norms of the initial point, tighten by halving for the first five
/// corrections and follow an M/(n+1)^2 schedule afterwards, and delta_hs
/// defaults to the achieved data residual of the initial flow. All norms are
/// taken over interior pixels (the boundary ring is pinned to zero by the
/// Dirichlet condition and would otherwise dominate them).
struct BcaConfig {
  double rho0 = 1.0;
  double mu_c = 1e3;           ///< penalty weight (diagnostic; capped at 1e9)
  double semigroup_t = -1.0;   ///< S(t) time per outer iteration; <0: refine dt
  double delta_hs = -1.0;      ///< <0: use ||B v0 - c|| of the initial flow
  int max_outer = 400;
  int sweeps_per_outer = 3;    ///< refine sweeps per outer iteration
  int sweep_budget = 30;       ///< total refine sweeps before the flow holds
  double rho_cap = 1e9;
  /// eps2^(0) = eps2_scale * ||f d^(0)||. Starting exactly at the initial
  /// norm would satisfy the divergence test on the first iteration for any
  /// input (S(t) is averaging), collapsing the loop; starting strictly
  /// inside it makes the diffusion earn the tolerance.
  double eps2_scale = 0.5;
};

struct BcaIterRecord {
  int iter = 0;
  double constraint_norm = 0.0;    ///< ||B v - c||_2
  double fd_norm = 0.0;            ///< ||f d||_2
  double lambda_drift = 0.0;       ///< ||lambda - lambda^0||_2
  double rho = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double lambda_increment = 0.0;   ///< ||lambda^(n+1) - lambda^(n)|| (0 if frozen)
};

struct BcaState {
  FlowField flow;
  ScalarField lambda1;
  ScalarField d;       ///< semigroup-evolved constraint field (div or curl)
  double rho = 1.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double mu_c = 1e3;
  double delta_hs = 0.0;
  int iter = 0;
  bool converged = false;
  std::vector<BcaIterRecord> history;
};

/// Runs the full pipeline: HS initial flow, then outer iterations that
/// advance the flow by refine sweeps (until the sweep budget or the refine
/// tolerance is reached), evolve the constraint field by d <- S(t) d, and
/// apply the bounded-constraint bookkeeping:
///   if ||B v - c|| <= max(eps1, 2 delta_hs):
///       terminate when ||f d|| <= eps2, else Uzawa-update lambda
///       (rho frozen) and tighten tolerances;
///   else: keep lambda, rho <- 100 rho, tighten tolerances.
/// The residual fed to the Uzawa step is projected onto the current eps1
/// ball, ||r_eff|| <= eps1^(n) — the bound the multiplier convergence
/// argument assumes for the iterates; the raw OFC residual itself does not
/// decay since the flow update carries no data term.
BcaState bca_run(const ScalarField& f1, const ScalarField& f2,
                 const HsConfig& hs_cfg, const RefineConfig& refine_cfg,
                 const BcaConfig& bca_cfg);

/// Writes the per-iteration history as CSV
/// (iter, constraint_norm, fd_norm, lambda_drift, rho, eps1, eps2).
void write_history_csv(const std::string& path,
                       const std::vector<BcaIterRecord>& history);

}  // namespace flowref
