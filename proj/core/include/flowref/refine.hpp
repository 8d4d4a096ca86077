#pragma once

#include <vector>

#include "flowref/diffusion.hpp"
#include "flowref/field.hpp"

namespace flowref {

/// Which first-order quantity the constraint term penalizes.
enum class Psi { divergence, curl };

/// Refinement configuration: J_R(u) = beta * int phi(f) psi(grad u)
///                                  + alpha * int (|grad u|^2 + |grad v|^2).
struct RefineConfig {
  double alpha = 100.0;
  double beta = 0.01;
  double a0 = 1.0;  ///< PDE coupling constant, k = 1 + a0 phi(f)
  Phi phi = Phi::image_squared;
  Psi psi = Psi::divergence;
  int max_iters = 200;
  double tol = 1e-5;  ///< relative max-norm flow-update threshold
  double dt = 0.2;    ///< evolution step for the PDE form / semigroup time

  /// Throws when beta/alpha > 1e-2; returns true (a warning) when the ratio
  /// exceeds the 1e-4 level the scheme was calibrated at.
  bool validate() const;
};

/// Midpoint-rule quadrature of J_R over interior pixels. f is the image the
/// weight phi acts on (normalized to [0, 1] for phi = image_squared).
double energy_jr(const FlowField& w, const ScalarField& f, const RefineConfig& cfg);

/// Horn-Schunck functional: int (fx u + fy v + ft)^2
///                        + alpha int (|grad u|^2 + |grad v|^2).
double energy_jhs(const FlowField& w, const ScalarField& f1, const ScalarField& f2,
                  double alpha);

/// Continuity-equation functional int (ft + div(f w))^2 + alpha int (...).
/// The transport term is expanded by the product rule
/// (ft + grad f . w + f div w) so that energy_jc, energy_jhs, energy_jr and
/// cross_term_k share one discretization and decompose exactly.
double energy_jc(const FlowField& w, const ScalarField& f1, const ScalarField& f2,
                 double alpha);

/// K(w) = 2 int (B w - c)(f div w).
double cross_term_k(const FlowField& w, const ScalarField& f1,
                    const ScalarField& f2);

/// The data-term pieces of the shared quadrature: int (B w - c)^2 and the
/// cross term, both over interior pixels with the frame-averaged central
/// derivatives. These are what tie J_C, J_HS, J_R and K together exactly.
struct OfcQuadrature {
  double residual_sq = 0.0;
  double cross = 0.0;
};
OfcQuadrature ofc_quadrature(const FlowField& w, const ScalarField& f1,
                             const ScalarField& f2);

struct RefineResult {
  FlowField flow;
  std::vector<double> energy_trace;  ///< J_R after every sweep
  int sweeps = 0;
  bool converged = false;
};

/// One pointwise-diagonal Jacobi sweep
///   P v^(n+1) = alpha (M * v^(n)) + beta * forcing(phi(f) d),
/// with M the normalized nine-point average, Dirichlet-zero boundary, and
/// d the constraint field (divergence or curl) supplied by the caller.
/// For psi = divergence the forcing is grad(phi d) and
/// P = diag(alpha + 2 beta phi/dx^2, alpha + 2 beta phi/dy^2); for psi = curl
/// the forcing is the orthogonal gradient and the diagonal swaps dx/dy.
FlowField refine_sweep(const FlowField& w, const ScalarField& f,
                       const RefineConfig& cfg, const ScalarField& d);

/// Iterates refine_sweep, recomputing d from the current flow each sweep,
/// until the relative flow update drops below cfg.tol or cfg.max_iters is
/// reached. Throws ConvergenceError if the energy rises for five consecutive
/// sweeps (diverging configuration).
RefineResult refine_iterate(const FlowField& w0, const ScalarField& f,
                            const RefineConfig& cfg);

/// Explicit Euler steps of the coupled evolutionary system
///   du/dt = Lap u + a0 d/dx [phi(f) (u_x + v_y)]
///   dv/dt = Lap v + a0 d/dy [phi(f) (u_x + v_y)]
/// with Dirichlet-zero boundary; the alternative stepping path to the
/// fixed-point sweep, used to cross-check the decoupled diffusion.
FlowField evolve_flow_pde(const FlowField& w0, const ScalarField& f, double a0,
                          Phi phi, double dt, int steps);

/// Numeric check of the Cauchy-Riemann diagonalization D = R A R^{-1}:
/// with A w the right side of the evolutionary system,
///   r1 = curl(A w) - Lap(curl w),
///   r2 = div(A w)  - Lap(k div w),   k = 1 + a0 phi(f),
/// evaluated on interior pixels at least 4 deep (compositions of boundary
/// stencils do not commute). Returns max of the relative L2 norms.
double diagonalization_residual(const FlowField& w, const ScalarField& f,
                                double a0, Phi phi = Phi::image_squared);

}  // namespace flowref
