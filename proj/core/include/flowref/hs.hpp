#pragma once

#include <vector>

#include "flowref/field.hpp"

namespace flowref {

/// Horn-Schunck estimator configuration.
///
/// `alpha` is the Lagrange-multiplier weight of the classical update
///   u <- ubar - fx (fx ubar + fy vbar + ft) / (alpha + fx^2 + fy^2),
/// so its useful magnitude scales with the squared intensity gradients.
/// The historical default 20 assumes 8-bit (0..255) intensities; images
/// normalized to [0, 1] need roughly 20/255^2 ~ 3e-4 for the same balance.
struct HsConfig {
  double alpha = 20.0;
  int max_iters = 2000;
  double tol = 1e-4;            ///< relative max-norm flow update threshold
  double presmooth_sigma = 1.0; ///< Gaussian applied to both frames first
};

/// Spatio-temporal image derivatives: fx, fy are the frame-averaged central
/// differences, ft = f2 - f1 (unit frame interval).
struct ImageDerivs {
  ScalarField fx;
  ScalarField fy;
  ScalarField ft;
};

ImageDerivs image_derivatives(const ScalarField& f1, const ScalarField& f2);

struct HsResult {
  FlowField flow;
  int iters = 0;
  double final_update = 0.0;  ///< last relative max-norm update
  bool converged = false;
};

/// Jacobi iteration on the coupled Horn-Schunck equations with the
/// nine-point local average (reflected boundaries). Returns the best
/// iterate with a non-converged flag if max_iters is exhausted.
HsResult hs_solve(const ScalarField& f1, const ScalarField& f2,
                  const HsConfig& cfg);

/// One Jacobi sweep given precomputed derivatives; exposed for tests.
FlowField hs_sweep(const FlowField& w, const ImageDerivs& d, double alpha);

}  // namespace flowref
