#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace flowref {

/// One structural property check: pass iff value <= threshold (or the
/// detail string explains a different comparison).
struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

/// Smooth trigonometric fields on [0,1]^2 sampled onto an NxN grid; the
/// standard inputs for the diagonalization check.
double diagonalization_residual_trig(int grid);

/// Runs the structural property suites:
///   - Cauchy-Riemann diagonalization residual at `grid` and 2*grid
///     (threshold 1e-2, convergence factor >= 3),
///   - kernel Lp norm vs analytic bound for p in {1,2}, t in {0.5,1,4},
///     constant k and k in [1,2] (equality to 1e-3 for constant k),
///   - discrete energy balance of the perturbed heat step (monotone sigma;
///     per-step balance 5% at half the stability bound, 1% at 1/8 of that),
///   - energy decomposition identity on 50 random flows at 64^2 plus the
///     Cauchy-Schwarz bound on the cross term,
///   - semigroup contraction in L2.
std::vector<CheckResult> run_property_checks(int grid, uint64_t seed);

}  // namespace flowref
