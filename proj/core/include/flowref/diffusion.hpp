#pragma once

#include "flowref/field.hpp"

namespace flowref {

/// Image-dependent weight selector for k = 1 + a0 * phi(f).
/// image_squared expects f normalized to [0, 1].
enum class Phi { image_squared, one };

inline double phi_value(Phi phi, double f) {
  return phi == Phi::image_squared ? f * f : 1.0;
}

/// Multiplicative perturbation field k = 1 + a0 * phi(f), together with its
/// bounds a1 = min k, a2 = max k. k is strictly positive by construction.
struct PerturbationField {
  ScalarField k;
  double a1 = 1.0;
  double a2 = 1.0;

  static PerturbationField from_image(const ScalarField& f_normalized, double a0,
                                      Phi phi = Phi::image_squared);
  static PerturbationField constant(double value, int width, int height,
                                    double dx = 1.0, double dy = 1.0);
  void validate() const;
};

/// Largest stable explicit step for the five-point heat scheme:
/// dx^2 dy^2 / (2 (dx^2 + dy^2)).
double heat_step_max_dt(double dx, double dy);

/// Stability bound for the perturbed scheme, the heat bound divided by max k.
double kdelta_step_max_dt(const PerturbationField& k);

/// One explicit Euler step of d(xi)/dt = Laplacian(xi) with Dirichlet-zero
/// boundary (boundary pixels are held at 0). Throws StabilityError when dt
/// exceeds the bound.
ScalarField heat_step(const ScalarField& xi, double dt);

/// One explicit Euler step of d(eta)/dt = k * Laplacian(eta), Dirichlet-zero.
ScalarField kdelta_step(const ScalarField& eta, const PerturbationField& k,
                        double dt);

/// Diffusion kernel of the operator k*Laplacian at offset (x, y):
///   G_k = (1 / (4 pi k t)) exp(-(x^2 + y^2) / (4 k t)).
double gaussian_kernel_gk(double x, double y, double t, double k_at_x);

struct KernelNormCheck {
  double norm = 0.0;   ///< quadrature Lp norm of G_k(., t)
  double bound = 0.0;  ///< analytic bound C_k t^((1-p)/p)
};

/// Numerically integrates ||G_k(., t)||_p over R^2 (midpoint quadrature on a
/// truncated box; k sampled from the field by clamped bilinear interpolation
/// about its centre) and returns it with the analytic bound
///   C_k = (1 / (4 pi a1)) (4 pi a2 / p)^(1/p).
KernelNormCheck kernel_norm_bound_check(const PerturbationField& k, double p,
                                        double t);

/// Semigroup map S(t): discrete convolution with G_k, k evaluated at the
/// output pixel. The discrete kernel is truncated where the Gaussian tail
/// mass drops below 1e-6 (radius from max k) and normalized to unit mass, so
/// S(t) is averaging for every t; samples outside the domain read 0.
/// t = 0 returns s unchanged.
ScalarField semigroup_apply(const ScalarField& s, const PerturbationField& k,
                            double t);

/// Positive linear integral operator G_m with n = 2:
///   (m / (4 pi k(x))) * integral s(y) exp(-(m / 4 k(x)) |x-y|^2) dy,
/// discretized like semigroup_apply. Equals S(1/m) for matching k.
ScalarField anisotropic_integral_operator(const ScalarField& s,
                                          const PerturbationField& k, int m);

/// sigma = 0.5 * sum (1/k) eta^2 dx dy, the weighted half squared norm whose
/// dissipation the explicit step balances against the gradient form.
double sigma_weighted(const ScalarField& eta, const PerturbationField& k);

/// Forward-difference Dirichlet form sum |grad eta|^2 dx dy. Exactly
/// summation-by-parts compatible with the five-point Laplacian when eta
/// vanishes on the boundary.
double dirichlet_form(const ScalarField& eta);

}  // namespace flowref
