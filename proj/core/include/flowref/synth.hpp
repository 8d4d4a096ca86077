#pragma once

#include <cstdint>
#include <vector>

#include "flowref/field.hpp"

namespace flowref {

/// One Oseen vortex: centre in pixel coordinates, strength Gamma in
/// pixels^2/s (sign sets the sense of rotation).
struct OseenVortex {
  double cx = 0.0;
  double cy = 0.0;
  double gamma = 0.0;
};

/// Specification for a superposition of Oseen vortices on a regular grid.
/// Circumferential speed of each vortex:
///   v_theta(r) = (Gamma / (2 pi r)) * (1 - exp(-r^2 / r0^2)),
/// which tends to 0 at the centre and falls off like 1/r far away.
struct OseenSpec {
  int width = 500;
  int height = 500;
  std::vector<OseenVortex> vortices;
  double core_radius = 15.0;

  /// The counter-rotating pair at (166.7, 250) / (333.3, 250) with
  /// Gamma = +-7000 px^2/s and r0 = 15 px, scaled by size/500 so the peak
  /// speed (~46.95 px/s) is size-independent.
  static OseenSpec standard_pair(int size = 500);

  void validate() const;
};

/// Superposed azimuthal velocity field of the vortices in `spec`.
FlowField oseen_flow(const OseenSpec& spec);

/// Seeded PIV-style particle image: Gaussian blobs of width blob_sigma on a
/// black background, intensities clamped to [0, 1]. Blob count is
/// round(density * width * height). density must lie in [0, 1]; density 0
/// gives an all-zero field. Deterministic for a fixed seed.
ScalarField particle_texture(int width, int height, double density,
                             uint64_t seed, double blob_sigma = 1.5);

/// Backward semi-Lagrangian warp: out(x) = f(x - w(x) dt) with bilinear
/// interpolation; samples outside the domain read 0. Displacements should
/// stay small relative to the grid (<= 5 px recommended).
ScalarField advect_image(const ScalarField& f, const FlowField& w, double dt);

/// Cloud-like flow: n_vortices Oseen vortices at seeded random positions
/// with normally distributed strengths (mean 0, std strength_std).
FlowField cloud_flow(int width, int height, int n_vortices, double core_radius,
                     double strength_std, uint64_t seed);

/// Smoothed random texture in [0, 1] used as the cloud image.
ScalarField smooth_noise_texture(int width, int height, double sigma,
                                 uint64_t seed);

}  // namespace flowref
