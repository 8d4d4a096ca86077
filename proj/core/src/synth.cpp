#include "flowref/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "flowref/gaussian.hpp"
#include "flowref/parallel.hpp"

namespace flowref {

OseenSpec OseenSpec::standard_pair(int size) {
  const double s = size / 500.0;
  OseenSpec spec;
  spec.width = size;
  spec.height = size;
  spec.core_radius = 15.0 * s;
  spec.vortices = {{166.7 * s, 250.0 * s, 7000.0 * s},
                   {333.3 * s, 250.0 * s, -7000.0 * s}};
  return spec;
}

void OseenSpec::validate() const {
  if (width < 3 || height < 3)
    throw std::invalid_argument("OseenSpec: grid must be at least 3x3");
  if (!(core_radius > 0.0))
    throw std::invalid_argument("OseenSpec: core_radius must be positive");
  for (const auto& v : vortices) {
    if (v.cx < 0 || v.cx > width - 1 || v.cy < 0 || v.cy > height - 1)
      throw std::invalid_argument("OseenSpec: vortex centre outside grid");
  }
}

FlowField oseen_flow(const OseenSpec& spec) {
  spec.validate();
  FlowField w(spec.width, spec.height);
  const double r02 = spec.core_radius * spec.core_radius;
  const double two_pi = 2.0 * std::numbers::pi;
  parallel_rows(0, spec.height, [&](int y) {
    for (int x = 0; x < spec.width; ++x) {
      double u = 0.0, v = 0.0;
      for (const auto& vx : spec.vortices) {
        const double ox = x - vx.cx;
        const double oy = y - vx.cy;
        const double r2 = ox * ox + oy * oy;
        // v_theta / r = (Gamma / 2 pi) * (1 - exp(-r^2/r0^2)) / r^2,
        // finite at the centre with limit 1/r0^2.
        const double s = r2 / r02;
        const double g = (s < 1e-12) ? (1.0 - 0.5 * s) / r02
                                     : -std::expm1(-s) / r2;
        const double coef = vx.gamma / two_pi * g;
        u += -coef * oy;
        v += coef * ox;
      }
      w.u.at(x, y) = u;
      w.v.at(x, y) = v;
    }
  });
  return w;
}

ScalarField particle_texture(int width, int height, double density,
                             uint64_t seed, double blob_sigma) {
  if (density < 0.0 || density > 1.0)
    throw std::invalid_argument("particle_texture: density must lie in [0, 1]");
  ScalarField img(width, height);
  if (density == 0.0) return img;

  // Layout drawn up-front, single-threaded, so the image is seed-exact.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, width);
  std::uniform_real_distribution<double> uy(0.0, height);
  std::uniform_real_distribution<double> ua(0.5, 1.0);
  const long n = std::lround(density * width * height);

  const int radius = static_cast<int>(std::ceil(4.0 * blob_sigma));
  const double inv2s2 = 1.0 / (2.0 * blob_sigma * blob_sigma);
  for (long i = 0; i < n; ++i) {
    const double cx = ux(rng);
    const double cy = uy(rng);
    const double amp = ua(rng);
    const int x0 = std::max(0, static_cast<int>(cx) - radius);
    const int x1 = std::min(width - 1, static_cast<int>(cx) + radius);
    const int y0 = std::max(0, static_cast<int>(cy) - radius);
    const int y1 = std::min(height - 1, static_cast<int>(cy) + radius);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        const double dx = x - cx, dy = y - cy;
        img.at(x, y) += amp * std::exp(-(dx * dx + dy * dy) * inv2s2);
      }
  }
  for (double& v : img.data()) v = std::min(1.0, v);
  return img;
}

ScalarField advect_image(const ScalarField& f, const FlowField& w, double dt) {
  if (!f.same_shape(w.u))
    throw std::invalid_argument("advect_image: image/flow shape mismatch");
  ScalarField out(f.width(), f.height(), 0.0, f.dx(), f.dy());
  parallel_rows(0, f.height(), [&](int y) {
    for (int x = 0; x < f.width(); ++x) {
      const double sx = x - w.u.at(x, y) * dt;
      const double sy = y - w.v.at(x, y) * dt;
      const int ix = static_cast<int>(std::floor(sx));
      const int iy = static_cast<int>(std::floor(sy));
      const double fx = sx - ix;
      const double fy = sy - iy;
      const double v00 = f.at_or_zero(ix, iy);
      const double v10 = f.at_or_zero(ix + 1, iy);
      const double v01 = f.at_or_zero(ix, iy + 1);
      const double v11 = f.at_or_zero(ix + 1, iy + 1);
      out.at(x, y) = (1 - fx) * (1 - fy) * v00 + fx * (1 - fy) * v10 +
                     (1 - fx) * fy * v01 + fx * fy * v11;
    }
  });
  return out;
}

FlowField cloud_flow(int width, int height, int n_vortices, double core_radius,
                     double strength_std, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.1 * width, 0.9 * width);
  std::uniform_real_distribution<double> uy(0.1 * height, 0.9 * height);
  std::normal_distribution<double> gs(0.0, strength_std);
  OseenSpec spec;
  spec.width = width;
  spec.height = height;
  spec.core_radius = core_radius;
  for (int i = 0; i < n_vortices; ++i)
    spec.vortices.push_back({ux(rng), uy(rng), gs(rng)});
  return oseen_flow(spec);
}

ScalarField smooth_noise_texture(int width, int height, double sigma,
                                 uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  ScalarField noise(width, height);
  for (double& v : noise.data()) v = u01(rng);
  ScalarField smooth = gaussian_blur(noise, sigma);
  const double lo = smooth.min(), hi = smooth.max();
  const double span = (hi > lo) ? hi - lo : 1.0;
  for (double& v : smooth.data()) v = (v - lo) / span;
  return smooth;
}

}  // namespace flowref
