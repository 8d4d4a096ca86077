#include "flowref/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "flowref/errors.hpp"
#include "flowref/fd_ops.hpp"
#include "flowref/parallel.hpp"

namespace flowref {

namespace {
constexpr double kPi = std::numbers::pi;
// exp(-R^2 / (4 k t)) < 1e-6  =>  R = sqrt(4 k t ln(1e6)).
constexpr double kTailLog = 13.815510557964274;  // ln(1e6)
}  // namespace

PerturbationField PerturbationField::from_image(const ScalarField& f, double a0,
                                                Phi phi) {
  if (!(a0 > 0.0))
    throw std::invalid_argument("PerturbationField: a0 must be positive");
  PerturbationField p;
  p.k = ScalarField(f.width(), f.height(), 0.0, f.dx(), f.dy());
  for (size_t i = 0; i < f.data().size(); ++i)
    p.k.data()[i] = 1.0 + a0 * phi_value(phi, f.data()[i]);
  p.a1 = p.k.min();
  p.a2 = p.k.max();
  p.validate();
  return p;
}

PerturbationField PerturbationField::constant(double value, int width,
                                              int height, double dx, double dy) {
  PerturbationField p;
  p.k = ScalarField(width, height, value, dx, dy);
  p.a1 = p.a2 = value;
  p.validate();
  return p;
}

void PerturbationField::validate() const {
  if (!(a1 > 0.0))
    throw std::invalid_argument("PerturbationField: k must be strictly positive");
  if (a2 < a1) throw std::invalid_argument("PerturbationField: a2 < a1");
}

double heat_step_max_dt(double dx, double dy) {
  return dx * dx * dy * dy / (2.0 * (dx * dx + dy * dy));
}

double kdelta_step_max_dt(const PerturbationField& k) {
  return heat_step_max_dt(k.k.dx(), k.k.dy()) / k.a2;
}

namespace {

ScalarField explicit_step(const ScalarField& s, const ScalarField* k, double dt) {
  const ScalarField lap = laplacian5(s);
  ScalarField out(s.width(), s.height(), 0.0, s.dx(), s.dy());
  const int w = s.width(), h = s.height();
  parallel_rows(1, h - 1, [&](int y) {
    for (int x = 1; x < w - 1; ++x) {
      const double coef = k ? k->at(x, y) : 1.0;
      out.at(x, y) = s.at(x, y) + dt * coef * lap.at(x, y);
    }
  });
  return out;  // boundary pixels stay 0 (Dirichlet)
}

}  // namespace

ScalarField heat_step(const ScalarField& xi, double dt) {
  const double bound = heat_step_max_dt(xi.dx(), xi.dy());
  if (dt > bound * (1.0 + 1e-12))
    throw StabilityError("heat_step: dt exceeds stability bound");
  return explicit_step(xi, nullptr, dt);
}

ScalarField kdelta_step(const ScalarField& eta, const PerturbationField& k,
                        double dt) {
  if (!eta.same_shape(k.k))
    throw std::invalid_argument("kdelta_step: field/k shape mismatch");
  const double bound = kdelta_step_max_dt(k);
  if (dt > bound * (1.0 + 1e-12))
    throw StabilityError("kdelta_step: dt exceeds stability bound");
  return explicit_step(eta, &k.k, dt);
}

double gaussian_kernel_gk(double x, double y, double t, double k_at_x) {
  if (!(t > 0.0)) throw std::invalid_argument("gaussian_kernel_gk: t must be > 0");
  if (!(k_at_x > 0.0))
    throw std::invalid_argument("gaussian_kernel_gk: k must be > 0");
  const double denom = 4.0 * k_at_x * t;
  return std::exp(-(x * x + y * y) / denom) / (kPi * denom);
}

KernelNormCheck kernel_norm_bound_check(const PerturbationField& k, double p,
                                        double t) {
  if (!(p >= 1.0))
    throw std::invalid_argument("kernel_norm_bound_check: p must be >= 1");
  if (!(t > 0.0))
    throw std::invalid_argument("kernel_norm_bound_check: t must be > 0");

  // Quadrature domain: square where even the widest Gaussian has tail mass
  // below ~1e-12; step resolves the narrowest one.
  const double radius = std::sqrt(4.0 * k.a2 * t * 2.0 * kTailLog);
  const double sigma_min = std::sqrt(2.0 * k.a1 * t);
  const double hq = sigma_min / 16.0;
  const long n = std::lround(std::ceil(radius / hq));
  if (n > 40000)
    throw std::runtime_error(
        "kernel_norm_bound_check: quadrature grid too large for parameters");

  // k(x) off-grid: bilinear sample about the field centre, clamped to edges.
  const double cx = 0.5 * (k.k.width() - 1);
  const double cy = 0.5 * (k.k.height() - 1);
  auto k_at = [&](double x, double y) {
    const double gx = std::clamp(cx + x / k.k.dx(), 0.0, double(k.k.width() - 1));
    const double gy = std::clamp(cy + y / k.k.dy(), 0.0, double(k.k.height() - 1));
    const int ix = std::min(static_cast<int>(gx), k.k.width() - 2);
    const int iy = std::min(static_cast<int>(gy), k.k.height() - 2);
    const double fx = gx - ix, fy = gy - iy;
    return (1 - fx) * (1 - fy) * k.k.at(ix, iy) + fx * (1 - fy) * k.k.at(ix + 1, iy) +
           (1 - fx) * fy * k.k.at(ix, iy + 1) + fx * fy * k.k.at(ix + 1, iy + 1);
  };
  const bool constant_k = (k.a1 == k.a2);

  double acc = 0.0;
  for (long j = -n; j < n; ++j) {
    const double y = (j + 0.5) * hq;
    for (long i = -n; i < n; ++i) {
      const double x = (i + 0.5) * hq;
      const double kv = constant_k ? k.a1 : k_at(x, y);
      const double g = gaussian_kernel_gk(x, y, t, kv);
      acc += std::pow(g, p);
    }
  }
  acc *= hq * hq;
  if (!std::isfinite(acc))
    throw std::runtime_error("kernel_norm_bound_check: quadrature failure");

  KernelNormCheck res;
  res.norm = std::pow(acc, 1.0 / p);
  const double ck = (1.0 / (4.0 * kPi * k.a1)) *
                    std::pow(4.0 * kPi * k.a2 / p, 1.0 / p);
  res.bound = ck * std::pow(t, (1.0 - p) / p);
  return res;
}

// Shared discretization for S(t) and G_m: per-output-pixel Gaussian window
// (width set by k at the output pixel) with weights normalized to unit mass,
// zero extension outside the domain.
static ScalarField varying_gaussian_convolve(const ScalarField& s,
                                             const PerturbationField& k,
                                             double t) {
  if (!s.same_shape(k.k))
    throw std::invalid_argument("semigroup_apply: field/k shape mismatch");
  const int w = s.width(), h = s.height();
  const double dx = s.dx(), dy = s.dy();
  // Global truncation radius from the widest kernel (max k).
  const double radius = std::sqrt(4.0 * k.a2 * t * kTailLog);
  const int rx = std::max(1, static_cast<int>(std::ceil(radius / dx)));
  const int ry = std::max(1, static_cast<int>(std::ceil(radius / dy)));

  ScalarField out(w, h, 0.0, dx, dy);
  parallel_rows(0, h, [&](int y) {
    std::vector<double> wx(2 * rx + 1), wy(2 * ry + 1);
    for (int x = 0; x < w; ++x) {
      const double kv = k.k.at(x, y);
      const double inv = 1.0 / (4.0 * kv * t);
      double sx = 0.0, sy = 0.0;
      for (int i = -rx; i <= rx; ++i) {
        wx[i + rx] = std::exp(-(i * dx) * (i * dx) * inv);
        sx += wx[i + rx];
      }
      for (int j = -ry; j <= ry; ++j) {
        wy[j + ry] = std::exp(-(j * dy) * (j * dy) * inv);
        sy += wy[j + ry];
      }
      const double norm = 1.0 / (sx * sy);
      double acc = 0.0;
      for (int j = -ry; j <= ry; ++j) {
        double row = 0.0;
        for (int i = -rx; i <= rx; ++i)
          row += wx[i + rx] * s.at_or_zero(x + i, y + j);
        acc += wy[j + ry] * row;
      }
      out.at(x, y) = acc * norm;
    }
  });
  return out;
}

ScalarField semigroup_apply(const ScalarField& s, const PerturbationField& k,
                            double t) {
  if (t < 0.0) throw std::invalid_argument("semigroup_apply: t must be >= 0");
  if (t == 0.0) return s;
  return varying_gaussian_convolve(s, k, t);
}

ScalarField anisotropic_integral_operator(const ScalarField& s,
                                          const PerturbationField& k, int m) {
  if (m < 1)
    throw std::invalid_argument("anisotropic_integral_operator: m must be >= 1");
  // exponent -(m / 4k)|x-y|^2 matches the S(t) kernel at t = 1/m.
  return varying_gaussian_convolve(s, k, 1.0 / m);
}

double sigma_weighted(const ScalarField& eta, const PerturbationField& k) {
  if (!eta.same_shape(k.k))
    throw std::invalid_argument("sigma_weighted: field/k shape mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < eta.data().size(); ++i)
    acc += eta.data()[i] * eta.data()[i] / k.k.data()[i];
  return 0.5 * acc * eta.dx() * eta.dy();
}

double dirichlet_form(const ScalarField& eta) {
  const int w = eta.width(), h = eta.height();
  const double ix2 = 1.0 / (eta.dx() * eta.dx());
  const double iy2 = 1.0 / (eta.dy() * eta.dy());
  double acc = 0.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x + 1 < w; ++x) {
      const double d = eta.at(x + 1, y) - eta.at(x, y);
      acc += d * d * ix2;
    }
  for (int y = 0; y + 1 < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double d = eta.at(x, y + 1) - eta.at(x, y);
      acc += d * d * iy2;
    }
  return acc * eta.dx() * eta.dy();
}

}  // namespace flowref
