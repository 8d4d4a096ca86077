#include "flowref/hs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flowref/fd_ops.hpp"
#include "flowref/gaussian.hpp"
#include "flowref/parallel.hpp"

namespace flowref {

ImageDerivs image_derivatives(const ScalarField& f1, const ScalarField& f2) {
  if (!f1.same_shape(f2))
    throw std::invalid_argument("image_derivatives: frame shape mismatch");
  auto [g1x, g1y] = gradient(f1);
  auto [g2x, g2y] = gradient(f2);
  ImageDerivs d{std::move(g1x), std::move(g1y),
                ScalarField(f1.width(), f1.height(), 0.0, f1.dx(), f1.dy())};
  for (size_t i = 0; i < d.fx.data().size(); ++i) {
    d.fx.data()[i] = 0.5 * (d.fx.data()[i] + g2x.data()[i]);
    d.fy.data()[i] = 0.5 * (d.fy.data()[i] + g2y.data()[i]);
    d.ft.data()[i] = f2.data()[i] - f1.data()[i];
  }
  return d;
}

FlowField hs_sweep(const FlowField& w, const ImageDerivs& d, double alpha) {
  const ScalarField ubar = local_average9(w.u, /*dirichlet=*/false);
  const ScalarField vbar = local_average9(w.v, /*dirichlet=*/false);
  FlowField next(w.width(), w.height(), w.u.dx(), w.u.dy());
  parallel_rows(0, w.height(), [&](int y) {
    for (int x = 0; x < w.width(); ++x) {
      const double fx = d.fx.at(x, y);
      const double fy = d.fy.at(x, y);
      const double ft = d.ft.at(x, y);
      const double ub = ubar.at(x, y);
      const double vb = vbar.at(x, y);
      const double t = (fx * ub + fy * vb + ft) / (alpha + fx * fx + fy * fy);
      next.u.at(x, y) = ub - fx * t;
      next.v.at(x, y) = vb - fy * t;
    }
  });
  return next;
}

HsResult hs_solve(const ScalarField& f1, const ScalarField& f2,
                  const HsConfig& cfg) {
  if (!(cfg.alpha > 0.0)) throw std::invalid_argument("hs_solve: alpha must be > 0");
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("hs_solve: tol must be > 0");

  const ScalarField s1 = gaussian_blur(f1, cfg.presmooth_sigma);
  const ScalarField s2 = gaussian_blur(f2, cfg.presmooth_sigma);
  const ImageDerivs d = image_derivatives(s1, s2);

  HsResult res;
  res.flow = FlowField(f1.width(), f1.height(), f1.dx(), f1.dy());
  for (int it = 1; it <= cfg.max_iters; ++it) {
    FlowField next = hs_sweep(res.flow, d, cfg.alpha);
    double max_update = 0.0, max_mag = 0.0;
    for (size_t i = 0; i < next.u.data().size(); ++i) {
      max_update = std::max(max_update,
                            std::abs(next.u.data()[i] - res.flow.u.data()[i]));
      max_update = std::max(max_update,
                            std::abs(next.v.data()[i] - res.flow.v.data()[i]));
      max_mag = std::max(max_mag, std::abs(next.u.data()[i]));
      max_mag = std::max(max_mag, std::abs(next.v.data()[i]));
    }
    res.flow = std::move(next);
    res.iters = it;
    res.final_update = max_update / std::max(max_mag, 1e-30);
    if (res.final_update < cfg.tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace flowref
