#include "flowref/fd_ops.hpp"

#include <stdexcept>

#include "flowref/parallel.hpp"

namespace flowref {

namespace {

void require_min_size(const ScalarField& s, const char* op) {
  if (s.width() < 3 || s.height() < 3)
    throw std::invalid_argument(std::string(op) + ": grid must be at least 3x3");
}

// Second-order d/dx along one row: central interior, one-sided at ends.
inline double ddx(const ScalarField& s, int x, int y) {
  const int w = s.width();
  const double inv2 = 1.0 / (2.0 * s.dx());
  if (x == 0) return (-3.0 * s.at(0, y) + 4.0 * s.at(1, y) - s.at(2, y)) * inv2;
  if (x == w - 1)
    return (3.0 * s.at(w - 1, y) - 4.0 * s.at(w - 2, y) + s.at(w - 3, y)) * inv2;
  return (s.at(x + 1, y) - s.at(x - 1, y)) * inv2;
}

inline double ddy(const ScalarField& s, int x, int y) {
  const int h = s.height();
  const double inv2 = 1.0 / (2.0 * s.dy());
  if (y == 0) return (-3.0 * s.at(x, 0) + 4.0 * s.at(x, 1) - s.at(x, 2)) * inv2;
  if (y == h - 1)
    return (3.0 * s.at(x, h - 1) - 4.0 * s.at(x, h - 2) + s.at(x, h - 3)) * inv2;
  return (s.at(x, y + 1) - s.at(x, y - 1)) * inv2;
}

}  // namespace

std::pair<ScalarField, ScalarField> gradient(const ScalarField& s) {
  require_min_size(s, "gradient");
  ScalarField gx(s.width(), s.height(), 0.0, s.dx(), s.dy());
  ScalarField gy(s.width(), s.height(), 0.0, s.dx(), s.dy());
  parallel_rows(0, s.height(), [&](int y) {
    for (int x = 0; x < s.width(); ++x) {
      gx.at(x, y) = ddx(s, x, y);
      gy.at(x, y) = ddy(s, x, y);
    }
  });
  return {std::move(gx), std::move(gy)};
}

ScalarField divergence(const FlowField& w) {
  if (!w.u.same_shape(w.v))
    throw std::invalid_argument("divergence: component shape mismatch");
  require_min_size(w.u, "divergence");
  ScalarField d(w.width(), w.height(), 0.0, w.u.dx(), w.u.dy());
  parallel_rows(0, w.height(), [&](int y) {
    for (int x = 0; x < w.width(); ++x)
      d.at(x, y) = ddx(w.u, x, y) + ddy(w.v, x, y);
  });
  return d;
}

ScalarField curl(const FlowField& w) {
  if (!w.u.same_shape(w.v))
    throw std::invalid_argument("curl: component shape mismatch");
  require_min_size(w.u, "curl");
  ScalarField c(w.width(), w.height(), 0.0, w.u.dx(), w.u.dy());
  parallel_rows(0, w.height(), [&](int y) {
    for (int x = 0; x < w.width(); ++x)
      c.at(x, y) = ddy(w.u, x, y) - ddx(w.v, x, y);
  });
  return c;
}

std::pair<ScalarField, ScalarField> orthogonal_gradient(const ScalarField& s) {
  require_min_size(s, "orthogonal_gradient");
  ScalarField gy(s.width(), s.height(), 0.0, s.dx(), s.dy());
  ScalarField mgx(s.width(), s.height(), 0.0, s.dx(), s.dy());
  parallel_rows(0, s.height(), [&](int y) {
    for (int x = 0; x < s.width(); ++x) {
      gy.at(x, y) = ddy(s, x, y);
      mgx.at(x, y) = -ddx(s, x, y);
    }
  });
  return {std::move(gy), std::move(mgx)};
}

ScalarField laplacian9(const ScalarField& s) {
  require_min_size(s, "laplacian9");
  if (s.dx() != s.dy())
    throw std::invalid_argument("laplacian9: requires dx == dy");
  const double scale = 1.0 / (6.0 * s.dx() * s.dx());
  ScalarField out(s.width(), s.height(), 0.0, s.dx(), s.dy());
  parallel_rows(0, s.height(), [&](int y) {
    for (int x = 0; x < s.width(); ++x) {
      const double axis = s.at_or_zero(x - 1, y) + s.at_or_zero(x + 1, y) +
                          s.at_or_zero(x, y - 1) + s.at_or_zero(x, y + 1);
      const double diag = s.at_or_zero(x - 1, y - 1) + s.at_or_zero(x + 1, y - 1) +
                          s.at_or_zero(x - 1, y + 1) + s.at_or_zero(x + 1, y + 1);
      out.at(x, y) = scale * (4.0 * axis + diag - 20.0 * s.at(x, y));
    }
  });
  return out;
}

ScalarField laplacian5(const ScalarField& s) {
  require_min_size(s, "laplacian5");
  const double ix2 = 1.0 / (s.dx() * s.dx());
  const double iy2 = 1.0 / (s.dy() * s.dy());
  ScalarField out(s.width(), s.height(), 0.0, s.dx(), s.dy());
  parallel_rows(0, s.height(), [&](int y) {
    for (int x = 0; x < s.width(); ++x) {
      out.at(x, y) =
          (s.at_or_zero(x - 1, y) - 2.0 * s.at(x, y) + s.at_or_zero(x + 1, y)) * ix2 +
          (s.at_or_zero(x, y - 1) - 2.0 * s.at(x, y) + s.at_or_zero(x, y + 1)) * iy2;
    }
  });
  return out;
}

ScalarField local_average9(const ScalarField& s, bool dirichlet) {
  require_min_size(s, "local_average9");
  const int w = s.width(), h = s.height();
  auto reflect = [](int i, int n) {
    if (i < 0) return -i;
    if (i >= n) return 2 * n - 2 - i;
    return i;
  };
  ScalarField out(w, h, 0.0, s.dx(), s.dy());
  parallel_rows(0, h, [&](int y) {
    for (int x = 0; x < w; ++x) {
      auto sample = [&](int i, int j) {
        if (dirichlet) return s.at_or_zero(i, j);
        return s.at(reflect(i, w), reflect(j, h));
      };
      const double axis =
          sample(x - 1, y) + sample(x + 1, y) + sample(x, y - 1) + sample(x, y + 1);
      const double diag = sample(x - 1, y - 1) + sample(x + 1, y - 1) +
                          sample(x - 1, y + 1) + sample(x + 1, y + 1);
      out.at(x, y) = (4.0 * axis + diag) / 20.0;
    }
  });
  return out;
}

}  // namespace flowref
