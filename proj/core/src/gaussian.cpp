#include "flowref/gaussian.hpp"

#include <cmath>
#include <vector>

#include "flowref/parallel.hpp"

namespace flowref {

namespace {

std::vector<double> kernel_1d(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

inline int reflect(int i, int n) {
  if (i < 0) return -i;
  if (i >= n) return 2 * n - 2 - i;
  return i;
}

}  // namespace

ScalarField gaussian_blur(const ScalarField& s, double sigma) {
  if (sigma <= 0.0) return s;
  const auto k = kernel_1d(sigma);
  const int radius = (static_cast<int>(k.size()) - 1) / 2;
  const int w = s.width(), h = s.height();

  ScalarField tmp(w, h, 0.0, s.dx(), s.dy());
  parallel_rows(0, h, [&](int y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += k[i + radius] * s.at(reflect(x + i, w), y);
      tmp.at(x, y) = acc;
    }
  });

  ScalarField out(w, h, 0.0, s.dx(), s.dy());
  parallel_rows(0, h, [&](int y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += k[i + radius] * tmp.at(x, reflect(y + i, h));
      out.at(x, y) = acc;
    }
  });
  return out;
}

}  // namespace flowref
