#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace flowref {

/// A 2-D grid of real samples with uniform spacing. Storage is row-major,
/// index (x, y) -> y * width + x; that layout is fixed so file I/O is
/// bit-exact across platforms.
class ScalarField {
 public:
  ScalarField() = default;

  ScalarField(int width, int height, double fill = 0.0, double dx = 1.0,
              double dy = 1.0)
      : width_(width), height_(height), dx_(dx), dy_(dy),
        data_(static_cast<size_t>(width) * height, fill) {
    if (width <= 0 || height <= 0)
      throw std::invalid_argument("ScalarField: dimensions must be positive");
    if (!(dx > 0.0) || !(dy > 0.0))
      throw std::invalid_argument("ScalarField: grid spacing must be positive");
  }

  static ScalarField from_data(int width, int height, std::vector<double> data,
                               double dx = 1.0, double dy = 1.0) {
    ScalarField s(width, height, 0.0, dx, dy);
    if (data.size() != s.data_.size())
      throw std::invalid_argument("ScalarField: data length != width*height");
    s.data_ = std::move(data);
    return s;
  }

  int width() const { return width_; }
  int height() const { return height_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  size_t size() const { return data_.size(); }

  double& at(int x, int y) {
    assert(in_bounds(x, y));
    return data_[static_cast<size_t>(y) * width_ + x];
  }
  double at(int x, int y) const {
    assert(in_bounds(x, y));
    return data_[static_cast<size_t>(y) * width_ + x];
  }
  /// Reads (x, y), returning 0 outside the domain (Dirichlet ghost value).
  double at_or_zero(int x, int y) const {
    return in_bounds(x, y) ? data_[static_cast<size_t>(y) * width_ + x] : 0.0;
  }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width_ && y >= 0 && y < height_;
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool same_shape(const ScalarField& o) const {
    return width_ == o.width_ && height_ == o.height_ && dx_ == o.dx_ &&
           dy_ == o.dy_;
  }

  void fill(double v) { data_.assign(data_.size(), v); }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  double min() const {
    double m = data_.empty() ? 0.0 : data_[0];
    for (double v : data_) m = std::min(m, v);
    return m;
  }
  double max() const {
    double m = data_.empty() ? 0.0 : data_[0];
    for (double v : data_) m = std::max(m, v);
    return m;
  }
  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }
  double sum() const {
    double s = 0.0;
    for (double v : data_) s += v;
    return s;
  }
  double mean() const { return data_.empty() ? 0.0 : sum() / data_.size(); }

  /// Discrete L2 norm with the cell measure: sqrt(sum s^2 dx dy).
  double l2_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s * dx_ * dy_);
  }
  double rms() const {
    if (data_.empty()) return 0.0;
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s / data_.size());
  }

  /// L2 inner product <a, b> = sum a b dx dy.
  static double dot(const ScalarField& a, const ScalarField& b) {
    if (!a.same_shape(b))
      throw std::invalid_argument("ScalarField::dot: shape mismatch");
    double s = 0.0;
    for (size_t i = 0; i < a.data_.size(); ++i) s += a.data_[i] * b.data_[i];
    return s * a.dx_ * a.dy_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  double dx_ = 1.0;
  double dy_ = 1.0;
  std::vector<double> data_;
};

/// A velocity field (u, v) on a common grid; u is the x-component.
struct FlowField {
  ScalarField u;
  ScalarField v;

  FlowField() = default;
  FlowField(ScalarField u_, ScalarField v_) : u(std::move(u_)), v(std::move(v_)) {
    if (!u.same_shape(v))
      throw std::invalid_argument("FlowField: u and v must share shape/spacing");
  }
  FlowField(int width, int height, double dx = 1.0, double dy = 1.0)
      : u(width, height, 0.0, dx, dy), v(width, height, 0.0, dx, dy) {}

  int width() const { return u.width(); }
  int height() const { return u.height(); }
  bool same_shape(const FlowField& o) const { return u.same_shape(o.u); }
  bool all_finite() const { return u.all_finite() && v.all_finite(); }

  /// Zeroes the outermost ring of pixels (homogeneous Dirichlet boundary).
  void zero_boundary() {
    const int w = width(), h = height();
    for (int x = 0; x < w; ++x) {
      u.at(x, 0) = v.at(x, 0) = 0.0;
      u.at(x, h - 1) = v.at(x, h - 1) = 0.0;
    }
    for (int y = 0; y < h; ++y) {
      u.at(0, y) = v.at(0, y) = 0.0;
      u.at(w - 1, y) = v.at(w - 1, y) = 0.0;
    }
  }
};

}  // namespace flowref
