#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "flowref/fd_ops.hpp"
#include "flowref/field.hpp"
#include "flowref/synth.hpp"

using namespace flowref;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField make_field(int n, double (*fn)(double, double), double h = 1.0) {
  ScalarField s(n, n, 0.0, h, h);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) s.at(x, y) = fn(x * h, y * h);
  return s;
}

}  // namespace

TEST_CASE("gradient of constant field is zero") {
  const ScalarField s(16, 16, 3.7);
  auto [gx, gy] = gradient(s);
  CHECK(gx.max_abs() == doctest::Approx(0.0));
  CHECK(gy.max_abs() == doctest::Approx(0.0));
}

TEST_CASE("gradient of linear ramp is one, including boundary stencils") {
  const ScalarField s = make_field(16, [](double x, double) { return x; });
  auto [gx, gy] = gradient(s);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      CHECK(gx.at(x, y) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(gy.at(x, y) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("central difference is exact on quadratics: d/dx x^2 at x=10 is 20") {
  const ScalarField s = make_field(32, [](double x, double) { return x * x; });
  auto [gx, gy] = gradient(s);
  // (s(11) - s(9)) / 2 = (121 - 81) / 2
  CHECK(gx.at(10, 5) == doctest::Approx(20.0).epsilon(1e-14));
}

TEST_CASE("gradient rejects grids below 3x3") {
  CHECK_THROWS_AS((void)gradient(ScalarField(2, 5)), std::invalid_argument);
  CHECK_THROWS_AS((void)gradient(ScalarField(5, 2)), std::invalid_argument);
}

TEST_CASE("divergence of constant flow is zero") {
  FlowField w(12, 12);
  w.u.fill(3.0);
  w.v.fill(-2.0);
  CHECK(divergence(w).max_abs() == doctest::Approx(0.0));
}

TEST_CASE("divergence of identity field is two") {
  FlowField w(16, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      w.u.at(x, y) = x;
      w.v.at(x, y) = y;
    }
  const ScalarField d = divergence(w);
  for (int y = 1; y < 15; ++y)
    for (int x = 1; x < 15; ++x)
      CHECK(d.at(x, y) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("Oseen vortex pair is discretely divergence-free to 1e-2") {
  const FlowField w = oseen_flow(OseenSpec::standard_pair(500));
  const ScalarField d = divergence(w);
  double max_abs = 0.0;
  for (int y = 1; y < 499; ++y)
    for (int x = 1; x < 499; ++x) max_abs = std::max(max_abs, std::abs(d.at(x, y)));
  CHECK(max_abs <= 1e-2);
}

TEST_CASE("curl sign convention: rigid rotation u=-y, v=x has curl -2") {
  FlowField w(16, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      w.u.at(x, y) = -y;
      w.v.at(x, y) = x;
    }
  const ScalarField c = curl(w);
  for (int y = 1; y < 15; ++y)
    for (int x = 1; x < 15; ++x)
      CHECK(c.at(x, y) == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("curl at an Oseen vortex core matches -Gamma/(pi r0^2) within 1%") {
  OseenSpec spec;
  spec.width = spec.height = 201;
  spec.core_radius = 15.0;
  spec.vortices = {{100.0, 100.0, 7000.0}};  // centre on a pixel
  const FlowField w = oseen_flow(spec);
  const double expected = -7000.0 / (kPi * 15.0 * 15.0);  // ~ -9.903
  CHECK(curl(w).at(100, 100) ==
        doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("orthogonal gradient basics") {
  const ScalarField c(8, 8, 1.0);
  auto [a0, b0] = orthogonal_gradient(c);
  CHECK(a0.max_abs() == doctest::Approx(0.0));
  CHECK(b0.max_abs() == doctest::Approx(0.0));

  const ScalarField sy = make_field(8, [](double, double y) { return y; });
  auto [a1, b1] = orthogonal_gradient(sy);
  CHECK(a1.at(4, 4) == doctest::Approx(1.0));
  CHECK(b1.at(4, 4) == doctest::Approx(0.0));

  const ScalarField sx = make_field(8, [](double x, double) { return x; });
  auto [a2, b2] = orthogonal_gradient(sx);
  CHECK(a2.at(4, 4) == doctest::Approx(0.0));
  CHECK(b2.at(4, 4) == doctest::Approx(-1.0));
}

TEST_CASE("laplacian9 reproduces the analytic Laplacian of x^2+y^2") {
  const ScalarField s =
      make_field(16, [](double x, double y) { return x * x + y * y; });
  const ScalarField l = laplacian9(s);
  for (int y = 1; y < 15; ++y)
    for (int x = 1; x < 15; ++x)
      CHECK(l.at(x, y) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("laplacian9 stencil weights via a centred delta") {
  ScalarField s(5, 5);
  s.at(2, 2) = 1.0;
  const ScalarField l = laplacian9(s);
  CHECK(l.at(2, 2) == doctest::Approx(-20.0 / 6.0));
  CHECK(l.at(1, 2) == doctest::Approx(4.0 / 6.0));
  CHECK(l.at(2, 1) == doctest::Approx(4.0 / 6.0));
  CHECK(l.at(1, 1) == doctest::Approx(1.0 / 6.0));
  CHECK(l.at(3, 3) == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("laplacian9 of an affine field vanishes in the interior") {
  const ScalarField s =
      make_field(12, [](double x, double y) { return 2.0 * x - 3.0 * y + 1.0; });
  const ScalarField l = laplacian9(s);
  for (int y = 1; y < 11; ++y)
    for (int x = 1; x < 11; ++x)
      CHECK(l.at(x, y) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("operators are linear to near machine precision") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField s1(20, 20), s2(20, 20);
  for (double& v : s1.data()) v = u(rng);
  for (double& v : s2.data()) v = u(rng);
  const double a = 2.25, b = -0.75;

  ScalarField combo(20, 20);
  for (size_t i = 0; i < combo.data().size(); ++i)
    combo.data()[i] = a * s1.data()[i] + b * s2.data()[i];

  auto [cx, cy] = gradient(combo);
  auto [g1x, g1y] = gradient(s1);
  auto [g2x, g2y] = gradient(s2);
  const ScalarField l = laplacian9(combo);
  const ScalarField l1 = laplacian9(s1);
  const ScalarField l2 = laplacian9(s2);
  double worst = 0.0;
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 20; ++x) {
      worst = std::max(worst, std::abs(cx.at(x, y) - (a * g1x.at(x, y) + b * g2x.at(x, y))));
      worst = std::max(worst, std::abs(cy.at(x, y) - (a * g1y.at(x, y) + b * g2y.at(x, y))));
      worst = std::max(worst, std::abs(l.at(x, y) - (a * l1.at(x, y) + b * l2.at(x, y))));
    }
  CHECK(worst <= 1e-12 * std::max(1.0, l.max_abs()));
}

TEST_CASE("mixed identities div(orth-grad) and curl(grad) vanish") {
  // The directional difference operators act on disjoint indices, so they
  // commute exactly (one-sided rows included) and the identities hold to
  // rounding, well inside the O(h^2) envelope.
  auto residual = [](int n) {
    const double h = 1.0 / (n - 1);
    ScalarField s(n, n, 0.0, h, h);
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x)
        s.at(x, y) = std::sin(2.0 * kPi * x * h) * std::cos(kPi * y * h);
    auto [hx, hy] = orthogonal_gradient(s);
    const ScalarField d = divergence(FlowField(hx, hy));
    auto [gx, gy] = gradient(s);
    const ScalarField c = curl(FlowField(gx, gy));
    return std::max(d.l2_norm(), c.l2_norm());
  };
  CHECK(residual(64) <= 10.0 * (1.0 / 63.0) * (1.0 / 63.0));
  CHECK(residual(64) <= 1e-10);
  CHECK(residual(128) <= 1e-10);
}

TEST_CASE("field invariants: finite data and shape checks") {
  ScalarField s(8, 8, 1.0);
  CHECK(s.all_finite());
  s.at(3, 3) = std::numeric_limits<double>::infinity();
  CHECK_FALSE(s.all_finite());
  CHECK_THROWS_AS(ScalarField(0, 4), std::invalid_argument);
  CHECK_THROWS_AS(ScalarField(4, 4, 0.0, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(
      ScalarField::from_data(3, 3, std::vector<double>(8, 0.0)),
      std::invalid_argument);
  CHECK_THROWS_AS(FlowField(ScalarField(3, 4), ScalarField(4, 3)),
                  std::invalid_argument);
}
