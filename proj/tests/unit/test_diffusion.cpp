#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "flowref/diffusion.hpp"
#include "flowref/errors.hpp"
#include "flowref/field.hpp"

using namespace flowref;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField dirichlet_sine(int n, int kx = 1, int ky = 1) {
  ScalarField s(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      s.at(x, y) = std::sin(kPi * kx * x / (n - 1.0)) *
                   std::sin(kPi * ky * y / (n - 1.0));
  return s;
}

}  // namespace

TEST_CASE("heat step of zero stays zero and respects the CFL guard") {
  const ScalarField z(16, 16);
  CHECK(heat_step(z, 0.2).max_abs() == doctest::Approx(0.0));
  CHECK_THROWS_AS((void)heat_step(z, 0.26), StabilityError);
  CHECK(heat_step_max_dt(1.0, 1.0) == doctest::Approx(0.25));
}

TEST_CASE("fundamental sine mode decays at the analytic rate") {
  const int n = 65;
  const double L = n - 1.0;
  ScalarField s = dirichlet_sine(n);
  const double dt = 0.1;
  const int steps = 400;
  for (int i = 0; i < steps; ++i) s = heat_step(s, dt);
  const double measured = s.at(n / 2, n / 2);
  const double analytic = std::exp(-2.0 * kPi * kPi * dt * steps / (L * L));
  CHECK(measured == doctest::Approx(analytic).epsilon(0.01));
}

TEST_CASE("total mass of an interior bump is non-increasing under heat flow") {
  ScalarField s(32, 32);
  for (int y = 12; y < 20; ++y)
    for (int x = 12; x < 20; ++x) s.at(x, y) = 1.0;
  double prev = s.sum();
  for (int i = 0; i < 50; ++i) {
    s = heat_step(s, 0.2);
    CHECK(s.sum() <= prev + 1e-12);
    prev = s.sum();
  }
}

TEST_CASE("kdelta with unit perturbation equals the plain heat step exactly") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField s(24, 24);
  for (double& v : s.data()) v = u(rng);
  const auto k1 = PerturbationField::constant(1.0, 24, 24);
  const ScalarField a = heat_step(s, 0.2);
  const ScalarField b = kdelta_step(s, k1, 0.2);
  CHECK(a.data() == b.data());
}

TEST_CASE("constant field is a fixed point of the interior update") {
  ScalarField s(16, 16, 2.5);
  const auto k = PerturbationField::constant(1.5, 16, 16);
  const ScalarField out = kdelta_step(s, k, 0.1);
  for (int y = 2; y < 14; ++y)
    for (int x = 2; x < 14; ++x)
      CHECK(out.at(x, y) == doctest::Approx(2.5));
}

TEST_CASE("k = 2 doubles the decay rate of the fundamental mode") {
  const int n = 65;
  auto decay = [&](double kval) {
    ScalarField s = dirichlet_sine(n);
    const auto k = PerturbationField::constant(kval, n, n);
    const double dt = 0.05;
    const int steps = 200;
    for (int i = 0; i < steps; ++i) s = kdelta_step(s, k, dt);
    return std::log(s.at(n / 2, n / 2));
  };
  CHECK(decay(2.0) / decay(1.0) == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("kernel value at the origin and radial symmetry") {
  CHECK(gaussian_kernel_gk(0.0, 0.0, 1.0, 1.0) ==
        doctest::Approx(1.0 / (4.0 * kPi)));
  CHECK(gaussian_kernel_gk(1.3, -0.4, 0.7, 1.2) ==
        gaussian_kernel_gk(-1.3, 0.4, 0.7, 1.2));
  CHECK_THROWS_AS((void)gaussian_kernel_gk(0, 0, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)gaussian_kernel_gk(0, 0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("kernel L1 norm is 1 and L2 norm matches the closed form") {
  const auto k1 = PerturbationField::constant(1.0, 8, 8);
  for (double t : {0.5, 1.0, 4.0}) {
    const auto l1 = kernel_norm_bound_check(k1, 1.0, t);
    CHECK(l1.norm == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(l1.bound == doctest::Approx(1.0).epsilon(1e-12));
    const auto l2 = kernel_norm_bound_check(k1, 2.0, t);
    CHECK(l2.norm == doctest::Approx(1.0 / std::sqrt(8.0 * kPi * t)).epsilon(1e-4));
    CHECK(l2.bound ==
          doctest::Approx(std::pow(t, -0.5) / std::sqrt(8.0 * kPi)).epsilon(1e-12));
  }
}

TEST_CASE("varying k in [1,2]: norm stays below the bound C_k = a2/a1 for p=1") {
  PerturbationField k;
  k.k = ScalarField(24, 24);
  for (int y = 0; y < 24; ++y)
    for (int x = 0; x < 24; ++x)
      k.k.at(x, y) = 1.5 + 0.5 * std::sin(0.7 * x) * std::cos(0.5 * y);
  k.a1 = k.k.min();
  k.a2 = k.k.max();
  const auto res = kernel_norm_bound_check(k, 1.0, 1.0);
  CHECK(res.bound == doctest::Approx(k.a2 / k.a1).epsilon(1e-12));
  CHECK(res.norm <= res.bound + 1e-4);
}

TEST_CASE("semigroup: identity at t=0 and L2 contraction") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField s(32, 32);
  for (double& v : s.data()) v = u(rng);
  const auto k = PerturbationField::constant(1.3, 32, 32);
  CHECK(semigroup_apply(s, k, 0.0).data() == s.data());
  for (double t : {1e-3, 0.1, 1.0, 10.0})
    CHECK(semigroup_apply(s, k, t).l2_norm() <= s.l2_norm() * (1.0 + 1e-12));
}

TEST_CASE("approximate semigroup property for constant k") {
  ScalarField s = dirichlet_sine(48, 2, 1);
  const auto k = PerturbationField::constant(1.0, 48, 48);
  const ScalarField two_steps = semigroup_apply(semigroup_apply(s, k, 0.6), k, 0.4);
  const ScalarField one_step = semigroup_apply(s, k, 1.0);
  double diff_sq = 0.0;
  for (size_t i = 0; i < s.data().size(); ++i) {
    const double d = two_steps.data()[i] - one_step.data()[i];
    diff_sq += d * d;
  }
  CHECK(std::sqrt(diff_sq) <= 1e-2 * s.l2_norm());
}

TEST_CASE("integral operator normalizes constants and localizes as m grows") {
  PerturbationField k;
  k.k = ScalarField(32, 32);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x)
      k.k.at(x, y) = 1.2 + 0.6 * std::sin(0.3 * x + 0.2 * y);
  k.a1 = k.k.min();
  k.a2 = k.k.max();

  ScalarField ones(32, 32, 1.0);
  const ScalarField g1 = anisotropic_integral_operator(ones, k, 1);
  for (int y = 10; y < 22; ++y)
    for (int x = 10; x < 22; ++x)
      CHECK(g1.at(x, y) == doctest::Approx(1.0).epsilon(1e-3));

  const ScalarField s = dirichlet_sine(32, 2, 3);
  double prev = 1e300;
  for (int m : {1, 4, 16, 64}) {
    const ScalarField gm = anisotropic_integral_operator(s, k, m);
    double worst = 0.0;
    for (size_t i = 0; i < s.data().size(); ++i)
      worst = std::max(worst, std::abs(gm.data()[i] - s.data()[i]));
    CHECK(worst < prev);
    prev = worst;
  }
}

TEST_CASE("integral operator agrees with S(1/m) for constant k") {
  const auto k = PerturbationField::constant(1.4, 40, 40);
  const ScalarField s = dirichlet_sine(40, 1, 2);
  const ScalarField a = anisotropic_integral_operator(s, k, 4);
  const ScalarField b = semigroup_apply(s, k, 0.25);
  double diff_sq = 0.0;
  for (size_t i = 0; i < s.data().size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    diff_sq += d * d;
  }
  CHECK(std::sqrt(diff_sq / s.data().size()) <= 1e-3);
}

TEST_CASE("discrete energy balance: dissipation matches the Dirichlet form") {
  const int n = 48;
  ScalarField img(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      img.at(x, y) = 0.5 + 0.4 * std::sin(5.0 * kPi * x / n) *
                               std::cos(3.0 * kPi * y / n);
  const auto k = PerturbationField::from_image(img, 1.0);
  ScalarField eta = dirichlet_sine(n, 1, 2);

  const double dt = 0.5 * kdelta_step_max_dt(k);
  double sigma_prev = sigma_weighted(eta, k);
  for (int i = 0; i < 30; ++i) {
    const double dissipation = dt * dirichlet_form(eta);
    const ScalarField next = kdelta_step(eta, k, dt);
    const double sigma_next = sigma_weighted(next, k);
    CHECK(sigma_next <= sigma_prev + 1e-12);
    CHECK(std::abs(sigma_next - sigma_prev + dissipation) <= 0.05 * dissipation);
    eta = next;
    sigma_prev = sigma_next;
  }
}

TEST_CASE("perturbation field construction and validation") {
  ScalarField img(8, 8, 0.5);
  const auto p = PerturbationField::from_image(img, 2.0);
  CHECK(p.k.at(4, 4) == doctest::Approx(1.5));  // 1 + 2 * 0.25
  CHECK(p.a1 == doctest::Approx(1.5));
  CHECK(p.a2 == doctest::Approx(1.5));
  CHECK_THROWS_AS((void)PerturbationField::from_image(img, -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)PerturbationField::constant(0.0, 4, 4),
                  std::invalid_argument);
  const auto one = PerturbationField::from_image(img, 3.0, Phi::one);
  CHECK(one.k.at(0, 0) == doctest::Approx(4.0));
}

TEST_CASE("kdelta stability bound scales with max k") {
  const auto k = PerturbationField::constant(2.0, 16, 16);
  CHECK(kdelta_step_max_dt(k) == doctest::Approx(0.125));
  const ScalarField s(16, 16, 1.0);
  CHECK_THROWS_AS((void)kdelta_step(s, k, 0.13), StabilityError);
}
