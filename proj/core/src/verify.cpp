#include "flowref/verify.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "flowref/constraint.hpp"
#include "flowref/diffusion.hpp"
#include "flowref/fd_ops.hpp"
#include "flowref/field.hpp"
#include "flowref/refine.hpp"

namespace flowref {

namespace {

constexpr double kPi = std::numbers::pi;

std::string format_detail(const char* fmt, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), fmt, a, b);
  return buf;
}

ScalarField smooth_image_01(int n, double h) {
  ScalarField f(n, n, 0.0, h, h);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      const double px = x * h, py = y * h;
      f.at(x, y) = 0.5 + 0.5 * std::sin(kPi * px) * std::sin(2.0 * kPi * py);
    }
  return f;
}

}  // namespace

double diagonalization_residual_trig(int grid) {
  const int n = grid;
  const double h = 1.0 / (n - 1);
  FlowField w(n, n, h, h);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      const double px = x * h, py = y * h;
      w.u.at(x, y) = std::sin(2.0 * kPi * px) * std::sin(kPi * py);
      w.v.at(x, y) = 0.7 * std::sin(kPi * px) * std::sin(2.0 * kPi * py);
    }
  const ScalarField f = smooth_image_01(n, h);
  return diagonalization_residual(w, f, 1.0, Phi::image_squared);
}

namespace {

void check_diagonalization(std::vector<CheckResult>& out, int grid) {
  const double coarse = diagonalization_residual_trig(grid);
  const double fine = diagonalization_residual_trig(2 * grid);
  out.push_back({"diagonalization_residual", coarse <= 1e-2, coarse, 1e-2,
                 format_detail("residual=%.3e at coarse grid (thr %.1e)", coarse,
                               1e-2)});
  const double factor = (fine > 0.0) ? coarse / fine : 1e9;
  out.push_back({"diagonalization_convergence", factor >= 3.0, factor, 3.0,
                 format_detail("coarse/fine residual ratio=%.2f (need >= %.1f)",
                               factor, 3.0)});
}

void check_kernel_bounds(std::vector<CheckResult>& out) {
  const double ps[] = {1.0, 2.0};
  const double ts[] = {0.5, 1.0, 4.0};
  bool all_below = true, equality_ok = true;
  double worst_margin = -1e300, worst_eq = 0.0;
  for (double p : ps)
    for (double t : ts) {
      const auto cst =
          kernel_norm_bound_check(PerturbationField::constant(1.0, 8, 8), p, t);
      const double eq_err = std::abs(cst.norm - cst.bound) / cst.bound;
      worst_eq = std::max(worst_eq, eq_err);
      equality_ok = equality_ok && eq_err <= 1e-3;

      PerturbationField kvar;
      kvar.k = ScalarField(32, 32);
      for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x)
          kvar.k.at(x, y) = 1.5 + 0.5 * std::sin(0.3 * x) * std::cos(0.2 * y);
      kvar.a1 = kvar.k.min();
      kvar.a2 = kvar.k.max();
      const auto var = kernel_norm_bound_check(kvar, p, t);
      worst_margin = std::max(worst_margin, (var.norm - var.bound) / var.bound);
      all_below = all_below && var.norm <= var.bound * (1.0 + 1e-4);
    }
  out.push_back({"kernel_norm_bound", all_below, worst_margin, 0.0,
                 format_detail("worst (norm-bound)/bound=%.3e (must be <= %g)",
                               worst_margin, 0.0)});
  out.push_back({"kernel_norm_equality_const_k", equality_ok, worst_eq, 1e-3,
                 format_detail("worst |norm-bound|/bound=%.3e (thr %.1e)",
                               worst_eq, 1e-3)});
}

double energy_balance_worst_rel(double dt, int steps,
                                const PerturbationField& k, ScalarField eta,
                                bool* monotone) {
  double worst = 0.0;
  bool mono = true;
  double sigma_prev = sigma_weighted(eta, k);
  for (int s = 0; s < steps; ++s) {
    const double dissipation = dt * dirichlet_form(eta);
    ScalarField next = kdelta_step(eta, k, dt);
    const double sigma_next = sigma_weighted(next, k);
    if (sigma_next > sigma_prev + 1e-12 * std::abs(sigma_prev)) mono = false;
    const double resid = std::abs(sigma_next - sigma_prev + dissipation);
    if (dissipation > 0.0) worst = std::max(worst, resid / dissipation);
    eta = std::move(next);
    sigma_prev = sigma_next;
  }
  if (monotone) *monotone = mono;
  return worst;
}

void check_energy_balance(std::vector<CheckResult>& out, int grid) {
  const int n = grid;
  // k from a smooth synthetic image so k varies across [1, 2).
  ScalarField fs(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      fs.at(x, y) = 0.5 + 0.4 * std::sin(6.0 * kPi * x / n) *
                              std::sin(4.0 * kPi * y / n);
  const PerturbationField k = PerturbationField::from_image(fs, 1.0);

  ScalarField eta(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      const double px = double(x) / (n - 1), py = double(y) / (n - 1);
      eta.at(x, y) = std::sin(kPi * px) * std::sin(kPi * py) +
                     0.5 * std::sin(2.0 * kPi * px) * std::sin(3.0 * kPi * py);
    }

  const double dt_half = 0.5 * kdelta_step_max_dt(k);
  bool mono_half = true, mono_eighth = true, mono_full = true;
  const double rel_half =
      energy_balance_worst_rel(dt_half, 40, k, eta, &mono_half);
  const double rel_eighth =
      energy_balance_worst_rel(dt_half / 8.0, 40, k, eta, &mono_eighth);
  energy_balance_worst_rel(kdelta_step_max_dt(k), 40, k, eta, &mono_full);

  out.push_back({"energy_balance_half_cfl", rel_half <= 0.05, rel_half, 0.05,
                 format_detail("worst |dsigma + dt*grad^2|/dt*grad^2=%.3e (thr %g)",
                               rel_half, 0.05)});
  out.push_back({"energy_balance_eighth", rel_eighth <= 0.01, rel_eighth, 0.01,
                 format_detail("residual=%.3e at dt/8 (thr %g)", rel_eighth,
                               0.01)});
  const double order = (rel_eighth > 0.0) ? rel_half / rel_eighth : 8.0;
  out.push_back({"energy_balance_first_order", order >= 4.0, order, 4.0,
                 format_detail("residual ratio dt/(dt/8)=%.2f (need >= %g)",
                               order, 4.0)});
  out.push_back({"energy_monotone", mono_half && mono_eighth && mono_full,
                 mono_half && mono_eighth && mono_full ? 1.0 : 0.0, 1.0,
                 "sigma non-increasing at dt/2, dt/16 and the full bound"});
}

void check_decomposition(std::vector<CheckResult>& out, uint64_t seed) {
  const int n = 64;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  ScalarField f1(n, n), f2(n, n);
  for (double& v : f1.data()) v = u01(rng);
  for (double& v : f2.data()) v = u01(rng);

  double worst_identity = 0.0, worst_cs = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    FlowField w(n, n);
    for (double& v : w.u.data()) v = sym(rng);
    for (double& v : w.v.data()) v = sym(rng);

    // J_C carries the total smoothness weight alpha_hs + alpha_r.
    const double jc = energy_jc(w, f1, f2, 2.0);
    const double jhs = energy_jhs(w, f1, f2, 1.0);
    RefineConfig jr_cfg;
    jr_cfg.alpha = 1.0;
    jr_cfg.beta = 1.0;
    jr_cfg.phi = Phi::image_squared;
    jr_cfg.psi = Psi::divergence;
    const double jr = energy_jr(w, f1, jr_cfg);
    const double kterm = cross_term_k(w, f1, f2);
    worst_identity = std::max(
        worst_identity, std::abs(jc - (jhs + jr + kterm)) / std::abs(jc));

    // |K| <= 2 ||B w - c|| ||f div w||.
    const OfcData ofc = OfcData::from_frames(f1, f2);
    const ScalarField r = ofc_residual(w, ofc);
    const ScalarField d = divergence(w);
    double r_sq = 0.0, fd_sq = 0.0;
    for (int y = 1; y + 1 < n; ++y)
      for (int x = 1; x + 1 < n; ++x) {
        r_sq += r.at(x, y) * r.at(x, y);
        const double fd = f1.at(x, y) * d.at(x, y);
        fd_sq += fd * fd;
      }
    const double bound = 2.0 * std::sqrt(r_sq) * std::sqrt(fd_sq);
    if (bound > 0.0) worst_cs = std::max(worst_cs, std::abs(kterm) / bound);
  }
  out.push_back({"decomposition_identity", worst_identity <= 1e-10,
                 worst_identity, 1e-10,
                 format_detail("worst |J_C-(J_HS+J_R+K)|/|J_C|=%.3e (thr %.1e)",
                               worst_identity, 1e-10)});
  out.push_back({"cross_term_cauchy_schwarz", worst_cs <= 1.0, worst_cs, 1.0,
                 format_detail("worst |K|/(2||r|| ||f d||)=%.3f (must be <= %g)",
                               worst_cs, 1.0)});
}

void check_semigroup_contraction(std::vector<CheckResult>& out, uint64_t seed) {
  const int n = 48;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  ScalarField kimg(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      kimg.at(x, y) = 0.5 + 0.5 * std::sin(0.4 * x) * std::sin(0.3 * y);
  const PerturbationField k = PerturbationField::from_image(kimg, 1.0);
  double worst = 0.0;
  for (double t : {0.05, 0.5, 2.0, 10.0}) {
    for (int trial = 0; trial < 5; ++trial) {
      ScalarField s(n, n);
      for (double& v : s.data()) v = sym(rng);
      const double before = s.l2_norm();
      const double after = semigroup_apply(s, k, t).l2_norm();
      worst = std::max(worst, after / before);
    }
  }
  out.push_back({"semigroup_contraction", worst <= 1.0 + 1e-12, worst, 1.0,
                 format_detail("worst ||S(t)s||/||s||=%.6f (must be <= %g)",
                               worst, 1.0)});
}

}  // namespace

std::vector<CheckResult> run_property_checks(int grid, uint64_t seed) {
  std::vector<CheckResult> out;
  check_diagonalization(out, grid);
  check_kernel_bounds(out);
  check_energy_balance(out, std::min(grid, 128));
  check_decomposition(out, seed);
  check_semigroup_contraction(out, seed);
  return out;
}

}  // namespace flowref
