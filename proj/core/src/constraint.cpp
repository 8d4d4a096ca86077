#include "flowref/constraint.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "flowref/errors.hpp"
#include "flowref/fd_ops.hpp"
#include "flowref/gaussian.hpp"

namespace flowref {

OfcData OfcData::from_frames(const ScalarField& f1, const ScalarField& f2,
                             double presmooth_sigma) {
  const ScalarField s1 = gaussian_blur(f1, presmooth_sigma);
  const ScalarField s2 = gaussian_blur(f2, presmooth_sigma);
  ImageDerivs d = image_derivatives(s1, s2);
  OfcData ofc{std::move(d.fx), std::move(d.fy), std::move(d.ft)};
  for (double& v : ofc.c.data()) v = -v;  // c = -ft
  return ofc;
}

ScalarField ofc_residual(const FlowField& w, const OfcData& ofc) {
  if (!w.u.same_shape(ofc.fx))
    throw std::invalid_argument("ofc_residual: shape mismatch");
  ScalarField r(w.width(), w.height(), 0.0, w.u.dx(), w.u.dy());
  for (size_t i = 0; i < r.data().size(); ++i)
    r.data()[i] = ofc.fx.data()[i] * w.u.data()[i] +
                  ofc.fy.data()[i] * w.v.data()[i] - ofc.c.data()[i];
  return r;
}

double augmented_lagrangian(const FlowField& w, const ScalarField& lambda1,
                            double mu_c, const OfcData& ofc,
                            const ScalarField& f1, const ScalarField& f2,
                            double alpha) {
  const ScalarField r = ofc_residual(w, ofc);
  const double r_sq = r.l2_norm() * r.l2_norm();
  const double lam_r = ScalarField::dot(lambda1, r);

  const double forward = energy_jc(w, f1, f2, alpha) + 0.5 * mu_c * r_sq + lam_r;

  // Reformulation via J_R: J_C = J_R(beta=1, phi=f^2, same alpha)
  //                            + ||B w - c||^2 + <2 f div w, B w - c>
  // under the shared interior quadrature (the data pieces come from the same
  // discretization J_C uses, so the comparison checks quadrature consistency
  // regardless of how `ofc` was smoothed).
  RefineConfig jr_cfg;
  jr_cfg.alpha = alpha;
  jr_cfg.beta = 1.0;
  jr_cfg.phi = Phi::image_squared;
  jr_cfg.psi = Psi::divergence;
  const OfcQuadrature q = ofc_quadrature(w, f1, f2);
  const double reform = energy_jr(w, f1, jr_cfg) + q.residual_sq + q.cross +
                        0.5 * mu_c * r_sq + lam_r;

  const double scale = std::max({std::abs(forward), std::abs(reform), 1e-30});
  if (std::abs(forward - reform) > 1e-8 * scale)
    throw IdentityError("augmented_lagrangian: Eq.(19)/Eq.(21) forms disagree");
  return forward;
}

ScalarField uzawa_update(const ScalarField& lambda1, const ScalarField& f,
                         const ScalarField& d, double rho,
                         const ScalarField& residual) {
  if (!lambda1.same_shape(f) || !lambda1.same_shape(d) ||
      !lambda1.same_shape(residual))
    throw std::invalid_argument("uzawa_update: shape mismatch");
  ScalarField next = lambda1;
  for (size_t i = 0; i < next.data().size(); ++i)
    next.data()[i] += 2.0 * f.data()[i] * d.data()[i] + rho * residual.data()[i];
  return next;
}

std::pair<ScalarField, ScalarField> illumination_correct(const ScalarField& f1,
                                                         const ScalarField& f2,
                                                         double sigma) {
  if (!f1.same_shape(f2))
    throw std::invalid_argument("illumination_correct: frame shape mismatch");
  if (!(sigma > 0.0))
    throw std::invalid_argument("illumination_correct: sigma must be > 0");
  const double joint_max = std::max({f1.max(), f2.max(), 1e-30});
  ScalarField g1 = f1, g2 = f2;
  for (double& v : g1.data()) v /= joint_max;
  for (double& v : g2.data()) v /= joint_max;

  const ScalarField b1 = gaussian_blur(g1, sigma);
  const ScalarField b2 = gaussian_blur(g2, sigma);
  for (size_t i = 0; i < g2.data().size(); ++i)
    g2.data()[i] *= b1.data()[i] / (b2.data()[i] + 1e-6);
  return {std::move(g1), std::move(g2)};
}

namespace {

// Tolerance schedule: halve for the first five corrections, then follow
// M/(n+1)^2 with M fixed so the schedule is continuous at the switch.
double tightened(double eps0, double current, int n_corrections) {
  if (n_corrections <= 5) return current * 0.5;
  const double m = (eps0 / 32.0) * 49.0;
  return std::min(current, m / double((n_corrections + 1) * (n_corrections + 1)));
}

ScalarField pointwise_product(const ScalarField& a, const ScalarField& b) {
  ScalarField out = a;
  for (size_t i = 0; i < out.data().size(); ++i) out.data()[i] *= b.data()[i];
  return out;
}

// L2 norm over interior pixels (boundary ring excluded).
double interior_l2(const ScalarField& s) {
  double acc = 0.0;
  for (int y = 1; y + 1 < s.height(); ++y)
    for (int x = 1; x + 1 < s.width(); ++x) acc += s.at(x, y) * s.at(x, y);
  return std::sqrt(acc * s.dx() * s.dy());
}

}  // namespace

BcaState bca_run(const ScalarField& f1, const ScalarField& f2,
                 const HsConfig& hs_cfg, const RefineConfig& refine_cfg,
                 const BcaConfig& bca_cfg) {
  refine_cfg.validate();
  if (!f1.same_shape(f2)) throw std::invalid_argument("bca_run: frame mismatch");

  // Normalized image driving phi(f) and the k field.
  ScalarField f_norm = f1;
  const double fmax = std::max(f_norm.max(), 1e-30);
  for (double& v : f_norm.data()) v /= fmax;
  const PerturbationField k =
      PerturbationField::from_image(f_norm, refine_cfg.a0, refine_cfg.phi);

  const OfcData ofc = OfcData::from_frames(f1, f2, hs_cfg.presmooth_sigma);

  BcaState st;
  st.mu_c = std::min(bca_cfg.mu_c, 1e9);
  st.rho = bca_cfg.rho0;

  // Initial Horn-Schunck flow and constraint field.
  const HsResult hs = hs_solve(f1, f2, hs_cfg);
  st.flow = hs.flow;
  st.d = (refine_cfg.psi == Psi::divergence) ? divergence(st.flow) : curl(st.flow);
  st.lambda1 = ScalarField(f1.width(), f1.height(), 0.0, f1.dx(), f1.dy());
  const ScalarField lambda0 = st.lambda1;

  const double r0_norm = interior_l2(ofc_residual(st.flow, ofc));
  st.delta_hs = (bca_cfg.delta_hs >= 0.0) ? bca_cfg.delta_hs : r0_norm;
  const double eps1_0 = r0_norm;
  const double eps2_0 =
      bca_cfg.eps2_scale * interior_l2(pointwise_product(f_norm, st.d));
  st.eps1 = eps1_0;
  st.eps2 = eps2_0;

  const double t = (bca_cfg.semigroup_t >= 0.0) ? bca_cfg.semigroup_t : refine_cfg.dt;
  int corrections = 0;
  int sweeps_done = 0;

  for (int n = 1; n <= bca_cfg.max_outer; ++n) {
    st.iter = n;

    // Flow sweeps against the current constraint field (within the budget),
    // then d^(n) = S(t) d^(n-1).
    for (int s = 0; s < bca_cfg.sweeps_per_outer && sweeps_done < bca_cfg.sweep_budget;
         ++s, ++sweeps_done)
      st.flow = refine_sweep(st.flow, f_norm, refine_cfg, st.d);
    st.d = semigroup_apply(st.d, k, t);

    const ScalarField r = ofc_residual(st.flow, ofc);
    const double r_norm = interior_l2(r);
    const ScalarField fd = pointwise_product(f_norm, st.d);
    const double fd_norm = interior_l2(fd);

    ScalarField drift = st.lambda1;
    for (size_t i = 0; i < drift.data().size(); ++i)
      drift.data()[i] -= lambda0.data()[i];
    st.history.push_back({n, r_norm, fd_norm, interior_l2(drift), st.rho, st.eps1,
                          st.eps2, 0.0});

    if (r_norm <= std::max(st.eps1, 2.0 * st.delta_hs)) {
      if (fd_norm <= st.eps2) {
        st.converged = true;
        break;
      }
      // The multiplier sees the residual projected onto the eps1 ball: the
      // iterate bound the Uzawa convergence argument works with.
      ScalarField r_eff = r;
      if (r_norm > st.eps1 && r_norm > 0.0) {
        const double scale = st.eps1 / r_norm;
        for (double& v : r_eff.data()) v *= scale;
      }
      const ScalarField prev = st.lambda1;
      st.lambda1 = uzawa_update(st.lambda1, f_norm, st.d, st.rho, r_eff);
      ScalarField inc = st.lambda1;
      for (size_t i = 0; i < inc.data().size(); ++i) inc.data()[i] -= prev.data()[i];
      st.history.back().lambda_increment = interior_l2(inc);
      ++corrections;
      st.eps1 = tightened(eps1_0, st.eps1, corrections);
      st.eps2 = tightened(eps2_0, st.eps2, corrections);
    } else {
      // Outer correction: multiplier frozen, penalty scaled up.
      st.rho = std::min(100.0 * st.rho, bca_cfg.rho_cap);
      ++corrections;
      st.eps1 = tightened(eps1_0, st.eps1, corrections);
      st.eps2 = tightened(eps2_0, st.eps2, corrections);
    }
  }
  return st;
}

void write_history_csv(const std::string& path,
                       const std::vector<BcaIterRecord>& history) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_history_csv: cannot open " + path);
  out << "iter,constraint_norm,fd_norm,lambda_drift,rho,eps1,eps2\n";
  char buf[256];
  for (const auto& h : history) {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", h.iter,
                  h.constraint_norm, h.fd_norm, h.lambda_drift, h.rho, h.eps1,
                  h.eps2);
    out << buf;
  }
}

}  // namespace flowref
