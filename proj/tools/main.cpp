// flowref: constraint-based refinement of optical flow for fluid motion.
//
// Subcommands:
//   generate     synthetic frame pairs + ground-truth flow
//   estimate     Horn-Schunck initial flow + report
//   refine       full pipeline (HS -> bounded-constraint refinement)
//   verify       structural property checks (pass/fail)
//   kernel-check diffusion-kernel norm vs analytic bound, CSV
//
// Exit codes: 0 success, 2 usage, 3 I/O, 4 non-convergence, 5 property failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "flowref/constraint.hpp"
#include "flowref/diffusion.hpp"
#include "flowref/errors.hpp"
#include "flowref/fd_ops.hpp"
#include "flowref/flow_io.hpp"
#include "flowref/hs.hpp"
#include "flowref/manifest.hpp"
#include "flowref/metrics.hpp"
#include "flowref/parallel.hpp"
#include "flowref/refine.hpp"
#include "flowref/synth.hpp"
#include "flowref/verify.hpp"
#include "flowref/version.hpp"

namespace fs = std::filesystem;
using namespace flowref;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitNoConverge = 4;
constexpr int kExitPropertyFail = 5;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir);
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

struct GenerateOpts {
  std::string preset = "oseen";
  int size = 500;
  uint64_t seed = 42;
  double gamma = 0.0;      // 0: preset default (scaled +-7000)
  double r0 = 0.0;         // 0: preset default (scaled 15)
  double density = 0.05;
  double dt = 0.04;
  int n_vortices = 12;
  double strength_std = 3000.0;
  std::string out = "out_generate";
};

int cmd_generate(const GenerateOpts& o) {
  if (o.preset != "oseen" && o.preset != "cloud")
    throw CLI::ValidationError("--preset must be oseen or cloud");
  if (o.density <= 0.0 || o.density > 1.0)
    throw CLI::ValidationError("--density must lie in (0, 1]");
  ensure_dir(o.out);

  FlowField truth_velocity;
  if (o.preset == "oseen") {
    OseenSpec spec = OseenSpec::standard_pair(o.size);
    if (o.r0 > 0.0) spec.core_radius = o.r0;
    if (o.gamma != 0.0) {
      spec.vortices[0].gamma = o.gamma;
      spec.vortices[1].gamma = -o.gamma;
    }
    truth_velocity = oseen_flow(spec);
  } else {
    truth_velocity = cloud_flow(o.size, o.size, o.n_vortices, o.r0 > 0 ? o.r0 : 15.0,
                                o.strength_std, o.seed + 1);
  }

  ScalarField frame1 =
      o.preset == "oseen"
          ? particle_texture(o.size, o.size, o.density, o.seed)
          : smooth_noise_texture(o.size, o.size, 3.0, o.seed);
  ScalarField frame2 = advect_image(frame1, truth_velocity, o.dt);

  // Ground truth is stored as per-frame displacement (velocity * dt), the
  // quantity flow estimators recover.
  FlowField truth = truth_velocity;
  for (double& v : truth.u.data()) v *= o.dt;
  for (double& v : truth.v.data()) v *= o.dt;

  write_image_pgm(o.out + "/frame1.pgm", frame1, 65535);
  write_image_pgm(o.out + "/frame2.pgm", frame2, 65535);
  write_flo(o.out + "/truth.flo", truth);

  Manifest m;
  m["command"] = "generate";
  m["preset"] = o.preset;
  m["size"] = std::to_string(o.size);
  m["seed"] = std::to_string(o.seed);
  m["gamma"] = num(o.gamma);
  m["r0"] = num(o.r0);
  m["density"] = num(o.density);
  m["dt"] = num(o.dt);
  m["n-vortices"] = std::to_string(o.n_vortices);
  m["strength-std"] = num(o.strength_std);
  m["out"] = o.out;
  write_manifest(o.out + "/manifest.txt", m);

  std::cout << "wrote " << o.out << "/frame{1,2}.pgm, truth.flo, manifest.txt\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

struct EstimateOpts {
  std::string frame1, frame2;
  std::string out = "out_estimate";
  std::string truth;
  double alpha_hs = 3e-4;
  int hs_iters = 3000;
  double hs_tol = 1e-4;
  double presmooth = 1.0;
  int row = -1;
};

FlowReport make_report(const FlowField& flow, const std::string& truth_path,
                       int row) {
  FlowReport rep;
  rep.div_stats = divergence_stats(flow);
  rep.curl_stats = curl_stats(flow);
  rep.profile = extract_profile_uv(flow, row);
  if (!truth_path.empty()) {
    const FlowField truth = read_flo(truth_path);
    rep.aee = endpoint_error(flow, truth);
  }
  return rep;
}

int cmd_estimate(const EstimateOpts& o) {
  if (o.frame1.empty() || o.frame2.empty())
    throw CLI::ValidationError("estimate requires two frames (or a --config)");
  ensure_dir(o.out);
  const ScalarField f1 = read_image(o.frame1);
  const ScalarField f2 = read_image(o.frame2);

  HsConfig cfg;
  cfg.alpha = o.alpha_hs;
  cfg.max_iters = o.hs_iters;
  cfg.tol = o.hs_tol;
  cfg.presmooth_sigma = o.presmooth;
  const HsResult res = hs_solve(f1, f2, cfg);

  const int row = (o.row >= 0) ? o.row : f1.height() / 2;
  write_flo(o.out + "/flow.flo", res.flow);
  const FlowReport rep = make_report(res.flow, o.truth, row);
  write_report_csv(o.out + "/report.csv", rep);
  write_profile_csv(o.out + "/profile.csv", rep.profile);

  Manifest m;
  m["command"] = "estimate";
  m["frame1"] = o.frame1;
  m["frame2"] = o.frame2;
  m["out"] = o.out;
  m["truth"] = o.truth;
  m["alpha-hs"] = num(o.alpha_hs);
  m["hs-iters"] = std::to_string(o.hs_iters);
  m["hs-tol"] = num(o.hs_tol);
  m["presmooth"] = num(o.presmooth);
  m["row"] = std::to_string(row);
  write_manifest(o.out + "/manifest.txt", m);

  std::cout << "hs: iters=" << res.iters << " final_update=" << res.final_update
            << (res.converged ? " (converged)" : " (NOT converged)") << "\n";
  if (rep.aee >= 0.0) std::cout << "aee: " << rep.aee << " px\n";
  if (!res.converged) return kExitNoConverge;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// refine
// ---------------------------------------------------------------------------

struct RefineOpts {
  std::string frame1, frame2;
  std::string out = "out_refine";
  std::string truth;
  double alpha_hs = 3e-4;
  int hs_iters = 3000;
  double hs_tol = 1e-4;
  double presmooth = 1.0;
  std::string phi = "f2";
  std::string psi = "div";
  double alpha = 100.0;
  double beta = 0.01;
  double a0 = 1.0;
  double dt = 6.0;
  int sweeps = 3;
  int sweep_budget = 30;
  int max_outer = 400;
  double rho0 = 1.0;
  double mu_c = 1e3;
  double eps2_scale = 0.5;
  double illum_sigma = 0.0;  // 0: no illumination correction
  int row = -1;
};

int cmd_refine(const RefineOpts& o) {
  if (o.frame1.empty() || o.frame2.empty())
    throw CLI::ValidationError("refine requires two frames (or a --config)");
  ensure_dir(o.out);
  ScalarField f1 = read_image(o.frame1);
  ScalarField f2 = read_image(o.frame2);
  if (!f1.same_shape(f2))
    throw IoError("refine: frame dimensions differ between " + o.frame1 +
                  " and " + o.frame2);
  if (o.illum_sigma > 0.0) {
    auto [c1, c2] = illumination_correct(f1, f2, o.illum_sigma);
    f1 = std::move(c1);
    f2 = std::move(c2);
  }

  HsConfig hs_cfg;
  hs_cfg.alpha = o.alpha_hs;
  hs_cfg.max_iters = o.hs_iters;
  hs_cfg.tol = o.hs_tol;
  hs_cfg.presmooth_sigma = o.presmooth;

  RefineConfig rcfg;
  rcfg.alpha = o.alpha;
  rcfg.beta = o.beta;
  rcfg.a0 = o.a0;
  rcfg.dt = o.dt;
  if (o.phi == "f2") rcfg.phi = Phi::image_squared;
  else if (o.phi == "one") rcfg.phi = Phi::one;
  else throw CLI::ValidationError("--phi must be f2 or one");
  if (o.psi == "div") rcfg.psi = Psi::divergence;
  else if (o.psi == "curl") rcfg.psi = Psi::curl;
  else throw CLI::ValidationError("--psi must be div or curl");
  if (rcfg.validate())
    std::cerr << "warning: beta/alpha > 1e-4; convergence was calibrated at or "
                 "below that ratio\n";

  BcaConfig bcfg;
  bcfg.rho0 = o.rho0;
  bcfg.mu_c = o.mu_c;
  bcfg.sweeps_per_outer = o.sweeps;
  bcfg.sweep_budget = o.sweep_budget;
  bcfg.max_outer = o.max_outer;
  bcfg.semigroup_t = o.dt;
  bcfg.eps2_scale = o.eps2_scale;

  const BcaState st = bca_run(f1, f2, hs_cfg, rcfg, bcfg);
  const HsResult hs = hs_solve(f1, f2, hs_cfg);

  const int row = (o.row >= 0) ? o.row : f1.height() / 2;
  write_flo(o.out + "/refined.flo", st.flow);
  write_flo(o.out + "/hs.flo", hs.flow);
  write_history_csv(o.out + "/history.csv", st.history);

  // Refined-flow report plus the per-sweep energy of a standalone refinement
  // pass for the energy trace.
  FlowReport rep = make_report(st.flow, o.truth, row);
  ScalarField f_norm = f1;
  const double fmax = std::max(f_norm.max(), 1e-30);
  for (double& v : f_norm.data()) v /= fmax;
  RefineConfig trace_cfg = rcfg;
  trace_cfg.max_iters = o.sweep_budget;
  const RefineResult trace = refine_iterate(hs.flow, f_norm, trace_cfg);
  rep.energy_trace = trace.energy_trace;
  write_report_csv(o.out + "/report.csv", rep);
  write_profile_csv(o.out + "/profile.csv", rep.profile);
  write_profile_csv(o.out + "/profile_hs.csv", extract_profile_uv(hs.flow, row));
  magnitude_raster(o.out + "/magnitude.pgm", st.flow);

  Manifest m;
  m["command"] = "refine";
  m["frame1"] = o.frame1;
  m["frame2"] = o.frame2;
  m["out"] = o.out;
  m["truth"] = o.truth;
  m["alpha-hs"] = num(o.alpha_hs);
  m["hs-iters"] = std::to_string(o.hs_iters);
  m["hs-tol"] = num(o.hs_tol);
  m["presmooth"] = num(o.presmooth);
  m["phi"] = o.phi;
  m["psi"] = o.psi;
  m["alpha"] = num(o.alpha);
  m["beta"] = num(o.beta);
  m["a0"] = num(o.a0);
  m["dt"] = num(o.dt);
  m["sweeps"] = std::to_string(o.sweeps);
  m["sweep-budget"] = std::to_string(o.sweep_budget);
  m["max-outer"] = std::to_string(o.max_outer);
  m["rho0"] = num(o.rho0);
  m["mu-c"] = num(o.mu_c);
  m["eps2-scale"] = num(o.eps2_scale);
  m["illum-correct"] = num(o.illum_sigma);
  m["row"] = std::to_string(row);
  write_manifest(o.out + "/manifest.txt", m);

  std::cout << "bca: outer_iters=" << st.iter
            << (st.converged ? " (converged)" : " (NOT converged)") << "\n";
  if (rep.aee >= 0.0) std::cout << "aee: " << rep.aee << " px\n";
  if (!st.converged) return kExitNoConverge;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

int cmd_verify(int grid, uint64_t seed) {
  const auto checks = run_property_checks(grid, seed);
  bool all_pass = true;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  " << c.detail
              << "\n";
    all_pass = all_pass && c.pass;
  }
  std::cout << (all_pass ? "ALL CHECKS PASSED" : "CHECKS FAILED") << "\n";
  return all_pass ? kExitOk : kExitPropertyFail;
}

// ---------------------------------------------------------------------------
// kernel-check
// ---------------------------------------------------------------------------

int cmd_kernel_check(const std::string& out_path) {
  std::vector<std::vector<double>> rows;
  for (double p : {1.0, 1.5, 2.0, 3.0})
    for (double t : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      const auto cst =
          kernel_norm_bound_check(PerturbationField::constant(1.0, 8, 8), p, t);
      rows.push_back({p, t, 1.0, 1.0, cst.norm, cst.bound});
      PerturbationField kvar;
      kvar.k = ScalarField(32, 32);
      for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x)
          kvar.k.at(x, y) = 1.5 + 0.5 * std::sin(0.3 * x) * std::cos(0.2 * y);
      kvar.a1 = kvar.k.min();
      kvar.a2 = kvar.k.max();
      const auto var = kernel_norm_bound_check(kvar, p, t);
      rows.push_back({p, t, kvar.a1, kvar.a2, var.norm, var.bound});
    }
  write_csv(out_path, {"p", "t", "a1", "a2", "norm", "bound"}, rows);
  std::cout << "wrote " << out_path << "\n";
  return kExitOk;
}

// Applies manifest values as defaults for options the command line left unset.
void apply_config(CLI::App* sub, const std::string& config_path) {
  if (config_path.empty()) return;
  const Manifest m = read_manifest(config_path);
  for (const auto& [key, value] : m) {
    if (key == "command") continue;
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr || opt->count() > 0) continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constraint-based refinement of optical flow for fluid motion"};
  app.set_version_flag("--version", std::string("flowref ") + kVersion);
  app.require_subcommand(1);

  int threads = 1;
  app.add_option("--threads", threads, "worker threads for data-parallel kernels");

  GenerateOpts gen;
  std::string gen_config;
  CLI::App* sgen = app.add_subcommand("generate", "synthesize frame pair + truth");
  sgen->add_option("--preset", gen.preset, "oseen|cloud");
  sgen->add_option("--size", gen.size, "grid size (pixels per side)");
  sgen->add_option("--seed", gen.seed, "texture / layout seed");
  sgen->add_option("--gamma", gen.gamma, "vortex strength override (px^2/s)");
  sgen->add_option("--r0", gen.r0, "vortex core radius override (px)");
  sgen->add_option("--density", gen.density, "particles per pixel^2");
  sgen->add_option("--dt", gen.dt, "frame interval (s)");
  sgen->add_option("--n-vortices", gen.n_vortices, "cloud preset vortex count");
  sgen->add_option("--strength-std", gen.strength_std,
                   "cloud preset strength std (px^2/s)");
  sgen->add_option("--out", gen.out, "output directory");
  sgen->add_option("--config", gen_config, "manifest/key=value config file");

  EstimateOpts est;
  std::string est_config;
  CLI::App* sest = app.add_subcommand("estimate", "Horn-Schunck initial flow");
  sest->add_option("frame1,--frame1", est.frame1, "first frame");
  sest->add_option("frame2,--frame2", est.frame2, "second frame");
  sest->add_option("--out", est.out, "output directory");
  sest->add_option("--truth", est.truth, "ground-truth .flo for endpoint error");
  sest->add_option("--alpha-hs", est.alpha_hs,
                   "HS multiplier (use ~3e-4 for [0,1] intensities, 20 for 8-bit)");
  sest->add_option("--hs-iters", est.hs_iters, "HS max sweeps");
  sest->add_option("--hs-tol", est.hs_tol, "HS relative update tolerance");
  sest->add_option("--presmooth", est.presmooth, "Gaussian presmoothing sigma");
  sest->add_option("--row", est.row, "profile row (default: centre)");
  sest->add_option("--config", est_config, "manifest/key=value config file");

  RefineOpts ref;
  std::string ref_config;
  CLI::App* sref = app.add_subcommand("refine", "HS + bounded-constraint refinement");
  sref->add_option("frame1,--frame1", ref.frame1, "first frame");
  sref->add_option("frame2,--frame2", ref.frame2, "second frame");
  sref->add_option("--out", ref.out, "output directory");
  sref->add_option("--truth", ref.truth, "ground-truth .flo for endpoint error");
  sref->add_option("--alpha-hs", ref.alpha_hs, "HS multiplier");
  sref->add_option("--hs-iters", ref.hs_iters, "HS max sweeps");
  sref->add_option("--hs-tol", ref.hs_tol, "HS relative update tolerance");
  sref->add_option("--presmooth", ref.presmooth, "Gaussian presmoothing sigma");
  sref->add_option("--phi", ref.phi, "image weight: f2|one");
  sref->add_option("--psi", ref.psi, "penalized quantity: div|curl");
  sref->add_option("--alpha", ref.alpha, "smoothness weight");
  sref->add_option("--beta", ref.beta, "constraint weight");
  sref->add_option("--a0", ref.a0, "PDE coupling constant");
  sref->add_option("--dt", ref.dt, "semigroup time per outer iteration");
  sref->add_option("--sweeps", ref.sweeps, "refine sweeps per outer iteration");
  sref->add_option("--sweep-budget", ref.sweep_budget, "total refine sweeps");
  sref->add_option("--max-outer", ref.max_outer, "outer iteration cap");
  sref->add_option("--rho0", ref.rho0, "initial Uzawa tuning parameter");
  sref->add_option("--mu-c", ref.mu_c, "augmented-Lagrangian penalty weight");
  sref->add_option("--eps2-scale", ref.eps2_scale,
                   "initial eps2 as a fraction of ||f d0||");
  sref->add_option("--illum-correct", ref.illum_sigma,
                   "illumination-correction sigma (0 = off)");
  sref->add_option("--row", ref.row, "profile row (default: centre)");
  sref->add_option("--config", ref_config, "manifest/key=value config file");

  int verify_grid = 256;
  uint64_t verify_seed = 7;
  CLI::App* sver = app.add_subcommand("verify", "run structural property checks");
  sver->add_option("--grid", verify_grid, "base grid size");
  sver->add_option("--seed", verify_seed, "random seed");

  std::string kernel_out = "kernel_check.csv";
  CLI::App* sker = app.add_subcommand("kernel-check", "kernel norm vs bound CSV");
  sker->add_option("--out", kernel_out, "output CSV path");

  try {
    app.parse(argc, argv);
    set_worker_threads(threads);
    if (*sgen) {
      apply_config(sgen, gen_config);
      return cmd_generate(gen);
    }
    if (*sest) {
      apply_config(sest, est_config);
      return cmd_estimate(est);
    }
    if (*sref) {
      apply_config(sref, ref_config);
      return cmd_refine(ref);
    }
    if (*sver) return cmd_verify(verify_grid, verify_seed);
    if (*sker) return cmd_kernel_check(kernel_out);
    return kExitUsage;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConverge;
  } catch (const IdentityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPropertyFail;
  } catch (const StabilityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPropertyFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
