// Batch driver: parse a problem config, dispatch one subcommand, write
// machine-readable JSON/CSV reports.
//
// Exit codes: 0 = all checks pass (or the verdict matches --expect),
// 1 = a mathematical check failed, 2 = usage or numeric error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "collar/barrier.hpp"
#include "collar/config.hpp"
#include "collar/estimates.hpp"
#include "collar/growth.hpp"
#include "collar/report.hpp"
#include "collar/spectral.hpp"

namespace {

using collar::Json;

constexpr int kExitPass = 0;
constexpr int kExitMathFail = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::string config_path;
  std::string out_dir = ".";
  std::string expect = "pass";
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "problem configuration file")
      ->required();
  sub->add_option("--out", c.out_dir, "output directory");
  sub->add_option("--expect", c.expect, "expected verdict")
      ->check(CLI::IsMember({"pass", "fail"}));
}

Json base_report(const collar::Config& cfg) {
  Json j;
  j["tool_version"] = collar::kToolVersion;
  j["resolved_config"] = cfg.serialize();
  return j;
}

void emit(const Common& c, const std::string& name, const Json& j) {
  std::filesystem::create_directories(c.out_dir);
  collar::write_json_report((std::filesystem::path(c.out_dir) / name).string(),
                            j);
}

// Map a mathematical verdict through --expect.
int finish(const Common& c, bool pass) {
  const bool expected = c.expect == "pass" ? pass : !pass;
  std::printf("verdict: %s (expected %s) -> %s\n", pass ? "PASS" : "FAIL",
              c.expect.c_str(), expected ? "ok" : "mismatch");
  return expected ? kExitPass : kExitMathFail;
}

int cmd_geom(const Common& c) {
  const auto cfg = collar::Config::load(c.config_path);
  const auto spec = collar::problem_from_config(cfg);
  Json j = base_report(cfg);
  j["m"] = spec.manifold.m;
  j["omega_m"] = spec.manifold.omega_m;
  j["ball_volume"] = collar::ball_volume(spec.manifold, 1.0);
  std::vector<std::vector<double>> rows;
  for (int i = 1; i <= 64; ++i) {
    const double r = i / 65.0;
    rows.push_back({r, collar::surface_area(spec.manifold, r),
                    spec.V.eval(spec.dist(r)), spec.a.eval(spec.dist(r))});
  }
  emit(c, "geom.json", j);
  collar::write_csv(
      (std::filesystem::path(c.out_dir) / "surface.csv").string(),
      {"r", "surface_area", "V", "a"}, rows);
  return finish(c, true);
}

int cmd_hp(const Common& c, const std::string& variant_name) {
  const auto cfg = collar::Config::load(c.config_path);
  const auto spec = collar::problem_from_config(cfg);
  cfg.check_known("hp", {"k", "C0", "theta", "tau", "j_min", "j_max"});
  collar::HpVariant variant;
  if (variant_name == "hp1") variant = collar::HpVariant::HP1;
  else if (variant_name == "hp2") variant = collar::HpVariant::HP2;
  else if (variant_name == "hp3") variant = collar::HpVariant::HP3;
  else throw CLI::ValidationError("--variant must be hp1|hp2|hp3");
  collar::HpParams params;
  if (auto v = cfg.get("hp", "k")) params.k = std::stod(*v);
  if (auto v = cfg.get("hp", "C0")) params.C0 = std::stod(*v);
  params.theta = cfg.get_double("hp", "theta", params.theta);
  params.tau = cfg.get_double("hp", "tau", params.tau);
  params.j_min = cfg.get_int("hp", "j_min", params.j_min);
  params.j_max = cfg.get_int("hp", "j_max", params.j_max);

  const auto rep = collar::check_hp(spec, variant, params);
  Json j = base_report(cfg);
  j["variant"] = collar::to_string(rep.variant);
  j["verdict"] = rep.verdict ? "PASS" : "FAIL";
  j["k"] = rep.k;
  j["fitted_C"] = rep.fitted_C;
  j["fitted_C0"] = rep.fitted_C0;
  j["fitted_alpha_exponent"] = rep.fitted_alpha_exponent;
  j["fitted_log_exponent"] = rep.fitted_log_exponent;
  j["fitted_log_exponent_stderr"] = rep.fitted_log_exponent_stderr;
  j["ratio_logslope"] = rep.ratio_logslope;
  j["c_eps_growth"] = rep.c_eps_growth;
  j["c_independence_suspect"] = rep.c_independence_suspect;
  if (!rep.verdict) {
    j["fail_reason"] = rep.fail_reason;
    j["witness"] = {{"delta", rep.witness_delta}, {"eps", rep.witness_eps}};
  }
  std::vector<std::vector<double>> rows;
  for (const auto& cell : rep.residual_table) {
    rows.push_back({cell.delta, cell.eps, double(cell.branch), cell.integral,
                    cell.bound, cell.ratio});
  }
  emit(c, "hp_report.json", j);
  collar::write_csv(
      (std::filesystem::path(c.out_dir) / "hp_table.csv").string(),
      {"delta", "eps", "branch", "integral", "bound", "ratio"}, rows);
  return finish(c, rep.verdict);
}

int cmd_estimates(const Common& c, const std::string& part_name) {
  const auto cfg = collar::Config::load(c.config_path);
  const auto spec = collar::problem_from_config(cfg);
  cfg.check_known("estimates", {"delta", "C0", "C1", "n", "k", "theta", "tau"});
  collar::ProofPart part;
  if (part_name == "a") part = collar::ProofPart::a;
  else if (part_name == "b") part = collar::ProofPart::b;
  else if (part_name == "c") part = collar::ProofPart::c;
  else throw CLI::ValidationError("--part must be a|b|c");
  const auto& e = spec.exps;
  const double delta = cfg.get_double("estimates", "delta", std::exp(-10.0));
  const double C0 = cfg.get_double("estimates", "C0", e.sigma + 1.0);
  const double t = -1.0 / std::log(delta);
  const double C1 = cfg.get_double("estimates", "C1",
                                   collar::CutoffConfig::tight_c1(e, C0, t));
  const long n = cfg.get_int("estimates", "n", 1000);
  const double k = cfg.get_double("estimates", "k", 0.25);
  const double theta = cfg.get_double("estimates", "theta", 0.0);
  const double tau = cfg.get_double("estimates", "tau", 2.0);

  const auto cc = collar::CutoffConfig::make(e, delta, C0, C1, n, part);
  const auto rep = collar::proof_integrals(spec, cc, part, k, theta, tau);
  const auto led = collar::exponent_ledger(e.p, e.sigma, k, tau, part);
  const double cancel =
      collar::cutoff_cancellation_residual(delta, C1, e.alpha);

  Json j = base_report(cfg);
  j["part"] = part_name;
  j["delta"] = delta;
  j["t"] = cc.t;
  j["C0"] = C0;
  j["C1"] = C1;
  j["n"] = double(n);
  j["I1"] = rep.I1;
  j["I2"] = rep.I2;
  j["I1_bound"] = rep.I1_bound;
  j["I2_bound"] = rep.I2_bound;
  j["I1_ratio"] = rep.I1_ratio;
  j["I2_ratio"] = rep.I2_ratio;
  if (part == collar::ProofPart::b) j["Lambda"] = rep.Lambda;
  j["ledger_margins_ok"] = led.margins_ok;
  j["ledger_cancellation_ok"] = led.cancellation_ok;
  j["cutoff_cancellation_residual"] = cancel;
  emit(c, "estimates.json", j);
  const bool pass = std::isfinite(rep.I1) && std::isfinite(rep.I2) &&
                    led.margins_ok && led.cancellation_ok && cancel < 1e-12;
  return finish(c, pass);
}

int cmd_eigen(const Common& c, std::vector<double> rhos, int fd_n) {
  const auto cfg = collar::Config::load(c.config_path);
  const auto spec = collar::problem_from_config(cfg);
  cfg.check_known("eigen", {"rho_list", "fd_n"});
  if (rhos.empty()) {
    if (auto v = cfg.get("eigen", "rho_list")) {
      std::istringstream in(*v);
      for (std::string tok; std::getline(in, tok, ',');) {
        rhos.push_back(std::stod(tok));
      }
    } else {
      rhos = {0.5, 0.7, 0.9};
    }
  }
  Json j = base_report(cfg);
  std::vector<std::vector<double>> rows;
  bool pass = true;
  if (rhos.size() >= 2) {
    const auto scan = collar::eigen_scan(spec, rhos);
    j["strictly_decreasing"] = scan.strictly_decreasing;
    j["limit_estimate"] = scan.limit_estimate;
    for (std::size_t i = 0; i < scan.rho.size(); ++i) {
      rows.push_back({scan.rho[i], scan.lambda[i]});
    }
    pass = scan.strictly_decreasing;
  } else {
    const auto eig = collar::first_eigenpair(spec, rhos.at(0));
    j["lambda"] = eig.lambda;
    j["boundary_residual"] = eig.boundary_residual;
    j["ode_residual_norm"] = eig.ode_residual_norm;
    rows.push_back({eig.rho, eig.lambda});
  }
  if (fd_n > 0) {
    const auto oracle = collar::fd_eigen_oracle(spec, rhos.back(), fd_n);
    j["fd_oracle_lambda"] = oracle.lambda;
  }
  emit(c, "eigen.json", j);
  collar::write_csv((std::filesystem::path(c.out_dir) / "eigen.csv").string(),
                    {"rho", "lambda"}, rows);
  return finish(c, pass);
}

int cmd_barrier(const Common& c, double lambda_bar) {
  const auto cfg = collar::Config::load(c.config_path);
  const auto spec = collar::problem_from_config(cfg);
  cfg.check_known("barrier", {"lambda_bar"});
  if (lambda_bar <= 0.0) {
    lambda_bar = cfg.get_double("barrier", "lambda_bar", 0.0);
  }
  if (lambda_bar <= 0.0) {
    const auto eps = collar::blowup_eps(spec.V, spec.exps.sigma);
    if (!eps) {
      throw std::runtime_error(
          "barrier: potential is not of the boundary-blowup family; pass "
          "--lambda-bar");
    }
    lambda_bar = 0.5 * *eps;
  }
  const auto scan = collar::find_delta_negative(spec, lambda_bar);
  Json j = base_report(cfg);
  j["lambda_bar"] = lambda_bar;
  j["verdict"] = scan.ok ? "PASS" : "FAIL";
  if (scan.ok) {
    j["delta"] = scan.delta;
    j["r0"] = scan.r0;
  } else {
    j["note"] = scan.note;
    j["witness_r"] = scan.witness_r;
  }
  emit(c, "barrier.json", j);
  return finish(c, scan.ok);
}

int cmd_counterexample(const Common& c) {
  const auto cfg = collar::Config::load(c.config_path);
  const auto spec = collar::problem_from_config(cfg);
  // Step 0: the growth condition must FAIL for this potential; a passing
  // HP1 would contradict the construction.
  const auto hp = collar::check_hp(spec, collar::HpVariant::HP1);
  const auto run = collar::build_counterexample(spec);
  Json j = base_report(cfg);
  j["hp1_verdict"] = hp.verdict ? "PASS" : "FAIL";
  j["delta"] = run.u.delta;
  j["r0"] = run.u.r0;
  j["rho"] = run.u.rho;
  j["theta"] = run.u.theta;
  j["xi"] = run.u.xi;
  j["gamma"] = run.u.gamma;
  j["lambda_rho"] = run.u.lambda_rho;
  j["lambda_bar"] = run.u.lambda_bar;
  j["min_u"] = run.report.min_u;
  j["max_pointwise_rel"] = run.report.max_pointwise_rel;
  j["max_weak_rel"] = run.report.max_weak_rel;
  j["c1_value_gap"] = run.report.c1_value_gap;
  j["c1_slope_gap"] = run.report.c1_slope_gap;
  j["supersolution_verdict"] = run.report.pass ? "PASS" : "FAIL";
  emit(c, "counterexample.json", j);
  std::vector<std::vector<double>> rows;
  for (int i = 1; i <= 2000; ++i) {
    const double r = i / 2001.0;
    rows.push_back({r, run.u.u(r), run.u.du(r)});
  }
  collar::write_csv(
      (std::filesystem::path(c.out_dir) / "u_profile.csv").string(),
      {"r", "u", "du"}, rows);
  return finish(c, !hp.verdict && run.report.pass);
}

int cmd_report(const Common& c) {
  // Merge the known JSON outputs in --out into a single summary.
  Json summary;
  summary["tool_version"] = collar::kToolVersion;
  bool any = false;
  for (const char* name :
       {"geom.json", "hp_report.json", "estimates.json", "eigen.json",
        "barrier.json", "counterexample.json"}) {
    const auto path = std::filesystem::path(c.out_dir) / name;
    if (!std::filesystem::exists(path)) continue;
    std::ifstream in(path);
    summary[name] = Json::parse(in);
    any = true;
  }
  if (!any) {
    std::fprintf(stderr, "report: no component reports found in %s\n",
                 c.out_dir.c_str());
    return kExitUsage;
  }
  collar::write_json_report(
      (std::filesystem::path(c.out_dir) / "summary.json").string(), summary);
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for weighted elliptic inequalities on "
               "model manifolds"};
  app.set_version_flag("--version", collar::kToolVersion);
  app.require_subcommand(1);

  Common c_geom, c_hp, c_est, c_eig, c_bar, c_cex, c_rep;
  std::string variant = "hp1", part = "a";
  std::vector<double> rhos;
  int fd_n = 0;
  double lambda_bar = 0.0;

  add_common(app.add_subcommand("geom", "manifold geometry facts"), c_geom);
  auto* hp = app.add_subcommand("hp-check", "growth condition verdict");
  add_common(hp, c_hp);
  hp->add_option("--variant", variant, "hp1|hp2|hp3");
  auto* est = app.add_subcommand("estimates", "proof integral decay");
  add_common(est, c_est);
  est->add_option("--part", part, "a|b|c");
  auto* eig = app.add_subcommand("eigen", "weighted eigenvalue scan");
  add_common(eig, c_eig);
  eig->add_option("--rho", rhos, "ball radii (repeatable)");
  eig->add_option("--fd-oracle", fd_n, "also run the FD oracle with N cells");
  auto* bar = app.add_subcommand("barrier", "boundary barrier residual scan");
  add_common(bar, c_bar);
  bar->add_option("--lambda-bar", lambda_bar, "barrier exponent");
  add_common(app.add_subcommand("counterexample", "full construction"), c_cex);
  auto* rp = app.add_subcommand("report", "merge reports in --out");
  rp->add_option("--out", c_rep.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (app.got_subcommand("geom")) return cmd_geom(c_geom);
    if (app.got_subcommand("hp-check")) return cmd_hp(c_hp, variant);
    if (app.got_subcommand("estimates")) return cmd_estimates(c_est, part);
    if (app.got_subcommand("eigen")) return cmd_eigen(c_eig, rhos, fd_n);
    if (app.got_subcommand("barrier")) return cmd_barrier(c_bar, lambda_bar);
    if (app.got_subcommand("counterexample")) return cmd_counterexample(c_cex);
    if (app.got_subcommand("report")) return cmd_report(c_rep);
  } catch (const collar::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
