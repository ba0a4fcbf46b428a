// Acceptance gate: one pass/fail line per criterion, with timings.
// Exit code is the number of failed criteria (0 = all green).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "collar/barrier.hpp"
#include "collar/estimates.hpp"
#include "collar/growth.hpp"
#include "collar/spectral.hpp"

using namespace collar;

namespace {

using Clock = std::chrono::steady_clock;

struct Gate {
  int failures = 0;

  void report(int id, const std::string& name, bool ok, Clock::time_point t0,
              const std::string& detail = "") {
    const double secs =
        std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("[%s] %d. %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL", id,
                name.c_str(), secs, detail.empty() ? "" : " -- ",
                detail.c_str());
    if (!ok) ++failures;
  }
};

ProblemSpec const_spec(int m, double c = 1.0) {
  ProblemSpec spec;
  spec.manifold = make_manifold(m, WarpingFunction::euclidean());
  spec.exps = exponents(2.0, 3.0);
  spec.V = PleFunction::constant(c);
  spec.validate();
  return spec;
}

ProblemSpec blowup_spec() {
  ProblemSpec spec;
  spec.manifold = make_manifold(2, WarpingFunction::euclidean());
  spec.exps = exponents(2.0, 3.0);
  spec.V = blowup_potential(0.01, 3.0, 0.25);
  spec.validate();
  return spec;
}

ProblemSpec expdecay_spec() {
  ProblemSpec spec;
  spec.manifold = make_manifold(2, WarpingFunction::euclidean());
  spec.exps = exponents(2.0, 3.0);
  spec.a = parse_ple("1*d^2*L^1*exp(-0.5*L^2)@0.36787944117144233");
  spec.V = parse_ple("1*d^0*L^0*exp(-1*L^2)@0.36787944117144233");
  spec.validate();
  return spec;
}

ProblemSpec powerlog_spec() {
  ProblemSpec spec;
  spec.manifold = make_manifold(2, WarpingFunction::euclidean());
  spec.exps = exponents(2.0, 3.0);
  spec.V = parse_ple("1*d^-4*L^-0.5*exp(-0*L^1)@0.5");
  spec.validate();
  return spec;
}

double bessel_j0_root() {
  return bisect_root([](double x) { return std::cyl_bessel_j(0.0, x); }, 2.0,
                     3.0, 1e-15);
}

bool rel_ok(double got, double want, double tol) {
  return std::abs(got - want) <= tol * std::abs(want);
}

}  // namespace

int main() {
  Gate gate;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double j01sq = [] {
    const double r = bessel_j0_root();
    return r * r;
  }();

  // 1. Eigenvalue oracles against closed forms.
  {
    const auto t0 = Clock::now();
    bool ok = true;
    ok &= rel_ok(first_eigenpair(const_spec(3), 1.0).lambda, pi2, 1e-6);
    ok &= rel_ok(first_eigenpair(const_spec(2), 1.0).lambda, j01sq, 1e-6);
    ok &= rel_ok(fd_eigen_oracle(const_spec(3), 1.0, 2000).lambda, pi2, 1e-3);
    ok &= rel_ok(fd_eigen_oracle(const_spec(2), 1.0, 2000).lambda, j01sq, 1e-3);
    gate.report(1, "eigenvalue oracles (pi^2, first J0 root squared)", ok, t0);
  }

  // 2. Domain and potential monotonicity.
  {
    const auto t0 = Clock::now();
    bool ok = eigen_scan(const_spec(2), {0.5, 0.7, 0.9, 0.99})
                  .strictly_decreasing;
    const auto spec = blowup_spec();
    const double base = first_eigenpair(spec, 0.9).lambda;
    for (double c : {0.5, 2.0, 10.0}) {
      auto scaled = spec;
      auto pieces = spec.V.pieces();
      for (auto& p : pieces) p.c *= c;
      scaled.V = PleFunction(pieces);
      ok &= rel_ok(first_eigenpair(scaled, 0.9).lambda, base / c, 1e-8);
    }
    gate.report(2, "domain monotonicity and potential scaling", ok, t0);
  }

  // 3. Vanishing bottom of the weighted spectrum for the blow-up potential.
  {
    const auto t0 = Clock::now();
    const auto spec = blowup_spec();
    const double l9 = first_eigenpair(spec, 0.9).lambda;
    const double l999 = first_eigenpair(spec, 0.999).lambda;
    bool ok = l999 < 0.1 * l9;
    // Certificate ratios should track alpha linearly within a factor of 2.
    double lo = 1e300, hi = 0.0;
    for (double alpha : {1.0, 0.1, 0.01}) {
      const auto cert = spectral_test_function(spec, alpha);
      ok &= cert.hypothesis_ok && cert.bound_ok && cert.vanishing_ok;
      const double per_alpha = cert.ratio / alpha;
      lo = std::min(lo, per_alpha);
      hi = std::max(hi, per_alpha);
    }
    const bool proportional = hi <= 2.0 * lo;
    char detail[128];
    std::snprintf(detail, sizeof detail,
                  "lambda(0.999)/lambda(0.9) = %.3g, ratio/alpha spread %.2fx",
                  l999 / l9, hi / lo);
    gate.report(3, "eigenvalue collapse and certificate scaling",
                ok && proportional, t0, detail);
  }

  // 4. Growth-condition verdicts on the three reference families.
  {
    const auto t0 = Clock::now();
    HpParams decay_params;
    decay_params.k = 1.0;
    decay_params.theta = 1.0;
    decay_params.tau = 2.0;
    const auto decay = expdecay_spec();
    bool ok = check_hp(decay, HpVariant::HP3, decay_params).verdict;
    ok &= !check_hp(decay, HpVariant::HP1, decay_params).verdict;

    const auto blow = blowup_spec();
    for (auto v : {HpVariant::HP1, HpVariant::HP2, HpVariant::HP3}) {
      const auto rep = check_hp(blow, v, HpParams{});
      ok &= !rep.verdict;
      ok &= std::abs(rep.fitted_log_exponent - 0.75) <= 0.05;
    }

    HpParams power_params;
    power_params.k = 0.25;
    power_params.C0 = 4.0;
    ok &= check_hp(powerlog_spec(), HpVariant::HP1, power_params).verdict;
    gate.report(4, "growth-condition verdicts on reference families", ok, t0);
  }

  // 5. Cutoff-estimate decay rates and the exact cancellation.
  {
    const auto t0 = Clock::now();
    const auto spec = powerlog_spec();
    const auto& e = spec.exps;
    const double delta = std::exp(-10.0);
    const double k = 0.25, C0 = 4.0;

    // I2 vs n at fixed delta, log factor of the bound divided out.
    const double C1n = CutoffConfig::tight_c1(e, C0, 0.1);
    std::vector<double> logn, logI2;
    for (long n : {100L, 1000L, 10000L}) {
      const auto cfg = CutoffConfig::make(e, delta, C0, C1n, n, ProofPart::a);
      const auto rep = proof_integrals(spec, cfg, ProofPart::a, k);
      logn.push_back(std::log(double(n)));
      logI2.push_back(std::log(rep.I2) -
                      k * std::log(-std::log(delta / double(n))));
    }
    const double slope2 = fit_line(logn, logI2).slope;
    const double want2 = -0.1 / (e.sigma - e.p + 1.0);
    bool ok = std::abs(slope2 - want2) <= 0.1 * std::abs(want2);

    // I1 vs t with C1 fixed across the sweep.
    std::vector<double> logt, logI1;
    for (double t : {0.05, 0.1, 0.2}) {
      const auto cfg = CutoffConfig::make(e, std::exp(-1.0 / t), C0, 4.0, 1000,
                                          ProofPart::a);
      logt.push_back(std::log(t));
      logI1.push_back(std::log(proof_integrals(spec, cfg, ProofPart::a, k).I1));
    }
    const double slope1 = fit_line(logt, logI1).slope;
    const double want1 = e.p * (e.sigma - 0.1) / (e.sigma - e.p + 1.0) - k - 1.0;
    ok &= std::abs(slope1 - want1) <= 0.1 * std::abs(want1);

    for (double d : {1e-3, 1e-6, 1e-12}) {
      ok &= cutoff_cancellation_residual(d, 2.0, 3.0) < 1e-12;
    }
    char detail[128];
    std::snprintf(detail, sizeof detail,
                  "I2 slope %.4f (want %.4f), I1 slope %.3f (want %.3f)",
                  slope2, want2, slope1, want1);
    gate.report(5, "cutoff-estimate decay rates and cancellation", ok, t0,
                detail);
  }

  // 6. Full counterexample pipeline.
  {
    const auto t0 = Clock::now();
    const auto run = build_counterexample(blowup_spec(), 0.0, 10000, 1e-8);
    bool ok = run.report.pass;
    ok &= run.report.min_u > 0.0;
    ok &= run.u.c1_value_gap <= 1e-6 && run.u.c1_slope_gap <= 1e-6;
    ok &= run.report.max_pointwise_rel <= 1e-8;
    ok &= run.report.weak_values.size() == 20;
    ok &= run.report.max_weak_rel <= 1e-8;
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "min u = %.3g, C1 gap %.2g, signed residual sup %.2g, "
                  "signed weak sup %.2g",
                  run.report.min_u,
                  std::max(run.u.c1_value_gap, run.u.c1_slope_gap),
                  run.report.max_pointwise_rel, run.report.max_weak_rel);
    gate.report(6, "glued positive supersolution pipeline", ok, t0, detail);
  }

  // 7. Weighted vs generalized weak formulation.
  {
    const auto t0 = Clock::now();
    ProblemSpec spec;
    spec.manifold = make_manifold(2, WarpingFunction::euclidean());
    spec.exps = exponents(2.0, 3.0);
    spec.a = parse_ple("2*d^0.5*L^0*exp(-0*L^1)@1");
    spec.V = blowup_potential(0.01, 3.0, 0.25);
    spec.validate();
    auto u = [](double r) { return 1.0 - r * r; };
    auto du = [](double r) { return -2.0 * r; };
    bool ok = true;
    int pairs = 0;
    for (int jd = 2; jd <= 6; ++jd) {
      for (int n : {2, 8}) {
        Ramp ramp{std::pow(2.0, -jd), n};
        const double general = weak_integral(spec, u, du, ramp).value();
        const double literal =
            weak_integral_weighted_literal(spec, u, du, ramp).value();
        const double scale =
            std::max({1.0, std::abs(general), std::abs(literal)});
        ok &= std::abs(general - literal) <= 1e-10 * scale;
        ++pairs;
      }
    }
    ok &= pairs == 10;
    gate.report(7, "formulation equivalence with a non-constant weight", ok,
                t0);
  }

  // 8. Randomized invariant harness: 100 specs, algebraic invariants plus a
  // solver-backed subset.
  {
    const auto t0 = Clock::now();
    std::mt19937 rng(8675309);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    bool ok = true;
    for (int trial = 0; trial < 100 && ok; ++trial) {
      ProblemSpec spec;
      const int m = 2 + int(U(rng) * 3.0);
      spec.manifold = make_manifold(
          m, U(rng) < 0.5 ? WarpingFunction::euclidean()
                          : WarpingFunction::hyperbolic());
      const double p = 1.5 + U(rng) * 1.5;
      spec.exps = exponents(p, p + U(rng));
      PlePiece v;
      v.d_cut = 0.25 + 0.5 * U(rng);
      v.c = 0.5 + 4.5 * U(rng);
      v.q = -4.0 * U(rng);
      v.s = -1.5 + 3.0 * U(rng);
      v.theta = U(rng) < 0.3 ? 0.5 * U(rng) : 0.0;
      v.tau = 1.0 + U(rng);
      spec.V = PleFunction(v);
      spec.validate();
      const auto& e = spec.exps;

      ok &= rel_ok(e.alpha, e.p * (e.beta + 1.0), 1e-12);
      for (double d : {1e-12, 0.01, 0.99}) {
        ok &= std::isfinite(spec.V.log_eval(d));
      }
      const double x = -1.0 + 2.0 * U(rng), y = 0.25 + U(rng);
      for (double d : {1e-8, 0.1, 0.8}) {
        ok &= std::abs(spec.V.pow(x).pow(y).log_eval(d) -
                       spec.V.pow(x * y).log_eval(d)) <= 1e-10;
      }
      const auto back = parse_ple(to_text(spec.V));
      for (double d : {1e-10, 0.6}) {
        ok &= std::abs(back.log_eval(d) - spec.V.log_eval(d)) <= 1e-12;
      }
      const double expnt = -0.4 * e.beta;
      const double whole = collar_integral(spec, expnt, 1.0 / 16.0);
      if (std::isfinite(whole) && whole > 0.0) {
        const double part = annulus_integral(spec, expnt, 1.0 / 16.0) +
                            collar_integral(spec, expnt, 1.0 / 32.0);
        ok &= rel_ok(part, whole, 1e-6);
      }
      ok &= cutoff_cancellation_residual(std::exp(-2.0 - 6.0 * U(rng)),
                                         1.0 + U(rng), e.alpha) < 1e-12;

      // Solver-backed Rayleigh consistency on a tame subset.
      if (trial % 20 == 0) {
        PlePiece tame;
        tame.d_cut = v.d_cut;
        tame.c = v.c;
        tame.q = -0.9 * U(rng);
        tame.s = 1.2 * U(rng);
        auto tspec = spec;
        tspec.V = PleFunction(tame);
        const auto lo = first_eigenpair(tspec, 0.6);
        const auto hi = first_eigenpair(tspec, 0.8);
        ok &= hi.lambda < lo.lambda && lo.lambda > 0.0;
        ok &= rel_ok(rayleigh_quotient(tspec, hi, 0.8), hi.lambda, 1e-4);
        ok &= tent_rayleigh(tspec, 0.8) >= hi.lambda * (1.0 - 1e-10);
      }
    }
    gate.report(8, "randomized invariant harness (100 specs)", ok, t0);
  }

  std::printf("%d/8 criteria passed\n", 8 - gate.failures);
  return gate.failures;
}
