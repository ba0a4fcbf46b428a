// Randomized invariant harness: 100 generated problem specifications run
// through the cheap algebraic invariants, plus a smaller eigen-backed batch
// (the solver-based properties cost real time per spec).

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "collar/barrier.hpp"
#include "collar/estimates.hpp"
#include "collar/growth.hpp"
#include "collar/spectral.hpp"

using namespace collar;

namespace {

struct RandomSpec {
  ProblemSpec spec;
  PlePiece vpiece;
};

RandomSpec draw_spec(std::mt19937& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  RandomSpec out;
  const int m = 2 + int(U(rng) * 3.0);  // 2..4
  out.spec.manifold = make_manifold(
      m, U(rng) < 0.5 ? WarpingFunction::euclidean()
                      : WarpingFunction::hyperbolic());
  const double p = 1.5 + U(rng) * 1.5;          // (1.5, 3)
  const double sigma = p - 1.0 + 1.0 + U(rng);  // sigma > p - 1 with margin
  out.spec.exps = exponents(p, sigma);
  PlePiece v;
  v.d_cut = 0.25 + 0.5 * U(rng);
  v.c = 0.5 + 4.5 * U(rng);
  v.q = -4.0 * U(rng);
  v.s = -1.5 + 3.0 * U(rng);
  v.theta = U(rng) < 0.3 ? 0.5 * U(rng) : 0.0;
  v.tau = 1.0 + U(rng);
  out.vpiece = v;
  out.spec.V = PleFunction(v);
  PlePiece a;
  a.d_cut = 1.0;
  a.c = 0.5 + U(rng);
  a.q = U(rng);  // bounded weight
  out.spec.a = PleFunction(a);
  out.spec.validate();
  return out;
}

}  // namespace

TEST_CASE("algebraic invariants over 100 random specs") {
  std::mt19937 rng(20260823);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    CAPTURE(trial);
    const auto rs = draw_spec(rng);
    const auto& spec = rs.spec;
    const auto& e = spec.exps;

    // Exponent identities: alpha = p(beta + 1) and alpha > 1, beta > 0.
    REQUIRE(e.alpha == Catch::Approx(e.p * (e.beta + 1.0)).epsilon(1e-12));
    REQUIRE(e.alpha > 1.0);
    REQUIRE(e.beta > 0.0);

    // Positivity of V and a across the collar, in log space.
    for (double d : {1e-12, 1e-6, 0.01, 0.5, 0.99}) {
      REQUIRE(std::isfinite(spec.V.log_eval(d)));
      REQUIRE(std::isfinite(spec.a.log_eval(d)));
    }

    // Power algebra: (V^x)^y == V^{xy} pointwise.
    const double x = -1.0 + 2.0 * U(rng);
    const double y = 0.25 + U(rng);
    const auto once = spec.V.pow(x * y);
    const auto twice = spec.V.pow(x).pow(y);
    for (double d : {1e-8, 0.1, 0.8}) {
      REQUIRE(twice.log_eval(d) ==
              Catch::Approx(once.log_eval(d)).margin(1e-10));
    }

    // Text round trip preserves values.
    const auto back = parse_ple(to_text(spec.V));
    for (double d : {1e-10, 0.03, 0.6}) {
      REQUIRE(back.log_eval(d) ==
              Catch::Approx(spec.V.log_eval(d)).margin(1e-12));
    }

    // Collar additivity: S^delta = annulus + S^{delta/2}, when finite.
    const double expnt = -e.beta + 0.6 * e.beta;  // integrable side
    const double delta = 1.0 / 16.0;
    const double whole = collar_integral(spec, expnt, delta);
    if (std::isfinite(whole) && whole > 0.0) {
      const double part = annulus_integral(spec, expnt, delta) +
                          collar_integral(spec, expnt, delta / 2.0);
      REQUIRE(part == Catch::Approx(whole).epsilon(1e-8));
      REQUIRE(collar_integral(spec, expnt, delta / 2.0) <= whole);
    }

    // Cutoff profile: phi_n is within [0, 1] and monotone in d on samples.
    const double C0 = 2.0 + 2.0 * U(rng);
    const double dlt = std::exp(-2.0 - 6.0 * U(rng));
    const double t = -1.0 / std::log(dlt);
    const double C1 = CutoffConfig::tight_c1(e, C0, t) + U(rng);
    const auto cfg = CutoffConfig::make(e, dlt, C0, C1, 64, ProofPart::a);
    double prev = -1.0;
    for (double frac : {0.004, 0.01, 0.06, 0.3, 0.9, 2.0}) {
      const auto ev = cutoff_eval(cfg, frac * dlt);
      REQUIRE(ev.phi_n >= 0.0);
      REQUIRE(ev.phi_n <= 1.0);
      REQUIRE(ev.phi_n >= prev - 1e-12);
      prev = ev.phi_n;
    }

    // Exact cutoff cancellation at the drawn delta.
    REQUIRE(cutoff_cancellation_residual(dlt, C1, e.alpha) < 1e-12);
  }
}

TEST_CASE("solver-backed invariants over random specs") {
  std::mt19937 rng(987654321);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int done = 0;
  for (int trial = 0; trial < 15; ++trial) {
    CAPTURE(trial);
    auto rs = draw_spec(rng);
    // Keep the eigen batch to integrable, boundary-tame potentials: redraw
    // the boundary piece with q in (-1, 0], s >= 0 and no exponential factor.
    PlePiece tame;
    tame.d_cut = rs.vpiece.d_cut;
    tame.c = rs.vpiece.c;
    tame.q = -0.9 * U(rng);
    tame.s = 1.2 * U(rng);
    rs.spec.V = PleFunction(tame);
    const auto& spec = rs.spec;
    ++done;

    // Domain monotonicity.
    const auto lo = first_eigenpair(spec, 0.6);
    const auto hi = first_eigenpair(spec, 0.8);
    REQUIRE(hi.lambda < lo.lambda);
    REQUIRE(lo.lambda > 0.0);

    // Potential scaling: lambda(2V) = lambda(V)/2.
    auto scaled = spec;
    scaled.V = [&] {
      auto pieces = spec.V.pieces();
      for (auto& p : pieces) p.c *= 2.0;
      return PleFunction(pieces);
    }();
    REQUIRE(first_eigenpair(scaled, 0.8).lambda ==
            Catch::Approx(hi.lambda / 2.0).epsilon(1e-8));

    // Rayleigh consistency: the computed pair attains its own quotient, and
    // any admissible trial sits above it.
    REQUIRE(rayleigh_quotient(spec, hi, 0.8) ==
            Catch::Approx(hi.lambda).epsilon(1e-4));
    REQUIRE(tent_rayleigh(spec, 0.8) >= hi.lambda * (1.0 - 1e-10));

    // Positivity of the ground branch.
    for (double r : {0.1, 0.4, 0.7}) {
      REQUIRE(hi.w(r) > 0.0);
    }
  }
  REQUIRE(done == 15);
}
