#pragma once

// Boundary-layer barrier zeta(r) = (1 - r) L^lambda with L = -log(1 - r),
// its residual sign analysis, the C^1 gluing with the Dirichlet
// eigenfunction on B_rho, and verification that the assembled function is a
// positive supersolution in both pointwise and weak senses.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "spectral.hpp"

namespace collar {

struct ZetaEval {
  double zeta, dzeta, ddzeta;
};

// zeta = d L^lambda, zeta' = -L^lambda + lambda L^{lambda-1},
// zeta'' = (lambda / d) L^{lambda-2} ((lambda - 1) - L), all with d = 1 - r.
inline ZetaEval zeta_eval(double lambda_bar, double r) {
  if (!(r > 0.0) || !(r < 1.0)) {
    throw std::domain_error("zeta_eval: r must lie in (0, 1)");
  }
  if (!(lambda_bar > 0.0)) {
    throw std::domain_error("zeta_eval: lambda must be positive");
  }
  const double d = 1.0 - r;
  const double L = -std::log(d);
  ZetaEval z;
  z.zeta = d * std::pow(L, lambda_bar);
  z.dzeta = -std::pow(L, lambda_bar) + lambda_bar * std::pow(L, lambda_bar - 1.0);
  z.ddzeta =
      lambda_bar / d * std::pow(L, lambda_bar - 2.0) * ((lambda_bar - 1.0) - L);
  return z;
}

inline double zeta_laplacian(const ModelManifold& M, double lambda_bar,
                             double r) {
  const auto z = zeta_eval(lambda_bar, r);
  const auto w = warp_eval(M.psi, r);
  return z.ddzeta + double(M.m - 1) * (w.dpsi / w.psi) * z.dzeta;
}

// Residual Delta zeta + V zeta^sigma in factored form: the common prefactor
// L^{lambda-2}/d is pulled out so that every bracket term stays moderate even
// where V blows up like d^{-(sigma+1)}.
inline double zeta_residual(const ProblemSpec& spec, double lambda_bar,
                            double r) {
  const double lam = lambda_bar;
  const double d = spec.dist(r);
  if (!(d > 0.0) || !(d < 1.0)) {
    throw std::domain_error("zeta_residual: r must lie in (0, 1)");
  }
  const double L = -std::log(d);
  const double sigma = spec.exps.sigma;
  const auto w = warp_eval(spec.manifold.psi, r);
  const double F = double(spec.manifold.m - 1) * (w.dpsi / w.psi);
  // V zeta^sigma divided by the prefactor, assembled in log space.
  const double logV = spec.V.log_eval(d);
  const double logvt =
      logV + sigma * (std::log(d) + lam * std::log(L)) + std::log(d) +
      (2.0 - lam) * std::log(L);
  const double vterm = logvt < -745.0 ? 0.0 : std::exp(logvt);
  const double bracket =
      lam * (lam - 1.0) - lam * L + F * d * (lam * L - L * L) + vterm;
  const double logpre = (lam - 2.0) * std::log(L) - std::log(d);
  return std::exp(logpre) * bracket;
}

// Direct evaluation (analytic zeta derivatives + log-space V zeta^sigma),
// used as an independent cross-check of the factored form away from r = 1.
inline double zeta_residual_direct(const ProblemSpec& spec, double lambda_bar,
                                   double r) {
  const double d = spec.dist(r);
  const double L = -std::log(d);
  const double sigma = spec.exps.sigma;
  const double logvz = spec.V.log_eval(d) +
                       sigma * (std::log(d) + lambda_bar * std::log(L));
  const double vz = logvz < -745.0 ? 0.0 : std::exp(logvz);
  return zeta_laplacian(spec.manifold, lambda_bar, r) + vz;
}

struct DeltaScan {
  bool ok = false;
  double delta = 0.0;
  double r0 = 0.0;
  double witness_r = 0.0;  // first violating radius of the last failed delta
  std::string note;
};

// Largest dyadic delta <= 1/4 such that the residual and zeta' are both
// negative on a graded sample of (1 - delta, 1).
inline DeltaScan find_delta_negative(const ProblemSpec& spec,
                                     double lambda_bar, int samples = 10'000) {
  DeltaScan scan;
  for (double delta = 0.25; delta >= 1e-8; delta *= 0.5) {
    bool good = true;
    // Graded: d log-spaced from delta down to 1e-12.
    const double lo = std::log(1e-12), hi = std::log(delta);
    for (int i = 0; i < samples && good; ++i) {
      const double d = std::exp(hi + (lo - hi) * i / double(samples - 1));
      const double r = 1.0 - d;
      if (!(zeta_residual(spec, lambda_bar, r) < 0.0) ||
          !(zeta_eval(lambda_bar, r).dzeta < 0.0)) {
        good = false;
        scan.witness_r = r;
      }
    }
    if (good) {
      scan.ok = true;
      scan.delta = delta;
      scan.r0 = 1.0 - delta;
      return scan;
    }
  }
  scan.note = "no delta down to 1e-8 makes the residual negative";
  return scan;
}

struct GluedSupersolution {
  double lambda_bar = 0.0;
  double delta = 0.0;
  double r0 = 0.0;
  double rho = 0.0;
  double theta = 0.0;
  double xi = 0.0;
  double gamma = 1.0;
  double lambda_rho = 0.0;
  double sigma = 3.0;
  double scale = 1.0;  // gamma^{1/(sigma-1)}, times any extra test factor
  double c1_value_gap = 0.0;
  double c1_slope_gap = 0.0;
  EigenResult eig;

  double u(double r) const {
    if (r <= xi) return scale * theta * eig.w(r);
    const auto z = zeta_eval(lambda_bar, r);
    return scale * z.zeta;
  }
  double du(double r) const {
    if (r <= xi) return scale * theta * eig.dw(r);
    const auto z = zeta_eval(lambda_bar, r);
    return scale * z.dzeta;
  }
  GluedSupersolution scaled(double c) const {
    if (!(c > 0.0) || c > 1.0) {
      throw std::invalid_argument("scaled: factor must lie in (0, 1]");
    }
    GluedSupersolution out = *this;
    out.scale *= c;
    return out;
  }
};

inline bool slope_condition_ok(const EigenResult& eig, double lambda_bar,
                               double r0) {
  const auto z = zeta_eval(lambda_bar, r0);
  const auto [w, dw] = eig.eval(r0);
  return dw / w > z.dzeta / z.zeta;
}

inline GluedSupersolution glue(const ProblemSpec& spec, const EigenResult& eig,
                               double lambda_bar, double r0,
                               int grid = 10'000) {
  if (!(eig.rho > r0)) {
    throw std::invalid_argument("glue: requires rho > r0");
  }
  if (!slope_condition_ok(eig, lambda_bar, r0)) {
    throw std::runtime_error(
        "glue: slope condition fails at r0; increase rho");
  }
  auto ratio = [&](double r) {
    return zeta_eval(lambda_bar, r).zeta / eig.w(r);
  };
  // theta = inf over [r0, rho) of zeta / w_rho; coarse grid then
  // golden-section refinement around the discrete argmin.
  const double rho = eig.rho;
  int best = 0;
  double best_val = ratio(r0);
  for (int i = 1; i < grid; ++i) {
    const double r = r0 + (rho - r0) * i / double(grid);
    if (r >= rho) break;
    const double v = ratio(r);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  if (best == 0) {
    throw std::runtime_error(
        "glue: infimum attained at r0 (matching failure; check solver "
        "tolerances)");
  }
  const double a = r0 + (rho - r0) * (best - 1) / double(grid);
  const double b = std::min(r0 + (rho - r0) * (best + 1) / double(grid),
                            rho * (1.0 - 1e-12));
  GluedSupersolution g;
  g.xi = golden_minimize(ratio, a, b, 1e-14);
  g.theta = ratio(g.xi);
  g.lambda_bar = lambda_bar;
  g.delta = 1.0 - r0;
  g.r0 = r0;
  g.rho = rho;
  g.sigma = spec.exps.sigma;
  g.lambda_rho = eig.lambda;
  g.gamma = std::min(eig.lambda / std::pow(g.theta, g.sigma - 1.0), 1.0);
  g.scale = std::pow(g.gamma, 1.0 / (g.sigma - 1.0));
  g.eig = eig;
  const auto z = zeta_eval(lambda_bar, g.xi);
  const auto [w, dw] = eig.eval(g.xi);
  g.c1_value_gap = std::abs(z.zeta - g.theta * w);
  g.c1_slope_gap = std::abs(z.dzeta - g.theta * dw);
  return g;
}

// ---- weak-form machinery ---------------------------------------------------

// Piecewise-linear radial cutoff: 1 for d >= delta, linear ramp down to 0 as
// d falls from delta to delta/n, 0 for d <= delta/n.
struct Ramp {
  double delta = 0.25;
  int n = 2;

  double psi(double r) const {
    const double d = 1.0 - r;
    if (d >= delta) return 1.0;
    const double dn = delta / n;
    if (d <= dn) return 0.0;
    return (d - dn) / (delta - dn);
  }
  double dpsi(double r) const {
    const double d = 1.0 - r;
    const double dn = delta / n;
    if (d >= delta || d <= dn) return 0.0;
    return -1.0 / (delta - dn);
  }
  // Radii where psi or the integrand may kink.
  std::vector<double> corners() const {
    return {1.0 - delta, 1.0 - delta / n};
  }
};

namespace detail {

// d/dd of log f for the active PLE piece (constant interior region -> 0).
inline double ple_dlog_dd(const PleFunction& f, double d) {
  const PlePiece* active = nullptr;
  for (const auto& p : f.pieces()) {
    if (d <= p.d_cut) {
      active = &p;
      break;
    }
  }
  if (!active) return 0.0;  // constant extension inward
  const double L = -std::log(d);
  double g = active->q / d;
  if (active->s != 0.0) g -= active->s / (d * L);
  if (active->theta != 0.0) {
    g += active->theta * active->tau * std::pow(L, active->tau - 1.0) / d;
  }
  return g;
}

template <class F>
double piecewise_integrate(F&& f, double lo, double hi,
                           std::vector<double> cuts) {
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = std::max(cuts[i], lo);
    const double b = std::min(cuts[i + 1], hi);
    if (b - a > 1e-15) total += integrate(f, a, b, kQuadAbsTol, 1e-10);
  }
  return total;
}

}  // namespace detail

// Generalized weak form (p = 2) against the weighted measure dmu = a dmu0:
//   -int <grad u, grad psi> dmu + int V u^sigma psi dmu.
// Returns the two addends separately so callers can normalize.
struct WeakIntegral {
  double gradient_term = 0.0;   // the (negative-signed) first addend
  double potential_term = 0.0;  // the second addend
  double value() const { return gradient_term + potential_term; }
};

template <class U, class DU>
WeakIntegral weak_integral(const ProblemSpec& spec, U&& u, DU&& du,
                           const Ramp& ramp,
                           std::vector<double> extra_cuts = {}) {
  const double sigma = spec.exps.sigma;
  auto mu = [&](double r) {
    return spec.a.eval(spec.dist(r)) * surface_area(spec.manifold, r);
  };
  auto cuts = ramp.corners();
  cuts.insert(cuts.end(), extra_cuts.begin(), extra_cuts.end());
  WeakIntegral W;
  W.gradient_term = detail::piecewise_integrate(
      [&](double r) { return -du(r) * ramp.dpsi(r) * mu(r); }, kPoleStart,
      1.0 - 1e-14, cuts);
  W.potential_term = detail::piecewise_integrate(
      [&](double r) {
        const double uv = u(r);
        return spec.V.eval(spec.dist(r)) * std::pow(uv, sigma) * ramp.psi(r) *
               mu(r);
      },
      kPoleStart, 1.0 - 1e-14, cuts);
  return W;
}

// Literal weighted weak form with test function phi = a psi and the gradient
// of phi/a recovered through the quotient rule (an independent evaluation
// path; algebraically it collapses to weak_integral).
template <class U, class DU>
WeakIntegral weak_integral_weighted_literal(const ProblemSpec& spec, U&& u,
                                            DU&& du, const Ramp& ramp,
                                            std::vector<double> extra_cuts = {}) {
  const double sigma = spec.exps.sigma;
  auto cuts = ramp.corners();
  cuts.insert(cuts.end(), extra_cuts.begin(), extra_cuts.end());
  auto a_of = [&](double r) { return spec.a.eval(spec.dist(r)); };
  auto da_of = [&](double r) {
    const double d = spec.dist(r);
    // d/dr a(1 - r) = -a'(d)
    return -a_of(r) * detail::ple_dlog_dd(spec.a, d);
  };
  WeakIntegral W;
  W.gradient_term = detail::piecewise_integrate(
      [&](double r) {
        const double av = a_of(r);
        const double phi = av * ramp.psi(r);
        const double dphi = da_of(r) * ramp.psi(r) + av * ramp.dpsi(r);
        const double dquot = (dphi * av - phi * da_of(r)) / (av * av);
        return -av * du(r) * dquot * surface_area(spec.manifold, r);
      },
      kPoleStart, 1.0 - 1e-14, cuts);
  W.potential_term = detail::piecewise_integrate(
      [&](double r) {
        const double uv = u(r);
        return spec.V.eval(spec.dist(r)) * std::pow(uv, sigma) * a_of(r) *
               ramp.psi(r) * surface_area(spec.manifold, r);
      },
      kPoleStart, 1.0 - 1e-14, cuts);
  return W;
}

// ---- supersolution verification --------------------------------------------

struct SupersolutionReport {
  bool pass = false;
  double min_u = 0.0;
  double max_pointwise_rel = 0.0;  // signed residual / |V u^sigma|, sup
  double witness_r = 0.0;
  double max_weak_rel = 0.0;  // weak value / potential term, sup over ramps
  std::vector<double> weak_values;
  double c1_value_gap = 0.0;
  double c1_slope_gap = 0.0;
  std::string note;
};

inline SupersolutionReport verify_supersolution(const ProblemSpec& spec,
                                                const GluedSupersolution& g,
                                                int grid_n = 2000,
                                                double tol = 1e-8) {
  SupersolutionReport rep;
  rep.c1_value_gap = g.c1_value_gap;
  rep.c1_slope_gap = g.c1_slope_gap;
  const double sigma = g.sigma;
  const double s = g.scale;
  const double window = 1e-7;
  rep.min_u = std::numeric_limits<double>::infinity();
  rep.max_pointwise_rel = -std::numeric_limits<double>::infinity();
  auto record = [&](double r, double residual, double potential) {
    const double rel = residual / std::abs(potential);
    if (rel > rep.max_pointwise_rel) {
      rep.max_pointwise_rel = rel;
      rep.witness_r = r;
    }
    rep.min_u = std::min(rep.min_u, g.u(r));
  };
  // Inner region [pole, xi - window]: u = s theta w with w the eigenfunction,
  // so Delta u = -s theta lambda_rho V w and the residual collapses to
  //   s theta V w ((s theta)^{sigma-1} w^{sigma-1} - lambda_rho).
  const int n_in = grid_n / 2;
  for (int i = 0; i <= n_in; ++i) {
    const double r =
        kPoleStart + (g.xi - window - kPoleStart) * i / double(n_in);
    const double w = g.eig.w(r);
    const double V = spec.V.eval(spec.dist(r));
    const double st = s * g.theta;
    const double residual =
        st * V * w * (std::pow(st * w, sigma - 1.0) - g.lambda_rho);
    const double potential = V * std::pow(st * w, sigma);
    record(r, residual, potential);
  }
  // Outer region [xi + window, 1): u = s zeta; analytic derivatives, with
  // the V term scaled by s^{sigma-1} = gamma (or less, for scaled copies).
  const int n_out = grid_n - n_in;
  const double d_hi = 1.0 - (g.xi + window);
  for (int i = 0; i <= n_out; ++i) {
    const double d =
        std::exp(std::log(d_hi) +
                 (std::log(1e-10) - std::log(d_hi)) * i / double(n_out));
    const double r = 1.0 - d;
    const double lap = s * zeta_laplacian(spec.manifold, g.lambda_bar, r);
    const double L = -std::log(d);
    const double logz = std::log(d) + g.lambda_bar * std::log(L);
    const double logvz = spec.V.log_eval(d) + sigma * logz;
    const double vz =
        std::pow(s, sigma) * (logvz < -745.0 ? 0.0 : std::exp(logvz));
    record(r, lap + vz, vz == 0.0 ? 1.0 : vz);
  }
  // Weak form against 20 ramp cutoffs (piecewise-linear profiles at varied
  // delta and n), normalized by the potential term.
  rep.max_weak_rel = -std::numeric_limits<double>::infinity();
  auto u_fn = [&](double r) { return g.u(r); };
  auto du_fn = [&](double r) { return g.du(r); };
  for (int jd = 2; jd <= 6; ++jd) {
    for (int n : {2, 4, 8, 16}) {
      Ramp ramp{std::pow(2.0, -jd), n};
      const auto W = weak_integral(spec, u_fn, du_fn, ramp, {g.xi});
      rep.weak_values.push_back(W.value());
      rep.max_weak_rel =
          std::max(rep.max_weak_rel, W.value() / std::abs(W.potential_term));
    }
  }
  rep.pass = rep.min_u > 0.0 && rep.max_pointwise_rel <= tol &&
             rep.max_weak_rel <= tol;
  if (!rep.pass) {
    rep.note = "violation at r = " + std::to_string(rep.witness_r);
  }
  return rep;
}

// ---- full pipeline ----------------------------------------------------------

struct CounterexampleRun {
  DeltaScan scan;
  std::vector<double> rho_tried;
  GluedSupersolution u;
  SupersolutionReport report;
};

// Assemble the positive supersolution for a boundary-blowup potential:
// residual scan for delta, then walk rho through {1 - 2^-j} until the slope
// condition admits a C^1 gluing, then verify.
inline CounterexampleRun build_counterexample(const ProblemSpec& spec,
                                              double lambda_bar = 0.0,
                                              int grid_n = 2000,
                                              double tol = 1e-8) {
  CounterexampleRun run;
  if (lambda_bar <= 0.0) {
    const auto eps = blowup_eps(spec.V, spec.exps.sigma);
    if (!eps || !(*eps > 0.0)) {
      throw std::invalid_argument(
          "build_counterexample: potential is not of the boundary-blowup "
          "family; pass lambda_bar explicitly");
    }
    lambda_bar = 0.5 * *eps;
  }
  run.scan = find_delta_negative(spec, lambda_bar);
  if (!run.scan.ok) {
    throw std::runtime_error("build_counterexample: " + run.scan.note);
  }
  const int j0 =
      std::max(3, int(std::ceil(std::log2(1.0 / run.scan.delta))) + 1);
  for (int j = j0; j <= 20; ++j) {
    const double rho = 1.0 - std::pow(2.0, -j);
    run.rho_tried.push_back(rho);
    EigenResult eig = first_eigenpair(spec, rho);
    if (!slope_condition_ok(eig, lambda_bar, run.scan.r0)) continue;
    run.u = glue(spec, eig, lambda_bar, run.scan.r0);
    run.report = verify_supersolution(spec, run.u, grid_n, tol);
    return run;
  }
  throw std::runtime_error(
      "build_counterexample: slope condition never satisfied up to rho = "
      "1 - 2^-20");
}

}  // namespace collar
