#pragma once

// Proof machinery for the nonexistence theorem: the cutoff family
// phi = (d/delta)^{C1 t}, the ramp eta_n, the integrals I1 (boundary collar)
// and I2 (ramp annulus) for parts (a), (b), (c), the Lambda shift of part
// (b), and the exponent sign ledger behind "for every small enough t".

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "growth.hpp"

namespace collar {

enum class ProofPart { a, b, c };

struct CutoffConfig {
  double delta = 0.0;
  double t = 0.0;  // derived: t = -1/log delta
  double C0 = 1.0;
  double C1 = 1.0;
  long n = 1000;
  double s = 0.0;  // test power

  // Valid C1 range: the cutoff exponent must satisfy
  //   t (C0 - p sigma C1 + p C1 t - p) / (sigma-p+1) <= -t/(sigma-p+1),
  // i.e. C0 - p - p C1 (sigma - t) <= -1. The classical concrete choice
  // C1 >= max{4(C0-p+1)/(p sigma), 1} implies this for small t.
  static CutoffConfig make(const Exponents& e, double delta, double C0,
                           double C1, long n, ProofPart part) {
    if (!(delta > 0) || !(delta < std::exp(-1.0))) {
      throw std::invalid_argument("CutoffConfig: need delta in (0, e^-1)");
    }
    CutoffConfig cfg;
    cfg.delta = delta;
    cfg.t = -1.0 / std::log(delta);
    cfg.C0 = C0;
    cfg.C1 = C1;
    cfg.n = n;
    cfg.s = (part == ProofPart::b ? 2.0 : 1.0) * e.p * e.sigma /
            (e.sigma - e.p + 1.0);
    if (n < 1) throw std::invalid_argument("CutoffConfig: n must be positive");
    if (!(C0 - e.p - e.p * C1 * (e.sigma - cfg.t) <= -1.0 + 1e-12)) {
      throw std::invalid_argument(
          "CutoffConfig: C1 violates the cutoff exponent condition");
    }
    return cfg;
  }

  // A concrete explicit floor for C1 (the equality case below is smaller
  // whenever C0 < p sigma / 4 + p - 1).
  static double classic_c1_floor(const Exponents& e, double C0,
                               ProofPart part) {
    double f = std::max(4.0 * (C0 - e.p + 1.0) / (e.p * e.sigma), 1.0);
    if (part != ProofPart::a) {
      f = std::max(f, 2.0 * (e.p + C0) / (e.sigma - e.p + 1.0));
    }
    return f;
  }

  // Equality value of the cutoff exponent condition: C0 - p - p C1 (sigma - t) = -1.
  static double tight_c1(const Exponents& e, double C0, double t) {
    return (C0 - e.p + 1.0) / (e.p * (e.sigma - t));
  }
};

struct CutoffEval {
  double phi = 0.0;
  double eta_n = 0.0;
  double phi_n = 0.0;
  double grad_phi_bound = 0.0;  // C1 t delta^{-C1 t} d^{C1 t - 1}
};

inline CutoffEval cutoff_eval(const CutoffConfig& cfg, double d) {
  if (!(d > 0) || !(d < 1)) {
    throw std::domain_error("cutoff_eval: d must be in (0, 1)");
  }
  CutoffEval ev;
  const double c1t = cfg.C1 * cfg.t;
  if (d > cfg.delta) {
    ev.phi = 1.0;
    ev.grad_phi_bound = 0.0;
  } else {
    ev.phi = std::pow(d / cfg.delta, c1t);
    ev.grad_phi_bound =
        c1t * std::pow(cfg.delta, -c1t) * std::pow(d, c1t - 1.0);
  }
  const double dn = cfg.delta / double(cfg.n);
  if (d > dn) {
    ev.eta_n = 1.0;
  } else if (d < 0.5 * dn) {
    ev.eta_n = 0.0;
  } else {
    ev.eta_n = 2.0 * double(cfg.n) / cfg.delta * d - 1.0;
  }
  ev.phi_n = ev.eta_n * ev.phi;
  return ev;
}

struct EstimateReport {
  ProofPart part = ProofPart::a;
  double I1 = 0.0;
  double I2 = 0.0;
  double I1_bound = 0.0;
  double I2_bound = 0.0;
  double I1_ratio = 0.0;
  double I2_ratio = 0.0;
  double Lambda = 0.0;  // part (b) only
};

inline double lambda_shift(double p, double sigma, double t) {
  const double den = sigma - (t + 1.0) * (p - 1.0);
  if (!(den > 0)) {
    throw std::invalid_argument("lambda_shift: sigma - (t+1)(p-1) must be > 0");
  }
  const double lam = (p - 1.0) * sigma * t / ((sigma - p + 1.0) * den);
  const double spp = sigma - p + 1.0;
  const double lo = (p - 1.0) * sigma * t / (spp * spp);
  const double hi = 2.0 * lo;
  if (t > 0 && !(lo < lam && lam < hi)) {
    throw std::logic_error("lambda_shift: sandwich bound violated");
  }
  const double beta = (p - 1.0) / spp;
  const double alpha = p * sigma / spp;
  if (!close_rel(beta + lam, (t + 1.0) * (p - 1.0) / den, 1e-12) ||
      !close_rel(alpha + lam * p, p * sigma / den, 1e-12)) {
    throw std::logic_error("lambda_shift: shift identities violated");
  }
  return lam;
}

// I1 and I2 of the proof, by direct quadrature. Part (a)/(c): V exponent
// -beta + t/(sigma-p+1), gradient power p(sigma-t)/(sigma-p+1). Part (b):
// V exponent -beta - Lambda, gradient power alpha + Lambda p.
inline EstimateReport proof_integrals(const ProblemSpec& spec,
                                      const CutoffConfig& cfg, ProofPart part,
                                      double k, double theta = 0.0,
                                      double tau = 2.0) {
  const auto& e = spec.exps;
  const double spp = e.sigma - e.p + 1.0;
  EstimateReport rep;
  rep.part = part;
  double vexp, gpow;
  if (part == ProofPart::b) {
    rep.Lambda = lambda_shift(e.p, e.sigma, cfg.t);
    vexp = -e.beta - rep.Lambda;
    gpow = e.alpha + rep.Lambda * e.p;
  } else {
    vexp = -e.beta + cfg.t / spp;
    gpow = e.p * (e.sigma - cfg.t) / spp;
  }
  const double c1t = cfg.C1 * cfg.t;

  // I1 over S^delta: |grad phi| = C1 t delta^{-C1 t} d^{C1 t - 1} exactly for
  // the radial cutoff; work in xi = -log d with the gradient factor folded
  // into the log integrand.
  const double lg_pref =
      gpow * (std::log(c1t) - c1t * std::log(cfg.delta));
  {
    const double x0 = -std::log(cfg.delta);
    double total = 0.0;
    for (int blk = 0; blk < 4000; ++blk) {
      const double a = x0 + blk * std::numbers::ln2;
      const double b = a + std::numbers::ln2;
      auto g = [&](double xi) {
        const double lg = lg_pref + gpow * (c1t - 1.0) * (-xi) +
                          log_weighted_density(spec, vexp, xi);
        return lg < -745.0 ? 0.0 : std::exp(lg);
      };
      const double block = integrate(g, a, b, kQuadAbsTol, 1e-10);
      total += block;
      if (blk > 8 && std::abs(block) <= 1e-14 * std::abs(total)) break;
    }
    rep.I1 = total;
  }

  // I2 over the ramp annulus S^{delta/n} \ S^{delta/2n}: |grad eta_n| = 2n/delta.
  {
    const double dn = cfg.delta / double(cfg.n);
    const double t0 = -std::log(dn);
    const double t1 = t0 + std::numbers::ln2;
    const double lg_ramp = gpow * std::log(2.0 * double(cfg.n) / cfg.delta);
    auto g = [&](double xi) {
      const double d = std::exp(-xi);
      const double phi = std::pow(d / cfg.delta, c1t);
      const double lg = lg_ramp + gpow * std::log(phi) +
                        log_weighted_density(spec, vexp, xi);
      return lg < -745.0 ? 0.0 : std::exp(lg);
    };
    rep.I2 = integrate(g, t0, t1, kQuadAbsTol, 1e-10);
  }

  // Claimed decay bounds (with C = 1).
  const double Ldn = -std::log(cfg.delta / double(cfg.n));
  if (part == ProofPart::b) {
    rep.I1_bound = std::pow(cfg.t, e.alpha + rep.Lambda * e.p - e.beta - 1.0);
    const double exp13 = -cfg.C1 * (e.alpha + rep.Lambda * e.p) * cfg.t +
                         rep.Lambda * (e.p + cfg.C0);
    rep.I2_bound =
        std::exp(exp13 * std::log(double(cfg.n))) * std::pow(Ldn, e.beta);
  } else {
    const double kk = part == ProofPart::c ? (k + 1.0) / tau : k + 1.0;
    rep.I1_bound = std::pow(cfg.t, gpow - kk);
    rep.I2_bound = std::pow(double(cfg.n), -cfg.t / spp) * std::pow(Ldn, k);
    if (part == ProofPart::c && theta != 0.0) {
      // The HP3 annulus bound carries e^{-eps theta L^tau} with
      // eps = t/(sigma-p+1); telescoping cancellation leaves it in I2's bound.
      rep.I2_bound *=
          std::exp(-cfg.t / spp * theta * std::pow(Ldn, tau));
    }
  }
  rep.I1_ratio = rep.I1 / rep.I1_bound;
  rep.I2_ratio = rep.I2 / rep.I2_bound;
  return rep;
}

struct ExponentLedger {
  ProofPart part = ProofPart::a;
  bool in_theorem_range = true;  // parameters within the stated hypotheses
  std::vector<double> t_grid;
  std::vector<double> margin;       // the sign/threshold expression per t
  std::vector<double> cancel_lhs;   // part (b): exponent sum
  std::vector<double> cancel_rhs;   // part (b): -(p-1)^2 t / (p(sigma-p+1))
  bool margins_ok = true;
  bool cancellation_ok = true;
  double t_threshold = 0.0;  // computed largest admissible t for the sweep
};

inline ExponentLedger exponent_ledger(double p, double sigma, double k,
                                      double tau, ProofPart part,
                                      const std::vector<double>& t_grid = {
                                          0.001, 0.005, 0.01, 0.05, 0.1}) {
  const Exponents e = exponents(p, sigma);
  const double spp = sigma - p + 1.0;
  ExponentLedger led;
  led.part = part;
  led.t_grid = t_grid;
  switch (part) {
    case ProofPart::a:
      led.in_theorem_range = k >= 0.0 && k < e.beta;
      // margin: beta - k - p t / (sigma-p+1) > 0; threshold solves = 0.
      led.t_threshold = (e.beta - k) * spp / p;
      for (double t : t_grid) {
        const double m = e.beta - k - p * t / spp;
        led.margin.push_back(m);
        if (t < led.t_threshold && !(m > 0)) led.margins_ok = false;
      }
      break;
    case ProofPart::c: {
      led.in_theorem_range = tau > std::max(spp * (k + 1.0) / sigma, 1.0);
      // margin: sigma/(sigma-p+1) - (k+1)/tau - p t/(sigma-p+1) >= 1/2 * base.
      const double base = sigma / spp - (k + 1.0) / tau;
      led.t_threshold = base * spp / (2.0 * p);
      for (double t : t_grid) {
        const double m = sigma / spp - (k + 1.0) / tau - p * t / spp;
        led.margin.push_back(m);
        if (t < led.t_threshold && !(m >= 0.5 * base - 1e-12)) {
          led.margins_ok = false;
        }
      }
      break;
    }
    case ProofPart::b:
      led.t_threshold = std::min(1.0, spp / (2.0 * (p - 1.0)));
      for (double t : t_grid) {
        if (!(t < led.t_threshold)) {
          led.margin.push_back(0.0);
          led.cancel_lhs.push_back(0.0);
          led.cancel_rhs.push_back(0.0);
          continue;
        }
        const double lam = lambda_shift(p, sigma, t);
        const double lhs = -(p - 1.0) / p -
                           (p - 1.0) * (p - 1.0) * sigma / (p * spp) +
                           (p - 1.0) * (sigma - t) / spp -
                           (e.beta + 1.0) * (p - 1.0) / p + 1.0 -
                           (e.beta + 1.0) / (e.alpha + lam * p);
        const double rhs = -(p - 1.0) * (p - 1.0) * t / (p * spp);
        led.cancel_lhs.push_back(lhs);
        led.cancel_rhs.push_back(rhs);
        led.margin.push_back(lhs - rhs);
        if (!close_rel(lhs, rhs, 1e-12) && std::abs(lhs - rhs) > 1e-12) {
          led.cancellation_ok = false;
        }
      }
      break;
  }
  return led;
}

// The proof's key cancellation: delta^{-C1 t q} == e^{C1 q} identically under
// t = -1/log delta.
inline double cutoff_cancellation_residual(double delta, double C1, double q) {
  const double t = -1.0 / std::log(delta);
  const double lhs = std::exp(-C1 * t * q * std::log(delta));
  const double rhs = std::exp(C1 * q);
  return std::abs(lhs - rhs) / rhs;
}

}  // namespace collar
