#pragma once

// Weighted first-eigenvalue problem on B_rho with Dirichlet data:
//   (S w')' + lambda S V w = 0,  w(0) = 1, w'(0) = 0, w(rho) = 0.
// Shooting solver (adaptive RK with zero-counting bisection in lambda),
// Rayleigh quotient, rho -> 1 scans, the test-function certificate for
// lambda_bar(Omega) = 0, and an independent finite-difference oracle.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "problem.hpp"

namespace collar {

inline constexpr double kPoleStart = 1e-6;

enum class EigenMethod { shooting, fd_oracle };

struct EigenNode {
  double r, w, dw;
};

struct EigenResult {
  double rho = 0.0;
  double lambda = 0.0;
  std::vector<EigenNode> nodes;
  double boundary_residual = 0.0;
  double ode_residual_norm = 0.0;
  EigenMethod method = EigenMethod::shooting;

  // Cubic Hermite interpolation on the stored nodes.
  std::pair<double, double> eval(double r) const {
    if (nodes.empty()) throw std::logic_error("EigenResult: empty sample");
    if (r <= nodes.front().r) return {nodes.front().w, nodes.front().dw};
    if (r >= nodes.back().r) return {nodes.back().w, nodes.back().dw};
    std::size_t lo = 0, hi = nodes.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (nodes[mid].r <= r ? lo : hi) = mid;
    }
    const auto& A = nodes[lo];
    const auto& B = nodes[lo + 1];
    const double h = B.r - A.r;
    const double u = (r - A.r) / h;
    const double u2 = u * u, u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
    const double w = h00 * A.w + h10 * h * A.dw + h01 * B.w + h11 * h * B.dw;
    const double dh00 = (6 * u2 - 6 * u) / h, dh10 = 3 * u2 - 4 * u + 1;
    const double dh01 = (-6 * u2 + 6 * u) / h, dh11 = 3 * u2 - 2 * u;
    const double dw =
        dh00 * A.w + dh10 * A.dw + dh01 * B.w + dh11 * B.dw;
    return {w, dw};
  }
  double w(double r) const { return eval(r).first; }
  double dw(double r) const { return eval(r).second; }
};

namespace detail {

struct ShootOutcome {
  int zero_count = 0;
  double w_end = 0.0;
  std::vector<EigenNode> nodes;  // filled only when requested
};

// Adaptive Cash-Karp RK45 integration of the radial eigen-ODE from
// r = kPoleStart to rho for a given lambda. Counts interior sign changes.
inline ShootOutcome shoot(const ProblemSpec& spec, double lambda, double rho,
                          bool record, double rel_tol = 1e-10) {
  const int m = spec.manifold.m;
  auto rhs = [&](double r, double w, double v, double& dw, double& dv) {
    const auto wp = warp_eval(spec.manifold.psi, r);
    const double Vr = spec.V.eval(std::max(spec.dist(r), 1e-300));
    dw = v;
    dv = -double(m - 1) * (wp.dpsi / wp.psi) * v - lambda * Vr * w;
  };
  const double V0 = spec.V.eval(1.0);
  double r = kPoleStart;
  double w = 1.0 - lambda * V0 * r * r / (2.0 * m);
  double v = -lambda * V0 * r / m;
  ShootOutcome out;
  if (record) out.nodes.push_back({r, w, v});
  // Same step cap for probe and recording runs: the zero count must be the
  // computed branch's count, not an artifact of a different grid.
  const double h_max = (rho - kPoleStart) / 256.0;
  double h = h_max;
  int sign = 1;
  static constexpr double A2 = 0.2, A3 = 0.3, A4 = 0.6, A5 = 1.0, A6 = 0.875;
  static constexpr double B21 = 0.2;
  static constexpr double B31 = 3.0 / 40, B32 = 9.0 / 40;
  static constexpr double B41 = 0.3, B42 = -0.9, B43 = 1.2;
  static constexpr double B51 = -11.0 / 54, B52 = 2.5, B53 = -70.0 / 27,
                          B54 = 35.0 / 27;
  static constexpr double B61 = 1631.0 / 55296, B62 = 175.0 / 512,
                          B63 = 575.0 / 13824, B64 = 44275.0 / 110592,
                          B65 = 253.0 / 4096;
  static constexpr double C1 = 37.0 / 378, C3 = 250.0 / 621, C4 = 125.0 / 594,
                          C6 = 512.0 / 1771;
  static constexpr double D1 = C1 - 2825.0 / 27648, D3 = C3 - 18575.0 / 48384,
                          D4 = C4 - 13525.0 / 55296, D5 = -277.0 / 14336,
                          D6 = C6 - 0.25;
  long guard = 0;
  while (r < rho) {
    if (++guard > 40'000'000L) {
      throw std::runtime_error("shoot: step count exploded near r = " +
                               std::to_string(r));
    }
    if (r + h > rho) h = rho - r;
    double k1w, k1v, k2w, k2v, k3w, k3v, k4w, k4v, k5w, k5v, k6w, k6v;
    rhs(r, w, v, k1w, k1v);
    rhs(r + A2 * h, w + h * B21 * k1w, v + h * B21 * k1v, k2w, k2v);
    rhs(r + A3 * h, w + h * (B31 * k1w + B32 * k2w),
        v + h * (B31 * k1v + B32 * k2v), k3w, k3v);
    rhs(r + A4 * h, w + h * (B41 * k1w + B42 * k2w + B43 * k3w),
        v + h * (B41 * k1v + B42 * k2v + B43 * k3v), k4w, k4v);
    rhs(r + A5 * h, w + h * (B51 * k1w + B52 * k2w + B53 * k3w + B54 * k4w),
        v + h * (B51 * k1v + B52 * k2v + B53 * k3v + B54 * k4v), k5w, k5v);
    rhs(r + A6 * h,
        w + h * (B61 * k1w + B62 * k2w + B63 * k3w + B64 * k4w + B65 * k5w),
        v + h * (B61 * k1v + B62 * k2v + B63 * k3v + B64 * k4v + B65 * k5v),
        k6w, k6v);
    const double wn = w + h * (C1 * k1w + C3 * k3w + C4 * k4w + C6 * k6w);
    const double vn = v + h * (C1 * k1v + C3 * k3v + C4 * k4v + C6 * k6v);
    const double ew = h * (D1 * k1w + D3 * k3w + D4 * k4w + D5 * k5w + D6 * k6w);
    const double ev = h * (D1 * k1v + D3 * k3v + D4 * k4v + D5 * k5v + D6 * k6v);
    const double scale_w = std::abs(w) + std::abs(h * k1w) + 1e-30;
    const double scale_v = std::abs(v) + std::abs(h * k1v) + 1e-30;
    const double err = std::max(std::abs(ew) / scale_w, std::abs(ev) / scale_v) /
                       rel_tol;
    if (err > 1.0) {
      h = std::max(0.1 * h, 0.9 * h * std::pow(err, -0.25));
      continue;
    }
    r += h;
    w = wn;
    v = vn;
    if (record) out.nodes.push_back({r, w, v});
    const int s = w > 0 ? 1 : (w < 0 ? -1 : 0);
    if (s != 0 && s != sign) {
      ++out.zero_count;
      sign = s;
    }
    h = std::min(h_max, err > 1e-12 ? 0.9 * h * std::pow(err, -0.2) : 5.0 * h);
  }
  out.w_end = w;
  return out;
}

}  // namespace detail

inline double rayleigh_quotient(const ProblemSpec& spec, const EigenResult& w,
                                double rho) {
  if (std::abs(w.w(rho)) > 1e-3) {
    throw std::invalid_argument("rayleigh_quotient: w(rho) must vanish");
  }
  const double num = integrate(
      [&](double r) {
        const double dv = w.dw(r);
        return dv * dv * surface_area(spec.manifold, r);
      },
      kPoleStart, rho, kQuadAbsTol, 1e-10);
  const double den = integrate(
      [&](double r) {
        const double wv = w.w(r);
        return spec.V.eval(std::max(spec.dist(r), 1e-300)) * wv * wv *
               surface_area(spec.manifold, r);
      },
      kPoleStart, rho, kQuadAbsTol, 1e-10);
  if (den == 0.0) {
    throw std::invalid_argument("rayleigh_quotient: degenerate input");
  }
  return num / den;
}

// Rayleigh quotient of the tent trial function 1 - r/rho (upper bound for
// lambda_rho; used to seed the bisection bracket).
inline double tent_rayleigh(const ProblemSpec& spec, double rho) {
  const double num = integrate(
      [&](double r) {
        return surface_area(spec.manifold, r) / (rho * rho);
      },
      kPoleStart, rho, kQuadAbsTol, 1e-10);
  const double den = integrate(
      [&](double r) {
        const double wv = 1.0 - r / rho;
        return spec.V.eval(std::max(spec.dist(r), 1e-300)) * wv * wv *
               surface_area(spec.manifold, r);
      },
      kPoleStart, rho, kQuadAbsTol, 1e-10);
  return num / den;
}

inline EigenResult first_eigenpair(const ProblemSpec& spec, double rho,
                                   double tol = 1e-12) {
  if (!(rho > 0) || !(rho <= 1)) {
    throw std::invalid_argument("first_eigenpair: rho must be in (0, 1]");
  }
  // lambda* = inf { lambda : w_lambda has an interior zero in (0, rho] }.
  double hi = tent_rayleigh(spec, rho);
  double lo = 0.0;
  int doublings = 0;
  while (detail::shoot(spec, hi, rho, false).zero_count == 0) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 60) {
      throw std::runtime_error(
          "first_eigenpair: no oscillation up to lambda = " +
          std::to_string(hi));
    }
  }
  for (int i = 0; i < 200 && hi - lo > tol * hi; ++i) {
    const double mid = lo > 0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    if (detail::shoot(spec, mid, rho, false).zero_count == 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  EigenResult res;
  res.rho = rho;
  res.lambda = 0.5 * (lo + hi);
  auto sol = detail::shoot(spec, lo, rho, true);
  res.nodes = std::move(sol.nodes);
  res.boundary_residual = std::abs(sol.w_end);
  res.method = EigenMethod::shooting;
  if (sol.zero_count != 0) {
    throw std::runtime_error("first_eigenpair: returned branch oscillates");
  }
  // ODE residual in self-adjoint form at node midpoints:
  // (S w')' + lambda S V w = 0: flux difference across each cell vs the
  // Simpson cell average of the source (midpoint alone is too crude in the
  // pole cell where the source scales like r^{m-1}).
  double sup = 0.0;
  auto src_at = [&](double r, double w) {
    return res.lambda * surface_area(spec.manifold, r) *
           spec.V.eval(std::max(spec.dist(r), 1e-300)) * w;
  };
  for (std::size_t i = 0; i + 1 < res.nodes.size(); ++i) {
    const auto& A = res.nodes[i];
    const auto& B = res.nodes[i + 1];
    const double h = B.r - A.r;
    if (h <= 0) continue;
    const double rm = 0.5 * (A.r + B.r);
    const double flux =
        (surface_area(spec.manifold, B.r) * B.dw -
         surface_area(spec.manifold, A.r) * A.dw) /
        h;
    const double src = (src_at(A.r, A.w) + 4.0 * src_at(rm, res.eval(rm).first) +
                        src_at(B.r, B.w)) /
                       6.0;
    const double scale =
        std::abs(src) + res.lambda * surface_area(spec.manifold, rm) + 1e-30;
    sup = std::max(sup, std::abs(flux + src) / scale);
  }
  res.ode_residual_norm = sup;
  return res;
}

struct EigenScan {
  std::vector<double> rho;
  std::vector<double> lambda;
  bool strictly_decreasing = false;
  double limit_estimate = 0.0;
};

inline EigenScan eigen_scan(const ProblemSpec& spec,
                            const std::vector<double>& rho_list,
                            double tol = 1e-12) {
  if (rho_list.size() < 2) {
    throw std::invalid_argument("eigen_scan: need at least two radii");
  }
  EigenScan scan;
  for (std::size_t i = 0; i < rho_list.size(); ++i) {
    if (i && !(rho_list[i] > rho_list[i - 1])) {
      throw std::invalid_argument("eigen_scan: rho_list must increase");
    }
    scan.rho.push_back(rho_list[i]);
    scan.lambda.push_back(first_eigenpair(spec, rho_list[i], tol).lambda);
  }
  scan.strictly_decreasing = true;
  for (std::size_t i = 1; i < scan.lambda.size(); ++i) {
    if (!(scan.lambda[i] < scan.lambda[i - 1])) {
      scan.strictly_decreasing = false;
    }
  }
  // Aitken delta-squared extrapolation on the last three values (Richardson
  // in the collar width 1 - rho).
  const std::size_t n = scan.lambda.size();
  if (n >= 3) {
    const double l1 = scan.lambda[n - 3], l2 = scan.lambda[n - 2],
                 l3 = scan.lambda[n - 1];
    const double denom = (l3 - l2) - (l2 - l1);
    scan.limit_estimate =
        denom != 0.0 ? l3 - (l3 - l2) * (l3 - l2) / denom : l3;
    if (scan.limit_estimate < 0 && scan.strictly_decreasing) {
      scan.limit_estimate = 0.0;  // clamp: the limit is known nonnegative
    }
  } else {
    scan.limit_estimate = scan.lambda.back();
  }
  return scan;
}

struct TestFunctionCertificate {
  bool hypothesis_ok = false;  // integrability hypothesis with beta0 > 2 certified
  double beta0 = 0.0;
  double C0 = 0.0;
  double gamma = 0.0;
  double C = 0.0;      // gamma^2 / C0
  double ratio = 0.0;  // grad-energy over potential-energy
  bool bound_ok = false;
  bool vanishing_ok = false;
  double vanishing_slope = 0.0;
  std::string note;
};

inline TestFunctionCertificate spectral_test_function(const ProblemSpec& spec,
                                                      double alpha,
                                                      double slack = 0.1) {
  TestFunctionCertificate cert;
  const PlePiece& V = spec.V.boundary_piece();
  double beta0;
  if (V.theta > 0) {
    cert.note = "V decays exponentially near the boundary: no power lower bound";
    return cert;
  }
  if (V.theta < 0 || V.s >= 0) {
    beta0 = -V.q;
  } else {
    beta0 = -V.q - slack;  // log-decay in V costs a power of slack
  }
  if (!(beta0 > 2.0)) {
    cert.note = "beta0 <= 2: hypothesis of the certificate violated";
    return cert;
  }
  cert.beta0 = beta0;
  // C0 = inf over the ball of V(d) d^{beta0}.
  double logmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 2400; ++i) {
    const double d = std::pow(10.0, -12.0 + 12.0 * i / 2400.0);
    logmin = std::min(logmin, spec.V.log_eval(d) + beta0 * std::log(d));
  }
  cert.C0 = std::exp(logmin);
  cert.gamma = 0.5 * (beta0 - 2.0);
  cert.C = cert.gamma * cert.gamma / cert.C0;
  cert.hypothesis_ok = true;

  const double g = cert.gamma;
  const double sa = std::sqrt(alpha);
  // phi_alpha = exp(-sqrt(alpha) d^{-gamma}); |grad phi| = gamma sqrt(alpha)
  // d^{-gamma-1} phi exactly on the radial ball.
  auto log_phi2 = [&](double d) { return -2.0 * sa * std::pow(d, -g); };
  auto shell = [&](double extra_logpow, double lo, double hi) {
    // integral over xi = -log d in [lo, hi) of
    // d^{extra} phi^2 a S e^{-xi} in log space
    return integrate(
        [&](double xi) {
          const double d = std::exp(-xi);
          const double lg = extra_logpow * (-xi) + log_phi2(d) +
                            spec.a.log_eval(d) +
                            log_surface_area(spec.manifold, 1.0 - d) - xi;
          return lg < -745.0 ? 0.0 : std::exp(lg);
        },
        lo, hi, kQuadAbsTol, 1e-10);
  };
  auto full = [&](double extra_logpow, bool with_V) {
    double total = 0.0;
    for (int n = 0; n < 4000; ++n) {
      const double a = 1e-14 + n * std::numbers::ln2;
      const double b = a + std::numbers::ln2;
      double block;
      if (!with_V) {
        block = shell(extra_logpow, a, b);
      } else {
        block = integrate(
            [&](double xi) {
              const double d = std::exp(-xi);
              const double lg = spec.V.log_eval(d) + log_phi2(d) +
                                spec.a.log_eval(d) +
                                log_surface_area(spec.manifold, 1.0 - d) - xi;
              return lg < -745.0 ? 0.0 : std::exp(lg);
            },
            a, b, kQuadAbsTol, 1e-10);
      }
      total += block;
      if (n > 8 && std::abs(block) <= 1e-14 * std::abs(total)) break;
    }
    return total;
  };
  const double num = g * g * alpha * full(-2.0 * g - 2.0, false);
  const double den = full(0.0, true);
  cert.ratio = num / den;
  cert.bound_ok = cert.ratio <= cert.C * alpha * (1.0 + 1e-9);

  // Vanishing condition (o(delta^2), checked as decay faster than delta^3):
  // v(delta) = integral over S^{2 delta} \ S^{delta} of phi^2 dmu.
  std::vector<double> xs, ys;
  for (int j = 2; j <= 10; ++j) {
    const double delta = std::pow(2.0, -j);
    const double v = shell(0.0, -std::log(2.0 * delta), -std::log(delta));
    if (v > 0) {
      xs.push_back(std::log(delta));
      ys.push_back(std::log(v));
    }
  }
  cert.vanishing_slope = xs.size() >= 2 ? fit_line(xs, ys).slope : 1e9;
  cert.vanishing_ok = xs.size() < 2 || cert.vanishing_slope >= 3.0;
  return cert;
}

// Independent oracle: finite-volume discretization on a uniform grid,
// symmetric generalized tridiagonal eigenproblem A w = lambda B w solved for
// its smallest eigenvalue by Sturm-sequence bisection.
inline EigenResult fd_eigen_oracle(const ProblemSpec& spec, double rho,
                                   int N) {
  if (N < 50) throw std::invalid_argument("fd_eigen_oracle: N must be >= 50");
  const double h = rho / N;
  std::vector<double> diag(N), off(N - 1), mass(N);
  auto S = [&](double r) {
    return r <= 0 ? 0.0 : surface_area(spec.manifold, r);
  };
  auto Vr = [&](double r) { return spec.V.eval(std::max(spec.dist(r), 1e-300)); };
  // Node i at r_i = i h (i = 0..N-1 unknown; w_N = 0 Dirichlet). Fluxes at
  // half nodes; cell mass by 3-point Simpson of S over the cell times V(r_i).
  for (int i = 0; i < N; ++i) {
    const double r = i * h;
    const double sl = i == 0 ? 0.0 : S(r - 0.5 * h);
    const double sr = S(r + 0.5 * h);
    diag[i] = (sl + sr) / h;
    if (i + 1 < N) off[i] = -sr / h;
    const double a = i == 0 ? 0.0 : r - 0.5 * h;
    const double b = std::min(r + 0.5 * h, rho);
    mass[i] = Vr(r) * (b - a) / 6.0 *
              (S(a) + 4.0 * S(0.5 * (a + b)) + S(b));
  }
  auto count_below = [&](double x) {
    int cnt = 0;
    double d = diag[0] - x * mass[0];
    if (d < 0) ++cnt;
    for (int i = 1; i < N; ++i) {
      const double denom = d == 0.0 ? 1e-300 : d;
      d = (diag[i] - x * mass[i]) - off[i - 1] * off[i - 1] / denom;
      if (d < 0) ++cnt;
    }
    return cnt;
  };
  double lo = 0.0, hi = tent_rayleigh(spec, rho);
  int doublings = 0;
  while (count_below(hi) < 1) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 60) {
      throw std::runtime_error("fd_eigen_oracle: bracket search failed");
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (count_below(mid) < 1 ? lo : hi) = mid;
  }
  EigenResult res;
  res.rho = rho;
  res.lambda = 0.5 * (lo + hi);
  res.method = EigenMethod::fd_oracle;
  // Eigenvector by forward recurrence from the pole row (discrete shooting).
  std::vector<double> w(N + 1, 0.0);
  w[0] = 1.0;
  w[1] = -(diag[0] - res.lambda * mass[0]) * w[0] / off[0];
  for (int i = 1; i + 1 < N; ++i) {
    w[i + 1] = (-(diag[i] - res.lambda * mass[i]) * w[i] - off[i - 1] * w[i - 1]) /
               off[i];
  }
  res.nodes.reserve(N + 1);
  for (int i = 0; i <= N; ++i) {
    const double dw = i == 0 ? 0.0
                     : i == N ? (w[N] - w[N - 1]) / h
                              : (w[std::min(i + 1, N)] - w[i - 1]) / (2 * h);
    res.nodes.push_back({i * h, w[i], dw});
  }
  res.boundary_residual = std::abs(w[N]);
  return res;
}

}  // namespace collar
