#pragma once

// Riemannian model manifolds in polar coordinates: warping functions psi in
// the class A (psi(0)=0, psi'(0)=1, psi>0), sphere area S(r) = omega_m *
// psi^{m-1}(r), ball volume, and the radial Laplace-Beltrami operator
//   Delta = d^2/dr^2 + (m-1) (psi'/psi) d/dr.

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "numerics.hpp"

namespace collar {

enum class WarpKind { Euclidean, Hyperbolic, CustomSeries };

struct WarpingFunction {
  WarpKind kind = WarpKind::Euclidean;
  // CustomSeries: psi(r) = r + sum_i coeffs[i] * r^{2i+3} (odd series with
  // unit leading term), truncated at the stored order.
  std::vector<double> coeffs;
  double validity_radius = 2.0;

  static WarpingFunction euclidean() { return {WarpKind::Euclidean, {}, 0.0}; }
  static WarpingFunction hyperbolic() {
    return {WarpKind::Hyperbolic, {}, 0.0};
  }
  static WarpingFunction custom_series(std::vector<double> odd_coeffs,
                                       double valid_radius = 2.0) {
    return {WarpKind::CustomSeries, std::move(odd_coeffs), valid_radius};
  }
};

struct WarpEval {
  double psi;
  double dpsi;
};

inline WarpEval warp_eval(const WarpingFunction& w, double r) {
  if (r < 0) throw std::domain_error("warp_eval: r < 0");
  if (r == 0) return {0.0, 1.0};
  switch (w.kind) {
    case WarpKind::Euclidean:
      return {r, 1.0};
    case WarpKind::Hyperbolic:
      return {std::sinh(r), std::cosh(r)};
    case WarpKind::CustomSeries: {
      if (w.validity_radius > 0 && r > w.validity_radius) {
        throw std::domain_error("warp_eval: r = " + std::to_string(r) +
                                " beyond series validity radius");
      }
      double psi = r, dpsi = 1.0;
      double pw = r * r * r;  // r^{2i+3}
      for (std::size_t i = 0; i < w.coeffs.size(); ++i) {
        psi += w.coeffs[i] * pw;
        dpsi += w.coeffs[i] * double(2 * i + 3) * pw / r;
        pw *= r * r;
      }
      if (!std::isfinite(psi) || !std::isfinite(dpsi) || psi <= 0) {
        throw std::domain_error("warp_eval: series not evaluable at r = " +
                                std::to_string(r));
      }
      return {psi, dpsi};
    }
  }
  throw std::logic_error("warp_eval: unknown kind");
}

// Area of the unit sphere in R^m: 2 pi^{m/2} / Gamma(m/2).
inline double unit_sphere_area(int m) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m);
}

struct ModelManifold {
  int m = 2;
  WarpingFunction psi;
  double omega_m = 2.0 * std::numbers::pi;
};

inline ModelManifold make_manifold(int m, WarpingFunction psi) {
  if (m < 2) throw std::invalid_argument("make_manifold: dimension m must be >= 2");
  return ModelManifold{m, std::move(psi), unit_sphere_area(m)};
}

inline double surface_area(const ModelManifold& M, double r) {
  const auto w = warp_eval(M.psi, r);
  return M.omega_m * std::pow(w.psi, M.m - 1);
}

inline double log_surface_area(const ModelManifold& M, double r) {
  const auto w = warp_eval(M.psi, r);
  return std::log(M.omega_m) + double(M.m - 1) * std::log(w.psi);
}

inline double ball_volume(const ModelManifold& M, double R) {
  if (R <= 0) throw std::domain_error("ball_volume: R must be positive");
  return integrate([&](double r) { return surface_area(M, r); }, 0.0, R);
}

// A twice differentiable radial function; derivative callbacks may be left
// empty, in which case fourth-order central differences are used with a step
// shrinking near the domain boundary r = 1.
struct RadialC2 {
  std::function<double(double)> f;
  std::function<double(double)> df;   // optional
  std::function<double(double)> ddf;  // optional

  double d1(double r) const {
    if (df) return df(r);
    const double away = std::max(1e-3, 1.0 - r);
    return fd_derivative(f, r, 1e-4 * away);
  }
  double d2(double r) const {
    if (ddf) return ddf(r);
    // Second differences divide by h^2: the step must stay large enough to
    // beat roundoff while shrinking near the boundary r = 1.
    const double away = std::max(1e-3, 1.0 - r);
    return fd_second_derivative(f, r, 3e-2 * away);
  }
};

inline constexpr double kPoleFloor = 1e-12;

inline double radial_laplacian(const ModelManifold& M, const RadialC2& u,
                               double r) {
  if (r < kPoleFloor) {
    throw std::domain_error(
        "radial_laplacian: r below pole floor (coefficient singularity)");
  }
  const auto w = warp_eval(M.psi, r);
  return u.d2(r) + double(M.m - 1) * (w.dpsi / w.psi) * u.d1(r);
}

}  // namespace collar
