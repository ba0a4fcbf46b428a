#pragma once

// Small numerical toolkit shared by all modules: adaptive quadrature,
// finite differences, least-squares exponent fits, scalar root finding and
// golden-section minimization. Everything is header-only and allocation-light.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace collar {

inline constexpr double kQuadAbsTol = 1e-12;
inline constexpr double kQuadRelTol = 1e-12;
inline constexpr int kQuadMaxDepth = 60;

namespace detail {

template <class F>
double adaptive_simpson_rec(F&& f, double a, double b, double fa, double fm,
                            double fb, double whole, double abs_tol,
                            double rel_tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 ||
      std::abs(delta) <= 15.0 * std::max(abs_tol, rel_tol * std::abs(left + right))) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * abs_tol,
                              rel_tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * abs_tol,
                              rel_tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature of f over [a, b]. Termination combines the
// absolute tolerance with a relative one so that both very small and very
// large integrals are resolved.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = kQuadAbsTol,
                 double rel_tol = kQuadRelTol, int max_depth = kQuadMaxDepth) {
  if (!(a < b)) {
    if (a == b) return 0.0;
    throw std::invalid_argument("integrate: empty interval [" +
                                std::to_string(a) + ", " + std::to_string(b) +
                                "]");
  }
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fm) || !std::isfinite(fb)) {
    throw std::runtime_error("integrate: non-finite integrand sample");
  }
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol,
                                      rel_tol, max_depth);
}

// Fourth-order central difference first derivative.
template <class F>
double fd_derivative(F&& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) /
         (12.0 * h);
}

// Fourth-order central difference second derivative.
template <class F>
double fd_second_derivative(F&& f, double x, double h) {
  return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) -
          f(x - 2 * h)) /
         (12.0 * h * h);
}

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_stderr = 0.0;
};

// Ordinary least squares fit y = intercept + slope * x.
inline LineFit fit_line(const std::vector<double>& x,
                        const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) {
    throw std::invalid_argument("fit_line: need >= 2 matched samples");
  }
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  if (n > 2) {
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = y[i] - r.intercept - r.slope * x[i];
      ss += e * e;
    }
    r.slope_stderr = std::sqrt(ss / double(n - 2) / sxx);
  }
  return r;
}

struct PlaneFit {
  double intercept = 0.0;
  double b1 = 0.0;  // coefficient of x1
  double b2 = 0.0;  // coefficient of x2
};

// Least squares fit y = intercept + b1*x1 + b2*x2 via normal equations with
// explicit 3x3 elimination (tiny systems; no external solver needed).
inline PlaneFit fit_plane(const std::vector<double>& x1,
                          const std::vector<double>& x2,
                          const std::vector<double>& y) {
  const std::size_t n = y.size();
  if (x1.size() != n || x2.size() != n || n < 3) {
    throw std::invalid_argument("fit_plane: need >= 3 matched samples");
  }
  double a[3][4] = {};
  for (std::size_t i = 0; i < n; ++i) {
    const double row[3] = {1.0, x1[i], x2[i]};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) a[r][c] += row[r] * row[c];
      a[r][3] += row[r] * y[i];
    }
  }
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    if (a[c][c] == 0) throw std::invalid_argument("fit_plane: singular system");
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (int k = c; k < 4; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return PlaneFit{a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]};
}

// Bisection root of f on [lo, hi] with f(lo), f(hi) of opposite sign.
template <class F>
double bisect_root(F&& f, double lo, double hi, double xtol = 1e-15,
                   int max_iter = 200) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if ((flo > 0) == (fhi > 0)) {
    throw std::invalid_argument("bisect_root: endpoints do not bracket a root");
  }
  for (int i = 0; i < max_iter && hi - lo > xtol * std::max(1.0, std::abs(lo));
       ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Golden-section minimization of a unimodal f on [lo, hi].
template <class F>
double golden_minimize(F&& f, double lo, double hi, double xtol = 1e-12,
                       int max_iter = 200) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

inline bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace collar
