#pragma once

// Problem descriptors: the derived exponents (alpha, beta), the
// power-log-exponential (PLE) radial function family
//   f(d) = c * d^q * L^s * exp(-theta * L^tau),   L = |log d| = -log d,
// that houses every weight a and potential V used by the checks, and the
// full problem specification on the unit geodesic ball (d(x) = 1 - r).

#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace collar {

struct Exponents {
  double p = 2.0;
  double sigma = 3.0;
  double alpha = 3.0;  // p*sigma / (sigma - p + 1)
  double beta = 0.5;   // (p - 1) / (sigma - p + 1)
};

inline Exponents exponents(double p, double sigma) {
  if (!(p > 1.0)) throw std::invalid_argument("exponents: requires p > 1");
  if (!(sigma > p - 1.0)) {
    throw std::invalid_argument("exponents: requires sigma > p - 1");
  }
  Exponents e;
  e.p = p;
  e.sigma = sigma;
  e.alpha = p * sigma / (sigma - p + 1.0);
  e.beta = (p - 1.0) / (sigma - p + 1.0);
  if (!(e.alpha > 1.0)) throw std::logic_error("exponents: alpha <= 1");
  return e;
}

struct PlePiece {
  double d_cut = 0.5;  // piece applies for d <= d_cut
  double c = 1.0;
  double q = 0.0;      // power of d
  double s = 0.0;      // power of L = -log d
  double theta = 0.0;  // exp(-theta * L^tau)
  double tau = 1.0;

  // log f(d), evaluated directly in log space so that d down to 1e-300 is
  // representable even when q is large and negative.
  double log_eval(double d) const {
    // Each term is added only when its coefficient is nonzero so that the
    // limits d -> 0 and d -> 1 never manufacture 0 * inf.
    const double L = -std::log(d);
    double lg = std::log(c);
    if (q != 0.0) lg += q * std::log(d);
    if (s != 0.0) lg += s * std::log(L);
    if (theta != 0.0) lg -= theta * std::pow(L, tau);
    return lg;
  }
};

class PleFunction {
 public:
  PleFunction() : pieces_{PlePiece{}} {}
  explicit PleFunction(PlePiece piece) : pieces_{piece} { validate(); }
  explicit PleFunction(std::vector<PlePiece> pieces)
      : pieces_(std::move(pieces)) {
    validate();
  }

  static PleFunction constant(double c) {
    PlePiece p;
    p.c = c;
    p.d_cut = 1.0;
    return PleFunction(p);
  }

  const std::vector<PlePiece>& pieces() const { return pieces_; }
  const PlePiece& boundary_piece() const { return pieces_.front(); }
  bool is_constant() const {
    const auto& p = pieces_.front();
    return pieces_.size() == 1 && p.q == 0 && p.s == 0 && p.theta == 0;
  }

  double log_eval(double d) const {
    if (!(d > 0.0)) throw std::domain_error("PleFunction: requires d > 0");
    if (d > 1.0) throw std::domain_error("PleFunction: requires d <= 1");
    for (const auto& p : pieces_) {
      if (d <= p.d_cut) return p.log_eval(d);
    }
    // Smooth constant extension inward of the outermost piece.
    const auto& last = pieces_.back();
    return last.log_eval(last.d_cut);
  }

  double eval(double d) const { return std::exp(log_eval(d)); }

  PleFunction pow(double e) const {
    std::vector<PlePiece> out;
    out.reserve(pieces_.size());
    for (const auto& p : pieces_) {
      PlePiece r = p;
      r.c = std::pow(p.c, e);
      r.q = p.q * e;
      r.s = p.s * e;
      r.theta = p.theta * e;
      r.tau = p.tau;
      out.push_back(r);
    }
    return PleFunction(std::move(out));
  }

 private:
  void validate() const {
    if (pieces_.empty()) throw std::invalid_argument("PleFunction: no pieces");
    double prev = 0.0;
    for (const auto& p : pieces_) {
      if (!(p.c > 0)) throw std::invalid_argument("PleFunction: c must be > 0");
      if (!(p.d_cut > prev) || p.d_cut > 1.0) {
        throw std::invalid_argument(
            "PleFunction: piece cuts must increase within (0, 1]");
      }
      if (p.theta != 0.0 && !(p.tau >= 1.0)) {
        throw std::invalid_argument("PleFunction: tau must be >= 1");
      }
      prev = p.d_cut;
    }
  }

  std::vector<PlePiece> pieces_;
};

inline double ple_eval(const PleFunction& f, double d) { return f.eval(d); }
inline PleFunction ple_power(const PleFunction& f, double e) {
  return f.pow(e);
}

// ---- canonical text form: c*d^q*L^s*exp(-theta*L^tau)[@d_cut] -------------

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_number(const std::string& tok, const std::string& ctx) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("PLE parse: bad number '" + tok + "' in " + ctx);
  }
  if (pos != tok.size()) {
    throw std::invalid_argument("PLE parse: trailing junk in '" + tok + "'");
  }
  return v;
}

}  // namespace detail

inline std::string to_text(const PlePiece& p) {
  std::string out = detail::fmt17(p.c) + "*d^" + detail::fmt17(p.q) + "*L^" +
                    detail::fmt17(p.s) + "*exp(-" + detail::fmt17(p.theta) +
                    "*L^" + detail::fmt17(p.tau) + ")";
  out += "@" + detail::fmt17(p.d_cut);
  return out;
}

inline std::string to_text(const PleFunction& f) {
  std::string out;
  for (std::size_t i = 0; i < f.pieces().size(); ++i) {
    if (i) out += ";";
    out += to_text(f.pieces()[i]);
  }
  return out;
}

inline PlePiece parse_ple_piece(const std::string& text) {
  PlePiece piece;
  piece.d_cut = 1.0;
  std::string body = text;
  if (auto at = body.find('@'); at != std::string::npos) {
    piece.d_cut = detail::parse_number(body.substr(at + 1), text);
    body = body.substr(0, at);
  }
  // Split into '*'-separated factors at paren depth 0.
  std::vector<std::string> factors;
  std::string cur;
  int depth = 0;
  for (char ch : body) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == '*' && depth == 0) {
      factors.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur += ch;
    }
  }
  if (!cur.empty()) factors.push_back(cur);
  if (factors.empty()) {
    throw std::invalid_argument("PLE parse: empty expression");
  }
  bool have_c = false;
  for (const auto& f : factors) {
    if (f == "d") {
      piece.q += 1;
    } else if (f.rfind("d^", 0) == 0) {
      piece.q += detail::parse_number(f.substr(2), text);
    } else if (f == "L") {
      piece.s += 1;
    } else if (f.rfind("L^", 0) == 0) {
      piece.s += detail::parse_number(f.substr(2), text);
    } else if (f.rfind("exp(", 0) == 0 && f.back() == ')') {
      // exp(ARG) with ARG = [+-]c[*L[^tau]]; theta is minus the coefficient.
      std::string arg = f.substr(4, f.size() - 5);
      double coeff;
      double tau = 1.0;
      auto lpos = arg.find("L");
      std::string cpart = lpos == std::string::npos ? arg : arg.substr(0, lpos);
      if (!cpart.empty() && cpart.back() == '*') cpart.pop_back();
      if (cpart.empty() || cpart == "-")
        coeff = cpart.empty() ? 1.0 : -1.0;
      else
        coeff = detail::parse_number(cpart, text);
      if (lpos != std::string::npos) {
        std::string rest = arg.substr(lpos + 1);
        if (!rest.empty()) {
          if (rest[0] != '^') {
            throw std::invalid_argument("PLE parse: bad exp factor '" + f + "'");
          }
          tau = detail::parse_number(rest.substr(1), text);
        }
      } else if (coeff != 0.0) {
        throw std::invalid_argument("PLE parse: exp factor without L in '" + f +
                                    "'");
      }
      piece.theta += -coeff;
      piece.tau = tau;
    } else {
      piece.c *= detail::parse_number(f, text);
      have_c = true;
    }
  }
  if (!have_c && factors.size() == 1 && factors[0].rfind("exp", 0) != 0 &&
      factors[0][0] != 'd' && factors[0][0] != 'L') {
    throw std::invalid_argument("PLE parse: unrecognized '" + text + "'");
  }
  if (piece.theta == 0.0) piece.tau = 1.0;
  return piece;
}

inline PleFunction parse_ple(const std::string& text) {
  std::vector<PlePiece> pieces;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto semi = text.find(';', start);
    const std::string part =
        text.substr(start, semi == std::string::npos ? semi : semi - start);
    if (!part.empty()) pieces.push_back(parse_ple_piece(part));
    if (semi == std::string::npos) break;
    start = semi + 1;
  }
  return PleFunction(std::move(pieces));
}

// ---- full problem specification -------------------------------------------

struct ProblemSpec {
  ModelManifold manifold;
  double R = 1.0;  // ball radius (normalized)
  Exponents exps;
  PleFunction a = PleFunction::constant(1.0);
  PleFunction V = PleFunction::constant(1.0);

  double dist(double r) const { return R - r; }

  // a > 0 and V > 0 at 50 sampled radii including d = 1e-8.
  void validate() const {
    if (R != 1.0) throw std::invalid_argument("ProblemSpec: R is normalized to 1");
    for (int i = 0; i < 50; ++i) {
      const double d = i == 0 ? 1e-8 : std::pow(10.0, -8.0 + 8.0 * i / 49.0);
      // Positivity in log space: a deep exponential tail underflows eval()
      // but is still a positive value.
      if (std::isnan(a.log_eval(d)) || std::isnan(V.log_eval(d))) {
        throw std::invalid_argument("ProblemSpec: a, V must be positive");
      }
    }
  }
};

// Boundary blow-up family: V = C d^{-(sigma+1)} L^{-1-eps(sigma-1)} near the
// boundary (constant extension inward of d_cut).
inline PleFunction blowup_potential(double C, double sigma, double eps,
                                   double d_cut = 0.5) {
  PlePiece p;
  p.d_cut = d_cut;
  p.c = C;
  p.q = -(sigma + 1.0);
  p.s = -1.0 - eps * (sigma - 1.0);
  return PleFunction(p);
}

// Extract eps back out of a blowup-shaped potential.
inline std::optional<double> blowup_eps(const PleFunction& V, double sigma) {
  const auto& p = V.boundary_piece();
  if (p.theta != 0.0 || p.q != -(sigma + 1.0)) return std::nullopt;
  return -(p.s + 1.0) / (sigma - 1.0);
}

}  // namespace collar
