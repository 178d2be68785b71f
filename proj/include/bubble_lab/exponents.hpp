#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "error.hpp"

namespace bubble_lab {

/// Exact fraction with positive denominator, kept in lowest terms.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Rational() = default;
  constexpr Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
    if (den == 0) throw Error(ErrorKind::invalid_argument, "zero denominator");
    if (den < 0) { num = -num; den = -den; }
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }

  friend Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
  friend Rational operator-(Rational a, Rational b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
  friend Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
  friend Rational operator/(Rational a, Rational b) {
    if (b.num == 0) throw Error(ErrorKind::invalid_argument, "division by zero");
    return {a.num * b.den, a.den * b.num};
  }
  friend bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
  friend bool operator<(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }
  friend bool operator<=(Rational a, Rational b) { return !(b < a); }
};

enum class Regime { fast, log, slow };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::fast: return "FAST";
    case Regime::log: return "LOG";
    case Regime::slow: return "SLOW";
  }
  return "?";
}

namespace detail {
inline void require_dimension(int n) {
  if (n < 3) throw Error(ErrorKind::invalid_argument, "dimension must be at least 3");
}
}  // namespace detail

/// Partner q0 with (p0, q0) on the critical hyperbola 1/(p+1) + 1/(q+1) = (n-2)/n.
inline double critical_partner(int n, double p0) {
  detail::require_dimension(n);
  if (!(p0 > 0)) throw Error(ErrorKind::invalid_argument, "p0 must be positive");
  double denom = double(n - 2) / n - 1.0 / (p0 + 1.0);
  if (!(denom > 0)) throw Error(ErrorKind::no_positive_partner, "p0 too small for a positive partner");
  return 1.0 / denom - 1.0;
}

inline Rational critical_partner(int n, Rational p0) {
  detail::require_dimension(n);
  if (p0.num <= 0) throw Error(ErrorKind::invalid_argument, "p0 must be positive");
  Rational denom = Rational(n - 2, n) - Rational(1) / (p0 + Rational(1));
  if (denom.num <= 0) throw Error(ErrorKind::no_positive_partner, "p0 too small for a positive partner");
  return Rational(1) / denom - Rational(1);
}

/// Lower admissibility bound for p0: max{1, (3 + sqrt(4n+1)) / (2(n-2))}. Needs n >= 4.
inline double pn_threshold(int n) {
  if (n < 4) throw Error(ErrorKind::invalid_argument, "threshold is only defined for n >= 4");
  return std::max(1.0, (3.0 + std::sqrt(4.0 * n + 1.0)) / (2.0 * (n - 2)));
}

/// Sign of p0 (n-2) - n decides the decay class of the first component.
inline Regime classify_regime(int n, Rational p0) {
  detail::require_dimension(n);
  Rational lhs = p0 * Rational(n - 2);
  Rational rhs(n);
  if (lhs == rhs) return Regime::log;
  return rhs < lhs ? Regime::fast : Regime::slow;
}

inline Regime classify_regime(int n, double p0, double tol = 1e-12) {
  detail::require_dimension(n);
  double d = p0 * (n - 2) - n;
  if (std::abs(d) <= tol * n) return Regime::log;
  return d > 0 ? Regime::fast : Regime::slow;
}

/// Exponent of epsilon governing the concentration rate delta ~ eps^rate.
inline double concentration_exponent(int n, double p0, Regime regime) {
  switch (regime) {
    case Regime::fast: return double(n - 1) / (n - 2);
    case Regime::slow: return ((n - 2) * p0 - 1.0) / ((n - 2) * p0 - 2.0);
    case Regime::log: break;
  }
  throw Error(ErrorKind::unsupported_regime, "no concentration rate for the borderline regime");
}

/// Decay exponent of the first component: U ~ a r^{-kappa}.
inline double decay_exponent_U(int n, double p0, Regime regime) {
  return regime == Regime::slow ? (n - 2) * p0 - 2.0 : double(n - 2);
}

/// Exponent pair near the critical hyperbola: p = p0 - alpha eps, q = q0 - beta eps.
struct ExponentPair {
  int n = 0;
  double p0 = 0, q0 = 0;
  double alpha = 0, beta = 0, epsilon = 0;
  Regime regime = Regime::fast;

  double p() const { return p0 - alpha * epsilon; }
  double q() const { return q0 - beta * epsilon; }

  static ExponentPair make(int n, Rational p0, double alpha = 0, double beta = 0, double epsilon = 0) {
    Rational q0 = critical_partner(n, p0);
    if (q0 < p0) throw Error(ErrorKind::invalid_argument, "expected p0 <= q0");
    return finish(n, p0.value(), q0.value(), classify_regime(n, p0), alpha, beta, epsilon);
  }

  static ExponentPair make(int n, double p0, double alpha = 0, double beta = 0, double epsilon = 0) {
    double q0 = critical_partner(n, p0);
    if (q0 < p0 * (1 - 1e-14)) throw Error(ErrorKind::invalid_argument, "expected p0 <= q0");
    return finish(n, p0, q0, classify_regime(n, p0), alpha, beta, epsilon);
  }

 private:
  static ExponentPair finish(int n, double p0, double q0, Regime regime, double alpha, double beta,
                             double epsilon) {
    if (alpha < 0 || beta < 0 || alpha + beta <= 0) {
      if (!(alpha == 0 && beta == 0 && epsilon == 0))
        throw Error(ErrorKind::invalid_argument, "alpha, beta must be >= 0 with alpha + beta > 0");
    }
    if (epsilon < 0) throw Error(ErrorKind::invalid_argument, "epsilon must be >= 0");
    ExponentPair e;
    e.n = n;
    e.p0 = p0;
    e.q0 = q0;
    e.alpha = alpha;
    e.beta = beta;
    e.epsilon = epsilon;
    e.regime = regime;
    if (e.p() <= 0 || e.q() <= 0) throw Error(ErrorKind::invalid_argument, "perturbed exponents must stay positive");
    return e;
  }
};

/// Dual exponents: 1/p* = p0/(p0+1) - 1/n, and the same for q.
struct DualExponents {
  double p_star, q_star;
};

inline DualExponents dual_exponents(const ExponentPair& e) {
  double ip = e.p0 / (e.p0 + 1) - 1.0 / e.n;
  double iq = e.q0 / (e.q0 + 1) - 1.0 / e.n;
  return {1.0 / ip, 1.0 / iq};
}

/// Parse "5/2" or "2.5".
inline Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash != std::string::npos)
      return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
    auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(std::stoll(text));
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    std::int64_t den = 1;
    for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
    return Rational(std::stoll(digits), den);
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::invalid_argument, "cannot parse exponent '" + text + "'");
  }
}

}  // namespace bubble_lab
