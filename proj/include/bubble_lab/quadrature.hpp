#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "error.hpp"

namespace bubble_lab {

/// Surface area of the unit sphere in R^n.
inline double sphere_area(int n) { return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n); }

/// Normalization of the Newtonian kernel: Gamma(x) = gamma_n |x|^{2-n}.
inline double newton_constant(int n) { return 1.0 / ((n - 2) * sphere_area(n)); }

struct QuadResult {
  double value = 0;
  double error = 0;
};

namespace detail {
// Composite Simpson over f[i0..i1] with spacing h; odd interval counts end with a 3/8 panel.
inline double simpson(const std::vector<double>& f, std::size_t i0, std::size_t i1, double h, std::size_t stride = 1) {
  std::size_t m = (i1 - i0) / stride;
  if (m == 0) return 0;
  if (m == 1) return 0.5 * h * stride * (f[i0] + f[i1]);
  double H = h * stride;
  double sum = 0;
  std::size_t even = (m % 2 == 0) ? m : m - 3;
  for (std::size_t k = 0; k < even; k += 2) {
    std::size_t a = i0 + k * stride;
    sum += H / 3 * (f[a] + 4 * f[a + stride] + f[a + 2 * stride]);
  }
  if (m % 2 == 1) {
    std::size_t a = i0 + even * stride;
    sum += 3 * H / 8 * (f[a] + 3 * f[a + stride] + 3 * f[a + 2 * stride] + f[a + 3 * stride]);
  }
  return sum;
}
}  // namespace detail

/// Integral of samples on a uniform grid between indices i0 and i1, with a
/// Richardson estimate from the half-resolution rule.
inline QuadResult simpson_uniform(const std::vector<double>& f, std::size_t i0, std::size_t i1, double h) {
  QuadResult q;
  q.value = detail::simpson(f, i0, i1, h);
  std::size_t m = i1 - i0;
  if (m >= 8) {
    std::size_t i1c = i0 + (m / 2) * 2;
    double fine = detail::simpson(f, i0, i1c, h);
    double coarse = detail::simpson(f, i0, i1c, h, 2);
    q.error = std::abs(fine - coarse) / 15.0;
  }
  return q;
}

/// One term (A + B log r) r^{-beta-1} of an asymptotic tail integrand.
struct PowerLogTerm {
  double A = 0, B = 0, beta = 0;
};

/// Closed-form integral over [R, inf) of a sum of PowerLogTerms; every beta must be positive.
inline double tail_integral(const std::vector<PowerLogTerm>& terms, double R) {
  double sum = 0, logR = std::log(R);
  for (const auto& t : terms) {
    if (t.A == 0 && t.B == 0) continue;
    if (!(t.beta > 0)) throw Error(ErrorKind::divergent_integral, "tail integrand does not decay fast enough");
    double Rb = std::pow(R, -t.beta);
    sum += t.A * Rb / t.beta + t.B * Rb * (logR / t.beta + 1.0 / (t.beta * t.beta));
  }
  return sum;
}

}  // namespace bubble_lab
