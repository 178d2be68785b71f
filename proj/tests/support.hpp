#pragma once

#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <bubble_lab/acceptance.hpp>

#define EXPECT_KIND(stmt, k)                                                \
  do {                                                                      \
    try {                                                                   \
      stmt;                                                                 \
      ADD_FAILURE() << "no error thrown, expected " << bubble_lab::to_string(k); \
    } catch (const bubble_lab::Error& e_) {                                 \
      EXPECT_EQ(e_.kind(), k) << e_.what();                                 \
    }                                                                       \
  } while (0)

namespace testing_support {

using bubble_lab::Point;

inline const bubble_lab::RadialProfile& prof(int n, std::int64_t num, std::int64_t den = 1) {
  return bubble_lab::acceptance::profile({n, bubble_lab::Rational(num, den)});
}

inline Point pt(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

/// int_0^inf f(r) dr on dyadic panels [0, s/2], [s/2, s], ... up to 1e7 s; f must decay faster than 1/r.
template <class F>
double radial_quad(F f, double s = 1) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double sum = GK::integrate(f, 0.0, 0.5 * s, 12, 1e-13);
  for (double a = 0.5 * s; a < 1e7 * s; a *= 2) sum += GK::integrate(f, a, 2 * a, 12, 1e-13);
  return sum;
}

inline Point axis(int n, double x1) {
  Point p = Point::Zero(n);
  p[0] = x1;
  return p;
}

}  // namespace testing_support
