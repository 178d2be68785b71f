#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/hypergeometric_pFq.hpp>

#include "support.hpp"

using namespace bubble_lab;
using testing_support::axis;
using testing_support::prof;

namespace {

constexpr double pi = std::numbers::pi;

ReducedCoefficients fast_coeffs(double alpha = 1, double beta = 1) {
  return acceptance::detail::coefficients_for({4, {5, 2}}, 0.01, alpha, beta);
}

DomainModel two_sphere_annulus() { return DomainModel::shifted_annulus(axis(4, 3), 1, 2, {2}); }

// Angular mean of |r w + X e|^{-m} over S^{n-1} for r < X, by the Gegenbauer generating function.
double angular_mean_2f1(int n, double m, double r, double X) {
  using boost::math::hypergeometric_pFq;
  return std::pow(X, -m) *
         hypergeometric_pFq({0.5 * m, 0.5 * m - 0.5 * n + 1}, {0.5 * n}, (r / X) * (r / X));
}

}  // namespace

TEST(Coefficients, Relations) {
  for (auto c : {fast_coeffs(), acceptance::detail::coefficients_for({5, {7, 5}}, 0.01)}) {
    EXPECT_NEAR(c.c6 / c.c2, -(c.n - 2.0) / (c.n - 1), 1e-14);
    EXPECT_DOUBLE_EQ(c.c1, c.c4);
    EXPECT_GT(c.c5_active(), 0);
    EXPECT_GT(c.c6, 0);
  }
}

TEST(Coefficients, SymmetricPair) {
  const auto& P = prof(4, 3);
  auto k = compute_constants(P);
  for (auto [alpha, beta] : {std::pair{1.0, 1.0}, std::pair{0.5, 2.0}}) {
    auto e = ExponentPair::make(4, Rational(3), alpha, beta, 0);
    auto c = assemble_coefficients(k, e, P.tail.b);
    EXPECT_NEAR(c.c1, 16 * pi * pi / 3, 2e-3 * c.c1);
    EXPECT_NEAR(c.c3, -(alpha + beta) * k.A1 / 16 + 2 * k.A3 / 4, 1e-9 * std::abs(c.c3));
    EXPECT_DOUBLE_EQ(c.rate, 1.5);
    EXPECT_DOUBLE_EQ(c.exponent, 2);
  }
}

TEST(Coefficients, Errors) {
  auto kslow = compute_constants(prof(5, 7, 5));
  auto eslow = ExponentPair::make(5, Rational(7, 5), 1, 1, 0);
  EXPECT_KIND(assemble_coefficients(kslow, eslow, 1.0), ErrorKind::missing_constant);
  auto kfast = compute_constants(prof(4, 5, 2));
  kfast.B2_defined = false;
  EXPECT_KIND(assemble_coefficients(kfast, ExponentPair::make(4, Rational(5, 2), 1, 1, 0), 1.0),
              ErrorKind::missing_constant);
  EXPECT_KIND(assemble_coefficients(kfast, ExponentPair::make(4, Rational(2)), 1.0), ErrorKind::unsupported_regime);
}

TEST(SlowIntegral, MatchesHypergeometricRoute) {
  const auto& P = prof(5, 7, 5);
  const int n = 5;
  const double m = n - 3 * 1.4;
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  for (double X : {4.0, 16.0, 64.0}) {
    auto f = [&](double r) {
      return std::pow(P.eval(r).V, 1.4) * std::pow(r, n - 1) * angular_mean_2f1(n, m, r, X);
    };
    double radial = 0, a = 0;
    for (double b = 0.5; a < X / 2; b = std::min(2 * b, X / 2)) {
      radial += GK::integrate(f, a, b, 15, 1e-12);
      a = b;
    }
    double oracle = sphere_area(n) * radial;
    EXPECT_NEAR(slow_placement_integral(P, X) / oracle, 1, 1e-8) << X;
  }
  EXPECT_KIND(slow_placement_integral(prof(4, 5, 2), 4), ErrorKind::unsupported_regime);
  EXPECT_KIND(slow_placement_integral(P, 0), ErrorKind::invalid_argument);
}

TEST(SlowIntegral, GrowsAndSaturates) {
  const auto& P = prof(5, 7, 5);
  double prev = 0;
  for (double X : {4.0, 16.0, 64.0, 256.0}) {
    double I = slow_placement_integral(P, X);
    EXPECT_GT(I, prev);
    prev = I;
  }
}

TEST(EnergyModel, LeadingTerm) {
  auto c = fast_coeffs();
  std::vector<WeightData> w{{1.5, 0.7}};
  for (double eps : {1e-3, 1e-5, 1e-7}) {
    double J = evaluate_J(c, w, {0.3}, {0.8}, eps);
    double lead = (J - c.c2 * eps * std::log(eps) * 1.5) / (c.c1 * 1.5);
    EXPECT_NEAR(lead, 1, 200 * eps);
  }
}

TEST(EnergyModel, DoublingLambdaAndT) {
  auto c = fast_coeffs();
  WeightData w{2.0, 0.4};
  const double eps = 0.01, L = 0.2, t = 0.7;
  double J1 = evaluate_J(c, {w}, {L}, {t}, eps), J2 = evaluate_J(c, {w}, {2 * L}, {2 * t}, eps);
  double shift = eps * (-c.c6 * w.a * std::log(2.0) + c.c4 * w.g * t);
  EXPECT_NEAR(J2 - J1, shift, 1e-12 * std::abs(J1));
}

TEST(EnergyModel, AdditiveOverBubbles) {
  auto c = fast_coeffs();
  const double eps = 0.02;
  WeightData w1{1.0, 0.5}, w2{3.0, 2.0};
  double J12 = evaluate_J(c, {w1, w2}, {0.1, 0.4}, {1.0, 0.3}, eps);
  double J1 = evaluate_J(c, {w1}, {0.1}, {1.0}, eps), J2 = evaluate_J(c, {w2}, {0.4}, {0.3}, eps);
  EXPECT_NEAR(J12, J1 + J2, 1e-13 * std::abs(J12));
  EXPECT_KIND(evaluate_J(c, {w1}, {0.1, 0.2}, {1.0}, eps), ErrorKind::invalid_argument);
  EXPECT_KIND(evaluate_J(c, {w1}, {-0.1}, {1.0}, eps), ErrorKind::invalid_argument);
}

TEST(InnerProblem, ClosedFormAgainstGridOracle) {
  for (auto c : {fast_coeffs(), acceptance::detail::coefficients_for({5, {7, 5}}, 0.01)}) {
    for (WeightData w : {WeightData{1.0, 1.0}, WeightData{0.3, 5.0}, WeightData{8.0, 0.1}}) {
      auto ic = inner_critical_point(c, w.a, w.g);
      EXPECT_LE(stationarity_residual(c, w, ic.Lambda_star, ic.t_star), 1e-12);
      EXPECT_TRUE(ic.hessian_definite);
      auto f = [&](double L, double t) { return bracket_term(c, w, L, t); };
      auto [Lg, tg] = acceptance::oracle::log_grid_minimize(f, ic.Lambda_star / 4, ic.Lambda_star * 4, ic.t_star / 4,
                                                            ic.t_star * 4);
      EXPECT_NEAR(Lg / ic.Lambda_star, 1, 1e-6);
      EXPECT_NEAR(tg / ic.t_star, 1, 1e-6);
    }
  }
}

TEST(InnerProblem, GradientMatchesFiniteDifferences) {
  auto c = fast_coeffs();
  WeightData w{1.3, 0.6};
  const double L = 0.05, t = 0.9, h = 1e-6;
  auto g = bracket_gradient(c, w, L, t);
  double dL = (bracket_term(c, w, L * (1 + h), t) - bracket_term(c, w, L * (1 - h), t)) / (2 * L * h);
  double dt = (bracket_term(c, w, L, t * (1 + h)) - bracket_term(c, w, L, t * (1 - h))) / (2 * t * h);
  EXPECT_NEAR(g[0], dL, 1e-6 * std::abs(dL) + 1e-6);
  EXPECT_NEAR(g[1], dt, 1e-6 * std::abs(dt) + 1e-6);
}

TEST(InnerProblem, Errors) {
  auto c = fast_coeffs();
  EXPECT_KIND(inner_critical_point(c, 1, 0), ErrorKind::no_interior_minimum);
  EXPECT_KIND(inner_critical_point(c, 1, -2), ErrorKind::no_interior_minimum);
  EXPECT_KIND(inner_critical_point(c, 0, 1), ErrorKind::invalid_argument);
}

TEST(Configuration, TwoSphereAnnulus) {
  auto c = fast_coeffs();
  auto r = find_configuration(two_sphere_annulus(), c, 2, 0.01);
  ASSERT_EQ(r.config.xi_list.size(), 2u);
  EXPECT_TRUE(r.config.xi_list[0].isApprox(axis(4, 1), 1e-15));
  EXPECT_TRUE(r.config.xi_list[1].isApprox(axis(4, 4), 1e-15));
  for (int i = 0; i < 2; ++i) {
    EXPECT_TRUE(r.inner[i].hessian_definite);
    EXPECT_NEAR(r.delta_pred[i], std::pow(0.01, 1.5) * r.config.Lambda_list[i], 1e-12 * r.delta_pred[i]);
    EXPECT_TRUE(r.xi_eps[i].isApprox(axis(4, r.config.xi_list[i][0] + 0.01 * r.config.t_list[i]), 1e-15));
  }
  EXPECT_NEAR(r.margin, std::pow(0.01, 1.25), 1e-15);
}

TEST(Configuration, WeightRescalingInvariance) {
  auto c = fast_coeffs();
  auto r1 = find_configuration(two_sphere_annulus(), c, 2, 0.01);
  auto r2 = find_configuration(two_sphere_annulus().with_weight_scale(7.3), c, 2, 0.01);
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(r2.config.Lambda_list[i] / r1.config.Lambda_list[i], 1, 1e-12);
    EXPECT_NEAR(r2.config.t_list[i] / r1.config.t_list[i], 1, 1e-12);
  }
  EXPECT_NEAR(r2.J_model / r1.J_model, 7.3, 7.3e-12);
}

TEST(Configuration, BallAndConstantWeight) {
  auto c = fast_coeffs();
  auto r = find_configuration(DomainModel::ball(axis(4, 3), 1, {1}), c, 1, 0.01);
  ASSERT_EQ(r.config.xi_list.size(), 1u);
  EXPECT_DOUBLE_EQ(r.config.xi_list[0][0], 2);
  EXPECT_KIND(find_configuration(DomainModel::ball(axis(4, 3), 1, {1}), c, 2, 0.01),
              ErrorKind::insufficient_critical_points);
  EXPECT_KIND(find_configuration(DomainModel::ball(Point::Zero(4), 1), c, 1, 0.01),
              ErrorKind::insufficient_critical_points);
  EXPECT_KIND(find_configuration(two_sphere_annulus(), c, 0, 0.01), ErrorKind::invalid_argument);
}
