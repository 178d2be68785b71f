#include <random>

#include "support.hpp"

using namespace bubble_lab;
using testing_support::axis;
using testing_support::pt;

namespace {

DomainModel unit_ball(int n) { return DomainModel::ball(Point::Zero(n), 1.0); }

DomainModel two_sphere_annulus(double k = 2) {
  return DomainModel::shifted_annulus(axis(4, 3), 1, 2, {k});
}

}  // namespace

TEST(Green, RegularPartAtCenterIsConstant) {
  for (int n : {3, 4, 5}) {
    auto D = unit_ball(n);
    std::mt19937_64 rng(7);
    for (const auto& x : acceptance::detail::random_ball_points(n, 1, 20, rng))
      EXPECT_NEAR(regular_part_ball(D, x, Point::Zero(n)) / newton_constant(n), 1, 1e-14);
  }
}

TEST(Green, SymmetricPositiveAndBelowFundamentalSolution) {
  for (int n : {3, 4, 5, 6}) {
    auto D = unit_ball(n);
    std::mt19937_64 rng(11 + n);
    auto xs = acceptance::detail::random_ball_points(n, 1, 2500, rng, 0.999);
    auto ys = acceptance::detail::random_ball_points(n, 1, 2500, rng, 0.999);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double g = green_ball(D, xs[i], ys[i]);
      ASSERT_GT(g, 0);
      ASSERT_LT(g, fundamental_solution(n, xs[i], ys[i]));
      if (i < 100) {
        EXPECT_LE(std::abs(g - green_ball(D, ys[i], xs[i])), 1e-12 * g);
      }
    }
  }
}

TEST(Green, VanishesOnTheBoundary) {
  auto D = unit_ball(4);
  std::mt19937_64 rng(3);
  auto ys = acceptance::detail::random_ball_points(4, 1, 100, rng);
  for (const auto& y : ys) {
    Point z = acceptance::detail::random_ball_points(4, 1, 1, rng)[0].normalized();
    double gamma = fundamental_solution(4, z, y);
    EXPECT_LE(std::abs(regular_part_ball(D, z, y) - gamma), 1e-10 * gamma);
  }
}

TEST(Green, HarmonicInX) {
  for (int n : {3, 4, 5}) {
    auto D = unit_ball(n);
    std::mt19937_64 rng(5);
    auto xs = acceptance::detail::random_ball_points(n, 1, 50, rng, 0.8);
    auto ys = acceptance::detail::random_ball_points(n, 1, 50, rng, 0.8);
    for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_LE(harmonicity_residual(D, xs[i], ys[i], 1e-3), 1e-6);
  }
}

TEST(Green, Errors) {
  auto D = unit_ball(4);
  Point x = axis(4, 0.3);
  EXPECT_KIND(green_ball(D, x, x), ErrorKind::coincident_points);
  EXPECT_KIND(regular_part_ball(two_sphere_annulus(), axis(4, 1.5), axis(4, 1.6)), ErrorKind::invalid_argument);
}

TEST(Reflection, BallAndAnnulus) {
  auto D = unit_ball(4);
  EXPECT_TRUE(D.reflect(axis(4, 0.9)).isApprox(axis(4, 1.1), 1e-15));
  EXPECT_NEAR(D.boundary_distance(axis(4, 0.9)), 0.1, 1e-15);
  auto A = two_sphere_annulus();
  // just outside the inner sphere, on the far side of the hole
  EXPECT_TRUE(A.reflect(axis(4, 4.1)).isApprox(axis(4, 3.9), 1e-15));
  EXPECT_NEAR(A.boundary_distance(axis(4, 4.1)), 0.1, 1e-15);
  EXPECT_KIND(D.reflect(Point::Zero(4)), ErrorKind::outside_collar);  // no unique projection at the center
  EXPECT_KIND(D.reflect(axis(4, 0.2)), ErrorKind::outside_collar);
  EXPECT_KIND(A.reflect(axis(4, 4.5)), ErrorKind::outside_collar);  // equidistant from both spheres
  EXPECT_KIND(D.reflect(axis(4, 1.5)), ErrorKind::outside_domain);
}

TEST(Reflection, MirrorIsAtDistanceFromProjection) {
  auto D = unit_ball(5);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    Point x = acceptance::detail::random_ball_points(5, 1, 1, rng)[0].normalized() *
              (1 - 0.45 * std::uniform_real_distribution<double>(0.001, 1)(rng));
    auto pr = D.project_to_boundary(x);
    EXPECT_NEAR((D.reflect(x) - pr.p).norm(), pr.d, 1e-14);
  }
}

TEST(Reflection, DistanceIsOneLipschitz) {
  auto A = two_sphere_annulus();
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1, 1);
  int tested = 0;
  while (tested < 500) {
    Point x = axis(4, 3), y;
    for (int i = 0; i < 4; ++i) x[i] += 2 * u(rng);
    y = x;
    for (int i = 0; i < 4; ++i) y[i] += 0.05 * u(rng);
    if (!A.contains(x) || !A.contains(y)) continue;
    EXPECT_LE(std::abs(A.boundary_distance(x) - A.boundary_distance(y)), (x - y).norm() * (1 + 1e-12));
    ++tested;
  }
}

TEST(RegularPartBound, BoundedAlongRefinement) {
  auto D = unit_ball(4);
  std::mt19937_64 rng(21);
  std::vector<Point> bps;
  for (int i = 0; i < 10; ++i) bps.push_back(acceptance::detail::random_ball_points(4, 1, 1, rng)[0].normalized());
  auto ys = acceptance::detail::random_ball_points(4, 1, 50, rng, 0.9);
  auto rep = regular_part_boundary_check(D, bps, ys, 0.2, 8);  // d from 0.2 down to 1.6e-3
  EXPECT_TRUE(rep.bounded);
  for (const auto& lev : rep.levels) EXPECT_GE(lev.min_H, 0);
  // log-log trend of the ratio against d is not increasing as d shrinks
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& lev : rep.levels) {
    double x = std::log(lev.d), y = std::log(lev.max_ratio);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  double m = rep.levels.size();
  EXPECT_GE((m * sxy - sx * sy) / (m * sxx - sx * sx), 0);
}

TEST(RegularPartBound, FiniteWhenYSitsOnTheNormal) {
  auto D = unit_ball(4);
  Point p = axis(4, 1);
  auto rep = regular_part_boundary_check(D, {p}, {axis(4, 0.9)}, 0.1, 4);
  for (const auto& lev : rep.levels) EXPECT_TRUE(std::isfinite(lev.max_ratio));
}

TEST(CriticalPoints, TwoSphereAnnulus) {
  auto rep = boundary_critical_points(two_sphere_annulus());
  ASSERT_EQ(rep.points.size(), 4u);
  std::vector<double> x1, good;
  for (const auto& cp : rep.points) {
    x1.push_back(cp.point.x[0]);
    for (int i = 1; i < 4; ++i) EXPECT_EQ(cp.point.x[i], 0);
    if (cp.satisfies_condition_a) {
      good.push_back(cp.point.x[0]);
      EXPECT_TRUE(cp.point.nu.isApprox(axis(4, 1), 1e-15));
      EXPECT_TRUE(cp.nondegenerate);
    }
  }
  EXPECT_EQ(x1, (std::vector<double>{1, 2, 4, 5}));
  EXPECT_EQ(good, (std::vector<double>{1, 4}));
}

TEST(CriticalPoints, OffAxisBall) {
  auto D = DomainModel::ball(axis(5, 3), 1, {3});
  auto rep = boundary_critical_points(D);
  ASSERT_EQ(rep.points.size(), 2u);
  int good = 0;
  for (const auto& cp : rep.points)
    if (cp.satisfies_condition_a) {
      ++good;
      EXPECT_DOUBLE_EQ(cp.point.x[0], 2);
    }
  EXPECT_EQ(good, 1);
}

TEST(CriticalPoints, ConstantWeightHasNoQualifyingPoint) {
  auto rep = boundary_critical_points(unit_ball(4));
  EXPECT_TRUE(rep.constant_weight);
  for (const auto& cp : rep.points) EXPECT_FALSE(cp.satisfies_condition_a);
}

TEST(CriticalPoints, WeightRescalingKeepsTheSignTest) {
  auto base = boundary_critical_points(two_sphere_annulus());
  for (double c : {1e-3, 0.5, 7.3, 1e4}) {
    auto rep = boundary_critical_points(two_sphere_annulus().with_weight_scale(c));
    ASSERT_EQ(rep.points.size(), base.points.size());
    for (std::size_t i = 0; i < rep.points.size(); ++i) {
      EXPECT_EQ(rep.points[i].satisfies_condition_a, base.points[i].satisfies_condition_a);
      EXPECT_TRUE(rep.points[i].point.x.isApprox(base.points[i].point.x, 1e-14));
    }
  }
  EXPECT_KIND(two_sphere_annulus().with_weight_scale(0), ErrorKind::invalid_argument);
}

TEST(Domain, Validation) {
  EXPECT_KIND(DomainModel::ball(Point::Zero(4), 1, {1}), ErrorKind::invalid_argument);  // x1 changes sign
  EXPECT_KIND(DomainModel::shifted_annulus(Point::Zero(4), 2, 1), ErrorKind::invalid_argument);
  EXPECT_KIND(DomainModel::ball(Point::Zero(2), 1), ErrorKind::invalid_argument);
  nlohmann::json j = {{"shape", "torus"}, {"n", 3}, {"center", {0, 0, 0}}, {"radii", {1}}};
  EXPECT_KIND(DomainModel::from_json(j), ErrorKind::invalid_argument);
  auto A = two_sphere_annulus();
  auto B = DomainModel::from_json(A.to_json());
  EXPECT_EQ(B.shape(), Shape::shifted_annulus);
  EXPECT_EQ(B.weight_exponents(), A.weight_exponents());
  EXPECT_DOUBLE_EQ(B.inner_radius(), 1);
}

TEST(Lift, RotationInvariantBlocks) {
  auto D = DomainModel::ball(axis(3, 5), 1, {1});
  auto f = [](const Point& x) { return x[0] + 10 * x[1] + 100 * x[2]; };
  // m = 1, k_1 = 1: y = (y^1 in R^2, z in R^2)
  double v1 = lift_to_full_domain(D, f, pt({3, 4, 0.1, 0.2}), {1});
  double v2 = lift_to_full_domain(D, f, pt({5, 0, 0.1, 0.2}), {1});
  EXPECT_DOUBLE_EQ(v1, 5 + 1 + 20);
  EXPECT_LE(std::abs(v1 - v2), 1e-14);
  EXPECT_KIND(lift_to_full_domain(D, f, pt({1, 0, 0, 0}), {1}), ErrorKind::outside_domain);
  EXPECT_KIND(lift_to_full_domain(D, f, pt({1, 0, 0}), {1}), ErrorKind::invalid_argument);
}
