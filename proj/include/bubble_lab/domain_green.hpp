#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>
#include <nlohmann/json.hpp>

#include "error.hpp"
#include "quadrature.hpp"

namespace bubble_lab {

using Point = Eigen::VectorXd;

enum class Shape { ball, shifted_annulus };

/// Model domain in R^n with weight a(x) = prod_i (x^i)^{k_i} over the first m coordinates.
class DomainModel {
 public:
  static DomainModel ball(Point center, double R, std::vector<double> weight_exponents = {}) {
    return DomainModel(Shape::ball, std::move(center), 0.0, R, std::move(weight_exponents));
  }
  static DomainModel shifted_annulus(Point center, double r_in, double r_out, std::vector<double> weight_exponents = {}) {
    return DomainModel(Shape::shifted_annulus, std::move(center), r_in, r_out, std::move(weight_exponents));
  }

  /// {"shape": "ball"|"shifted_annulus", "center": [...], "radii": [R] or [r_in, r_out],
  ///  "n": int, "weight_exponents": [...], "weight_scale": c (optional, default 1)}
  static DomainModel from_json(const nlohmann::json& j) {
    try {
      std::string shape = j.at("shape").get<std::string>();
      int n = j.at("n").get<int>();
      auto c = j.at("center").get<std::vector<double>>();
      auto radii = j.at("radii").get<std::vector<double>>();
      auto k = j.value("weight_exponents", std::vector<double>{});
      double scale = j.value("weight_scale", 1.0);
      if (static_cast<int>(c.size()) != n) throw Error(ErrorKind::invalid_argument, "center must have n entries");
      Point center = Eigen::Map<Point>(c.data(), n);
      if (shape == "ball") {
        if (radii.size() != 1) throw Error(ErrorKind::invalid_argument, "ball needs one radius");
        return ball(center, radii[0], k).with_weight_scale(scale);
      }
      if (shape == "shifted_annulus" || shape == "annulus") {
        if (radii.size() != 2) throw Error(ErrorKind::invalid_argument, "annulus needs two radii");
        return shifted_annulus(center, radii[0], radii[1], k).with_weight_scale(scale);
      }
      throw Error(ErrorKind::invalid_argument, "unknown shape '" + shape + "'");
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::invalid_argument, std::string("malformed domain JSON: ") + e.what());
    }
  }

  nlohmann::json to_json() const {
    std::vector<double> c(center_.data(), center_.data() + n());
    nlohmann::json j;
    j["shape"] = shape_ == Shape::ball ? "ball" : "shifted_annulus";
    j["n"] = n();
    j["center"] = c;
    j["radii"] = shape_ == Shape::ball ? std::vector<double>{r_out_} : std::vector<double>{r_in_, r_out_};
    j["weight_exponents"] = k_;
    j["weight_scale"] = scale_;
    return j;
  }

  Shape shape() const { return shape_; }
  int n() const { return static_cast<int>(center_.size()); }
  const Point& center() const { return center_; }
  double radius() const { return r_out_; }
  double inner_radius() const { return r_in_; }
  double outer_radius() const { return r_out_; }
  const std::vector<double>& weight_exponents() const { return k_; }
  double weight_scale() const { return scale_; }
  /// Copy with the weight multiplied by c > 0.
  DomainModel with_weight_scale(double c) const {
    if (!(c > 0)) throw Error(ErrorKind::invalid_argument, "weight scale must be positive");
    DomainModel D = *this;
    D.scale_ = c;
    return D;
  }
  bool constant_weight() const {
    return std::all_of(k_.begin(), k_.end(), [](double k) { return k == 0; });
  }

  bool contains(const Point& x) const {
    double r = (x - center_).norm();
    return r < r_out_ && (shape_ == Shape::ball || r > r_in_);
  }
  bool in_closure(const Point& x, double tol = 1e-12) const {
    double r = (x - center_).norm();
    return r <= r_out_ * (1 + tol) && (shape_ == Shape::ball || r >= r_in_ * (1 - tol));
  }

  double weight(const Point& x) const {
    double a = scale_;
    for (std::size_t i = 0; i < k_.size(); ++i)
      if (k_[i] != 0) a *= std::pow(x[i], k_[i]);
    return a;
  }
  Point weight_gradient(const Point& x) const {
    Point g = Point::Zero(n());
    double a = weight(x);
    for (std::size_t i = 0; i < k_.size(); ++i)
      if (k_[i] != 0) g[i] = k_[i] * a / x[i];
    return g;
  }
  Eigen::MatrixXd weight_hessian(const Point& x) const {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n(), n());
    double a = weight(x);
    for (std::size_t i = 0; i < k_.size(); ++i) {
      if (k_[i] == 0) continue;
      for (std::size_t j = 0; j < k_.size(); ++j) {
        if (k_[j] == 0) continue;
        H(i, j) = i == j ? k_[i] * (k_[i] - 1) * a / (x[i] * x[i]) : k_[i] * k_[j] * a / (x[i] * x[j]);
      }
    }
    return H;
  }

  /// Distance to the boundary for x in the closure.
  double boundary_distance(const Point& x) const {
    double r = (x - center_).norm();
    double d = r_out_ - r;
    if (shape_ == Shape::shifted_annulus) d = std::min(d, r - r_in_);
    return d;
  }

  /// Half-width of the collar in which reflections are accepted (points with d < 2 eta).
  double collar_eta() const {
    return shape_ == Shape::ball ? 0.25 * r_out_ : 0.25 * std::min(r_in_, r_out_ - r_in_);
  }

  struct Projection {
    Point p;       // nearest boundary point
    Point nu;      // inward unit normal at p
    double d = 0;  // distance
  };

  /// Nearest boundary point; fails when the projection is not unique or x is outside the collar.
  Projection project_to_boundary(const Point& x) const {
    if (!contains(x)) throw Error(ErrorKind::outside_domain, "point is not inside the domain");
    Point v = x - center_;
    double r = v.norm();
    double d_out = r_out_ - r;
    double d_in = shape_ == Shape::shifted_annulus ? r - r_in_ : std::numeric_limits<double>::infinity();
    if (r == 0 || d_out == d_in) throw Error(ErrorKind::outside_collar, "boundary projection is not unique");
    Projection pr;
    Point dir = v / r;
    if (d_out < d_in) {
      pr.d = d_out;
      pr.nu = -dir;
      pr.p = center_ + r_out_ * dir;
    } else {
      pr.d = d_in;
      pr.nu = dir;
      pr.p = center_ + r_in_ * dir;
    }
    if (pr.d >= 2 * collar_eta()) throw Error(ErrorKind::outside_collar, "point lies beyond the reflection collar");
    return pr;
  }

  /// Reflection across the nearest boundary component: x - 2 d(x) nu(x).
  Point reflect(const Point& x) const {
    auto pr = project_to_boundary(x);
    return x - 2 * pr.d * pr.nu;
  }

  /// Inward unit normal at a boundary point.
  Point inward_normal(const Point& p) const {
    Point v = p - center_;
    double r = v.norm();
    if (shape_ == Shape::shifted_annulus && std::abs(r - r_in_) < std::abs(r - r_out_)) return v / r;
    return -v / r;
  }

 private:
  DomainModel(Shape s, Point c, double r_in, double r_out, std::vector<double> k)
      : shape_(s), center_(std::move(c)), r_in_(r_in), r_out_(r_out), k_(std::move(k)) {
    if (n() < 3) throw Error(ErrorKind::invalid_argument, "dimension must be at least 3");
    if (!(r_out_ > 0) || (shape_ == Shape::shifted_annulus && !(r_in_ > 0 && r_in_ < r_out_)))
      throw Error(ErrorKind::invalid_argument, "invalid radii");
    if (static_cast<int>(k_.size()) > n()) throw Error(ErrorKind::invalid_argument, "more weight exponents than coordinates");
    for (std::size_t i = 0; i < k_.size(); ++i) {
      if (k_[i] < 0) throw Error(ErrorKind::invalid_argument, "weight exponents must be non-negative");
      if (k_[i] != 0 && !(center_[i] - r_out_ > 0))
        throw Error(ErrorKind::invalid_argument, "weighted coordinate must stay positive on the closure");
    }
  }

  Shape shape_;
  Point center_;
  double r_in_, r_out_;
  std::vector<double> k_;
  double scale_ = 1;
};

/// gamma_n |x - y|^{2-n}.
inline double fundamental_solution(int n, const Point& x, const Point& y) {
  double d = (x - y).norm();
  if (d == 0) throw Error(ErrorKind::coincident_points, "kernel evaluated at coincident points");
  return newton_constant(n) * std::pow(d, 2.0 - n);
}

namespace detail {
inline void require_ball(const DomainModel& D) {
  if (D.shape() != Shape::ball)
    throw Error(ErrorKind::invalid_argument, "closed-form Green function is only available on the ball");
}
}  // namespace detail

/// Regular part of the Dirichlet Green function of a ball, written in the
/// symmetric form gamma_n (|x'|^2 |y'|^2 / R^2 - 2 x'.y' + R^2)^{(2-n)/2}, x' = x - c.
inline double regular_part_ball(const DomainModel& D, const Point& x, const Point& y) {
  detail::require_ball(D);
  const int n = D.n();
  const double R = D.radius();
  Point xs = x - D.center(), ys = y - D.center();
  double s = xs.squaredNorm() * ys.squaredNorm() / (R * R) - 2 * xs.dot(ys) + R * R;
  return newton_constant(n) * std::pow(s, 0.5 * (2 - n));
}

inline double green_ball(const DomainModel& D, const Point& x, const Point& y) {
  double gamma = fundamental_solution(D.n(), x, y);
  return gamma - regular_part_ball(D, x, y);
}

/// Fourth-order finite-difference Laplacian in x of H(., y), relative to |H(x, y)|.
inline double harmonicity_residual(const DomainModel& D, const Point& x, const Point& y, double h) {
  double H0 = regular_part_ball(D, x, y);
  double lap = 0;
  for (int i = 0; i < D.n(); ++i) {
    Point e = Point::Zero(D.n());
    e[i] = h;
    double f2p = regular_part_ball(D, x + 2 * e, y), f1p = regular_part_ball(D, x + e, y);
    double f1m = regular_part_ball(D, x - e, y), f2m = regular_part_ball(D, x - 2 * e, y);
    lap += (-f2p + 16 * f1p - 30 * H0 + 16 * f1m - f2m) / (12 * h * h);
  }
  return std::abs(lap) / std::abs(H0);
}

struct RegularPartLevel {
  double d = 0;          // distance to the boundary on this level
  double max_ratio = 0;  // max |H - gamma_n |xbar - y|^{2-n}| |xbar - y|^{n-2} / d
  double min_H = 0;
};

struct RegularPartReport {
  std::vector<RegularPartLevel> levels;
  bool bounded = false;  // every level stays within growth_factor of the previous one
};

/// Compares H(x, y) with the reflected kernel along a refinement d, d/2, d/4, ...
/// Each level uses the same boundary points and sample ys.
inline RegularPartReport regular_part_boundary_check(const DomainModel& D, const std::vector<Point>& boundary_points,
                                   const std::vector<Point>& ys, double d0, int levels, double growth_factor = 1.5) {
  detail::require_ball(D);
  const int n = D.n();
  const double gn = newton_constant(n);
  RegularPartReport rep;
  double d = d0;
  for (int l = 0; l < levels; ++l, d /= 2) {
    RegularPartLevel lev;
    lev.d = d;
    lev.min_H = std::numeric_limits<double>::infinity();
    for (const Point& p : boundary_points) {
      Point x = p + d * D.inward_normal(p);
      Point xb = D.reflect(x);
      for (const Point& y : ys) {
        double H = regular_part_ball(D, x, y);
        double dist = (xb - y).norm();
        double ratio = std::abs(H - gn * std::pow(dist, 2.0 - n)) * std::pow(dist, n - 2.0) / d;
        lev.max_ratio = std::max(lev.max_ratio, ratio);
        lev.min_H = std::min(lev.min_H, H);
      }
    }
    rep.levels.push_back(lev);
  }
  rep.bounded = true;
  for (std::size_t l = 1; l < rep.levels.size(); ++l)
    if (!(rep.levels[l].max_ratio <= growth_factor * rep.levels[l - 1].max_ratio)) rep.bounded = false;
  for (const auto& lev : rep.levels)
    if (!std::isfinite(lev.max_ratio)) rep.bounded = false;
  return rep;
}

struct BoundaryPoint {
  Point x;
  Point nu;  // inward unit normal
  double d_to_other_component = std::numeric_limits<double>::infinity();
};

struct CriticalPoint {
  BoundaryPoint point;
  double weight = 0;
  double normal_derivative = 0;  // <grad a, nu>
  bool satisfies_condition_a = false;
  bool nondegenerate = false;
  std::vector<double> tangential_hessian_eigenvalues;
};

struct CriticalPointReport {
  std::vector<CriticalPoint> points;
  bool constant_weight = false;  // every boundary point is critical; none qualifies
};

namespace detail {

// Critical points of a restricted to the sphere |x - c| = rho. At such points
// grad a = lambda (x - c); for weighted coordinates u_i = x_i - c_i solves
// u_i (c_i + u_i) = mu k_i with a common mu, all other u_j vanish.
inline std::vector<Point> sphere_critical_points(const DomainModel& D, double rho) {
  const Point& c = D.center();
  const auto& k = D.weight_exponents();
  std::vector<int> w;
  for (std::size_t i = 0; i < k.size(); ++i)
    if (k[i] != 0) w.push_back(static_cast<int>(i));
  std::vector<Point> out;
  const int m = static_cast<int>(w.size());
  double mu_min = -std::numeric_limits<double>::infinity();
  for (int i : w) mu_min = std::max(mu_min, -c[i] * c[i] / (4 * k[i]));
  for (int mask = 0; mask < (1 << m); ++mask) {
    auto offsets = [&](double mu) {
      std::vector<double> u(m);
      for (int j = 0; j < m; ++j) {
        double disc = std::max(0.0, c[w[j]] * c[w[j]] + 4 * mu * k[w[j]]);
        int br = (mask >> j) & 1 ? -1 : 1;
        u[j] = 0.5 * (-c[w[j]] + br * std::sqrt(disc));
      }
      return u;
    };
    auto g = [&](double mu) {
      double s = 0;
      for (double v : offsets(mu)) s += v * v;
      return s - rho * rho;
    };
    double mu_max = 1;
    while (g(mu_max) <= 0 && mu_max < 1e30) mu_max *= 2;
    // Scan [mu_min, mu_max] with a grid refined near mu_min, where the branches meet.
    const int N = 4000;
    std::vector<double> grid;
    double span = mu_max - mu_min;
    for (int i = 0; i <= N; ++i) {
      double t = double(i) / N;
      grid.push_back(mu_min + span * t * t);
    }
    for (int i = 0; i < N; ++i) {
      double a = grid[i], b = grid[i + 1];
      double ga = g(a), gb = g(b);
      double root;
      if (ga == 0) {
        root = a;
      } else if (ga * gb < 0) {
        boost::uintmax_t iters = 200;
        auto r = boost::math::tools::toms748_solve(g, a, b, ga, gb,
                                                   boost::math::tools::eps_tolerance<double>(52), iters);
        root = 0.5 * (r.first + r.second);
      } else {
        continue;
      }
      auto u = offsets(root);
      Point x = c;
      for (int j = 0; j < m; ++j) x[w[j]] = c[w[j]] + u[j];
      // Re-normalize onto the sphere to remove root-finding round-off.
      x = c + rho * (x - c).normalized();
      bool positive = true;
      for (int j = 0; j < m; ++j) positive = positive && x[w[j]] > 0;
      if (!positive) continue;
      bool dup = false;
      for (const Point& y : out) dup = dup || (y - x).norm() < 1e-9 * rho;
      if (!dup) out.push_back(x);
    }
  }
  return out;
}

inline Eigen::MatrixXd tangent_basis(const Point& N) {
  const int n = static_cast<int>(N.size());
  Eigen::MatrixXd A(n, 1);
  A.col(0) = N;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return Q.rightCols(n - 1);
}

}  // namespace detail

/// Critical points of a on the boundary, tagged with condition (a): <grad a, nu> > 0
/// for the inward normal nu, and with non-degeneracy of the tangential Hessian.
inline CriticalPointReport boundary_critical_points(const DomainModel& D) {
  CriticalPointReport rep;
  if (D.constant_weight()) {
    rep.constant_weight = true;
    return rep;
  }
  std::vector<double> radii{D.outer_radius()};
  if (D.shape() == Shape::shifted_annulus) radii.push_back(D.inner_radius());
  for (double rho : radii) {
    for (const Point& x : detail::sphere_critical_points(D, rho)) {
      CriticalPoint cp;
      cp.point.x = x;
      cp.point.nu = D.inward_normal(x);
      if (D.shape() == Shape::shifted_annulus) cp.point.d_to_other_component = D.outer_radius() - D.inner_radius();
      cp.weight = D.weight(x);
      Point grad = D.weight_gradient(x);
      cp.normal_derivative = grad.dot(cp.point.nu);
      cp.satisfies_condition_a = cp.normal_derivative > 0;
      Point N = (x - D.center()) / rho;  // outward from the sphere's center
      Eigen::MatrixXd T = detail::tangent_basis(N);
      Eigen::MatrixXd Ht = T.transpose() * D.weight_hessian(x) * T -
                           (grad.dot(N) / rho) * Eigen::MatrixXd::Identity(D.n() - 1, D.n() - 1);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ht);
      double scale = std::max(grad.norm() / rho, D.weight_hessian(x).norm());
      cp.nondegenerate = true;
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        cp.tangential_hessian_eigenvalues.push_back(es.eigenvalues()[i]);
        if (std::abs(es.eigenvalues()[i]) <= 1e-10 * scale) cp.nondegenerate = false;
      }
      rep.points.push_back(std::move(cp));
    }
  }
  std::sort(rep.points.begin(), rep.points.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    for (Eigen::Index i = 0; i < a.point.x.size(); ++i)
      if (a.point.x[i] != b.point.x[i]) return a.point.x[i] < b.point.x[i];
    return false;
  });
  return rep;
}

/// Evaluates f at (|y^1|, ..., |y^m|, z) where y^i occupies k_i + 1 consecutive
/// coordinates of y and z is the remaining n - m coordinates.
inline double lift_to_full_domain(const DomainModel& D, const std::function<double(const Point&)>& f, const Point& y,
                                  const std::vector<int>& partition) {
  const int m = static_cast<int>(partition.size());
  const int n = D.n();
  if (m > n) throw Error(ErrorKind::invalid_argument, "partition longer than the dimension");
  int N = n - m;
  for (int k : partition) {
    if (k < 0) throw Error(ErrorKind::invalid_argument, "partition entries must be non-negative");
    N += k + 1;
  }
  if (y.size() != N) throw Error(ErrorKind::invalid_argument, "point has the wrong dimension for this partition");
  Point x(n);
  int pos = 0;
  for (int i = 0; i < m; ++i) {
    x[i] = y.segment(pos, partition[i] + 1).norm();
    pos += partition[i] + 1;
  }
  for (int j = m; j < n; ++j) x[j] = y[pos++];
  if (!D.in_closure(x)) throw Error(ErrorKind::outside_domain, "lifted point lies outside the lifted domain");
  return f(x);
}

}  // namespace bubble_lab
