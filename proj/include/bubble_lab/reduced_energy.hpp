#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "domain_green.hpp"
#include "energy_constants.hpp"
#include "ground_state.hpp"
#include "parallel.hpp"

namespace bubble_lab {

/// Coefficients of the reduced energy
///   J = (c1 + c2 eps log eps) sum a_i
///     + eps sum [c3 a_i + c4 g_i t_i + c5 a_i (Lambda_i / 2 t_i)^e - c6 a_i log Lambda_i]
/// with g_i = <grad a, nu> at xi_i and e = n - 2 (FAST) or (n - 2) p0 - 2 (SLOW).
/// In the SLOW regime the c5 slot holds c5' = b I / gamma_n.
struct ReducedCoefficients {
  double c1 = 0, c2 = 0, c3 = 0, c4 = 0, c5 = 0, c5_prime = 0, c6 = 0;
  double margin_constant = 1;  // display only: the band |margin_constant| eps^{1.25}
  Regime regime = Regime::fast;
  int n = 0;
  double p0 = 0;
  double rate = 0;      // delta = eps^rate Lambda
  double exponent = 0;  // e above
  double slow_integral = 0;

  double c5_active() const { return regime == Regime::slow ? c5_prime : c5; }
};

/// Ratio |x_i| = 2 eta / delta for a placement with parameters (t, Lambda) at eps.
inline double placement_ratio(const ExponentPair& e, double eps, double t, double Lambda) {
  double rate = concentration_exponent(e.n, e.p0, e.regime);
  return 2 * t * std::pow(eps, 1 - rate) / Lambda;
}

/// I = int_{|y| < X/2} V^{p0}(y) |y + X e_1|^{(n-2)p0 - n} dy for the SLOW regime.
/// Radial quadrature of the angular mean of the kernel, which is smooth because |y| <= X/2.
inline double slow_placement_integral(const RadialProfile& prof, double X) {
  const ExponentPair& e = prof.pair;
  if (e.regime != Regime::slow) throw Error(ErrorKind::unsupported_regime, "the placement integral is a SLOW-regime quantity");
  if (!(X > 0)) throw Error(ErrorKind::invalid_argument, "placement ratio must be positive");
  const int n = e.n;
  const double m = n - (n - 2) * e.p0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  auto angular = [&](double r) {
    auto g = [&](double th) {
      return std::pow(r * r + X * X + 2 * r * X * std::cos(th), -0.5 * m) * std::pow(std::sin(th), n - 2);
    };
    return GK::integrate(g, 0.0, std::numbers::pi, 10, 1e-13);
  };
  auto radial = [&](double r) { return std::pow(prof.eval(r).V, e.p0) * std::pow(r, n - 1) * angular(r); };
  std::vector<double> br{0.0};
  for (double b = 0.5; b < 0.5 * X; b *= 2) br.push_back(b);
  br.push_back(0.5 * X);
  double sum = 0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) sum += GK::integrate(radial, br[i], br[i + 1], 12, 1e-11);
  return sphere_area(n - 1) * sum;
}

/// Builds the coefficient bundle. b is the tail constant of V; slow_I is required in
/// the SLOW regime and ignored otherwise.
inline ReducedCoefficients assemble_coefficients(const EnergyConstants& k, const ExponentPair& e, double b,
                                                 std::optional<double> slow_I = std::nullopt,
                                                 double margin_constant = 1.0) {
  if (e.regime == Regime::log) throw Error(ErrorKind::unsupported_regime, "no reduced energy in the borderline regime");
  const int n = e.n;
  const double p0 = e.p0, q0 = e.q0;
  const double qq = (q0 + 1) * (q0 + 1), pp = (p0 + 1) * (p0 + 1);
  ReducedCoefficients c;
  c.regime = e.regime;
  c.n = n;
  c.p0 = p0;
  c.rate = concentration_exponent(n, p0, e.regime);
  c.exponent = decay_exponent_U(n, p0, e.regime);
  c.margin_constant = margin_constant;
  c.c1 = 2 * k.A1 / n;
  c.c4 = 2 * k.A1 / n;
  c.c6 = n * (k.A1 / qq + k.B1 / pp);
  c.c2 = -(double(n) * (n - 1) / (n - 2)) * (k.A1 / qq + k.B1 / pp);
  c.c3 = -(e.beta * k.A1 / qq + e.alpha * k.B1 / pp) + (k.A3 / (q0 + 1) + k.B3 / (p0 + 1));
  const double gn = newton_constant(n);
  if (e.regime == Regime::fast) {
    if (!k.B2_defined) throw Error(ErrorKind::missing_constant, "B2 is required in the FAST regime");
    c.c5 = b * k.B2 / gn;
  } else {
    if (!slow_I) throw Error(ErrorKind::missing_constant, "the SLOW regime needs the placement integral I");
    if (!(*slow_I > 0)) throw Error(ErrorKind::invalid_argument, "placement integral must be positive");
    c.slow_integral = *slow_I;
    c.c5_prime = b * *slow_I / gn;
  }
  return c;
}

/// Weight data at a boundary point: a(xi) and <grad a(xi), nu(xi)>.
struct WeightData {
  double a = 0, g = 0;
};

/// One summand of the eps-bracket.
inline double bracket_term(const ReducedCoefficients& c, const WeightData& w, double Lambda, double t) {
  return c.c3 * w.a + c.c4 * w.g * t + c.c5_active() * w.a * std::pow(Lambda / (2 * t), c.exponent) -
         c.c6 * w.a * std::log(Lambda);
}

/// Gradient of bracket_term in (Lambda, t).
inline Eigen::Vector2d bracket_gradient(const ReducedCoefficients& c, const WeightData& w, double Lambda, double t) {
  double P = c.c5_active() * w.a * std::pow(Lambda / (2 * t), c.exponent);
  return {c.exponent * P / Lambda - c.c6 * w.a / Lambda, c.c4 * w.g - c.exponent * P / t};
}

inline Eigen::Matrix2d bracket_hessian(const ReducedCoefficients& c, const WeightData& w, double Lambda, double t) {
  const double e = c.exponent;
  double P = c.c5_active() * w.a * std::pow(Lambda / (2 * t), e);
  Eigen::Matrix2d H;
  H(0, 0) = e * (e - 1) * P / (Lambda * Lambda) + c.c6 * w.a / (Lambda * Lambda);
  H(1, 1) = e * (e + 1) * P / (t * t);
  H(0, 1) = H(1, 0) = -e * e * P / (Lambda * t);
  return H;
}

/// Model value of J (the O(eps^{1+sigma}) remainder is not included).
inline double evaluate_J(const ReducedCoefficients& c, const std::vector<WeightData>& w,
                         const std::vector<double>& Lambda, const std::vector<double>& t, double eps) {
  if (!(eps > 0)) throw Error(ErrorKind::invalid_argument, "epsilon must be positive");
  if (w.size() != Lambda.size() || w.size() != t.size())
    throw Error(ErrorKind::invalid_argument, "configuration vectors differ in length");
  double sa = 0, br = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(Lambda[i] > 0 && t[i] > 0)) throw Error(ErrorKind::invalid_argument, "Lambda and t must be positive");
    sa += w[i].a;
    br += bracket_term(c, w[i], Lambda[i], t[i]);
  }
  return (c.c1 + c.c2 * eps * std::log(eps)) * sa + eps * br;
}

inline double margin_band(const ReducedCoefficients& c, double eps) {
  return std::abs(c.margin_constant) * std::pow(eps, 1.25);
}

struct InnerCriticalPoint {
  double Lambda_star = 0, t_star = 0;
  bool hessian_definite = false;
  Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
};

/// Closed-form minimizer of the bracket in (Lambda, t):
/// t* = c6 a / (c4 g), (Lambda*/2t*)^e = c6 / (e c5).
inline InnerCriticalPoint inner_critical_point(const ReducedCoefficients& c, double a, double g) {
  if (!(a > 0)) throw Error(ErrorKind::invalid_argument, "weight must be positive");
  if (!(g > 0))
    throw Error(ErrorKind::no_interior_minimum, "<grad a, nu> <= 0: the bracket decreases without bound as t grows");
  const double c5 = c.c5_active();
  if (!(c5 > 0) || !(c.c4 > 0) || !(c.c6 > 0)) throw Error(ErrorKind::invalid_argument, "c4, c5, c6 must be positive");
  InnerCriticalPoint r;
  r.t_star = c.c6 * a / (c.c4 * g);
  r.Lambda_star = 2 * r.t_star * std::pow(c.c6 / (c.exponent * c5), 1 / c.exponent);
  r.hessian = bracket_hessian(c, {a, g}, r.Lambda_star, r.t_star);
  r.hessian_definite = r.hessian(0, 0) > 0 && r.hessian.determinant() > 0;
  return r;
}

/// Dimensionless stationarity residual max(|Lambda dF/dLambda|, |t dF/dt|) / (c6 a).
inline double stationarity_residual(const ReducedCoefficients& c, const WeightData& w, double Lambda, double t) {
  Eigen::Vector2d gr = bracket_gradient(c, w, Lambda, t);
  return std::max(std::abs(Lambda * gr[0]), std::abs(t * gr[1])) / (c.c6 * w.a);
}

struct Configuration {
  std::vector<Point> xi_list;
  std::vector<double> Lambda_list, t_list;
  double epsilon = 0;
};

struct ConfigurationResult {
  Configuration config;
  std::vector<WeightData> weights;
  std::vector<InnerCriticalPoint> inner;
  std::vector<double> delta_pred;
  std::vector<Point> xi_eps;
  double J_model = 0;
  double margin = 0;
};

/// Takes the first kappa condition-(a), non-degenerate boundary critical points
/// (ordered by coordinates) and solves the inner problem at each.
inline ConfigurationResult find_configuration(const DomainModel& D, const ReducedCoefficients& c, int kappa,
                                              double eps) {
  if (kappa < 1) throw Error(ErrorKind::invalid_argument, "kappa must be at least 1");
  if (!(eps > 0)) throw Error(ErrorKind::invalid_argument, "epsilon must be positive");
  auto rep = boundary_critical_points(D);
  std::vector<const CriticalPoint*> good;
  for (const auto& cp : rep.points)
    if (cp.satisfies_condition_a && cp.nondegenerate) good.push_back(&cp);
  if (static_cast<int>(good.size()) < kappa)
    throw Error(ErrorKind::insufficient_critical_points,
                "need " + std::to_string(kappa) + " condition-(a) critical points, found " + std::to_string(good.size()));
  ConfigurationResult out;
  out.config.epsilon = eps;
  out.inner.resize(kappa);
  out.weights.resize(kappa);
  parallel_for(static_cast<std::size_t>(kappa), [&](std::size_t i) {
    out.weights[i] = {good[i]->weight, good[i]->normal_derivative};
    out.inner[i] = inner_critical_point(c, out.weights[i].a, out.weights[i].g);
  });
  for (int i = 0; i < kappa; ++i) {
    const CriticalPoint& cp = *good[i];
    out.config.xi_list.push_back(cp.point.x);
    out.config.Lambda_list.push_back(out.inner[i].Lambda_star);
    out.config.t_list.push_back(out.inner[i].t_star);
    out.delta_pred.push_back(std::pow(eps, c.rate) * out.inner[i].Lambda_star);
    out.xi_eps.push_back(cp.point.x + eps * out.inner[i].t_star * cp.point.nu);
  }
  out.J_model = evaluate_J(c, out.weights, out.config.Lambda_list, out.config.t_list, eps);
  out.margin = margin_band(c, eps);
  return out;
}

}  // namespace bubble_lab
