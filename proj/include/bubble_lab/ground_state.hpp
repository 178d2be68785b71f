#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "error.hpp"
#include "exponents.hpp"

namespace bubble_lab {

struct ShootingConfig {
  double R_max = 200;
  double ode_tolerance = 1e-10;
  double bisection_tolerance = 1e-12;
  int max_bisections = 200;
  // Tail-fit window; zero means [R_max/4, R_max].
  double fit_r_lo = 0, fit_r_hi = 0;
  double points_per_unit_log = 100;
  double r_start = 1e-4;
  // Allowed relative gap between the free log-log slope and the predicted decay rate.
  double slope_tolerance = 0.05;
  double fit_residual_tolerance = 1e-4;
  // Shots still undecided at log r = decision_horizon count as on target.
  double decision_horizon = 40;

  double window_lo() const { return fit_r_lo > 0 ? fit_r_lo : R_max / 4; }
  double window_hi() const { return fit_r_hi > 0 ? fit_r_hi : R_max; }

  void validate() const {
    if (!(R_max >= 50)) throw Error(ErrorKind::invalid_argument, "R_max must be at least 50");
    if (!(ode_tolerance > 0) || !(bisection_tolerance > 0))
      throw Error(ErrorKind::invalid_argument, "tolerances must be positive");
    if (window_lo() < R_max / 4 * (1 - 1e-12) || window_hi() > R_max * (1 + 1e-12) || window_lo() >= window_hi())
      throw Error(ErrorKind::invalid_argument, "tail window must lie inside [R_max/4, R_max]");
    if (!(r_start > 0 && r_start < 1e-2)) throw Error(ErrorKind::invalid_argument, "r_start out of range");
    if (!(points_per_unit_log >= 10)) throw Error(ErrorKind::invalid_argument, "grid too coarse");
  }
};

/// Asymptotics of the ground state beyond the fit window.
/// FAST/SLOW: U ~ a r^{-kU} (1 + cU r^{-tU} + dU r^{-2tU}), V ~ b r^{-kV} (1 + cV r^{-tV} + dV r^{-2tV}).
/// LOG: U ~ r^{2-n} (a log r + cU + dU r^{-tU}) with tU = tV.
struct TailFit {
  Regime regime = Regime::fast;
  double kappa_U = 0, theta_U = 0, kappa_V = 0, theta_V = 0;
  double a = 0, c_U = 0, d_U = 0;
  double b = 0, c_V = 0, d_V = 0;
  double slope_U = 0, slope_V = 0;
  double residual_U = 0, residual_V = 0;
  double r_lo = 0, r_hi = 0;

  double U(double r) const {
    if (regime == Regime::log) return std::pow(r, -kappa_U) * (a * std::log(r) + c_U + d_U * std::pow(r, -theta_U));
    double x = std::pow(r, -theta_U);
    return a * std::pow(r, -kappa_U) * (1 + c_U * x + d_U * x * x);
  }
  double V(double r) const {
    double x = std::pow(r, -theta_V);
    return b * std::pow(r, -kappa_V) * (1 + c_V * x + d_V * x * x);
  }
  double dU(double r) const {
    if (regime == Regime::log) {
      double rk = std::pow(r, -kappa_U - 1);
      double x = std::pow(r, -theta_U);
      return rk * (-kappa_U * (a * std::log(r) + c_U + d_U * x) + a - theta_U * d_U * x);
    }
    double x = std::pow(r, -theta_U);
    return -a * std::pow(r, -kappa_U - 1) *
           (kappa_U + (kappa_U + theta_U) * c_U * x + (kappa_U + 2 * theta_U) * d_U * x * x);
  }
  double dV(double r) const {
    double x = std::pow(r, -theta_V);
    return -b * std::pow(r, -kappa_V - 1) *
           (kappa_V + (kappa_V + theta_V) * c_V * x + (kappa_V + 2 * theta_V) * d_V * x * x);
  }
};

struct ProfilePoint {
  double U, V, dU, dV;
};

/// Radial ground state of the critical system, normalized by U(0) = 1.
/// Index 0 of the grid is the origin; the remaining nodes are uniform in log r.
struct RadialProfile {
  ExponentPair pair;
  ShootingConfig config;
  double v0 = 0;
  double bracket_width = 0;
  double log_step = 0;
  std::vector<double> r, U, V, dU, dV;
  TailFit tail;
  double ode_residual = 0;

  int n() const { return pair.n; }
  std::size_t size() const { return r.size(); }
  double s_first() const { return std::log(r[1]); }

  /// Values and radial derivatives at any r >= 0.
  ProfilePoint eval(double rr) const;
};

namespace detail {

inline double spow(double x, double p) { return x >= 0 ? std::pow(x, p) : -std::pow(-x, p); }

using OdeState = std::array<double, 4>;

// Critical system in s = log r: y = (U, dU/ds, V, dV/ds).
struct CriticalSystem {
  int n;
  double p, q;
  void operator()(const OdeState& y, OdeState& dy, double s) const {
    double r2 = std::exp(2 * s);
    dy[0] = y[1];
    dy[1] = -(n - 2) * y[1] - r2 * spow(y[2], p);
    dy[2] = y[3];
    dy[3] = -(n - 2) * y[3] - r2 * spow(y[0], q);
  }
};

struct SeriesStart {
  double u2, u4, v2, v4;
};

inline SeriesStart series_coefficients(int n, double p, double q, double v0) {
  SeriesStart c;
  c.u2 = -std::pow(v0, p) / (2.0 * n);
  c.v2 = -1.0 / (2.0 * n);
  c.u4 = -p * std::pow(v0, p - 1) * c.v2 / (4.0 * (n + 2));
  c.v4 = -q * c.u2 / (4.0 * (n + 2));
  return c;
}

inline OdeState series_state(int n, double p, double q, double v0, double r) {
  auto c = series_coefficients(n, p, q, v0);
  double r2 = r * r, r4 = r2 * r2;
  return {1 + c.u2 * r2 + c.u4 * r4, 2 * c.u2 * r2 + 4 * c.u4 * r4, v0 + c.v2 * r2 + c.v4 * r4,
          2 * c.v2 * r2 + 4 * c.v4 * r4};
}

namespace odeint = boost::numeric::odeint;

inline auto make_stepper(double rtol) {
  return odeint::make_controlled(1e-300, rtol, odeint::runge_kutta_dopri5<OdeState>());
}

// Advances y from s to s_end; on_step returns true to stop early.
template <class Stepper, class OnStep>
bool advance(Stepper& stepper, const CriticalSystem& sys, OdeState& y, double& s, double s_end, double& dt,
             OnStep on_step) {
  while (s < s_end) {
    bool last = s + dt >= s_end;
    double trial = last ? s_end - s : dt;
    double s_before = s;
    double used = trial;
    if (stepper.try_step(sys, y, s, used) == odeint::success) {
      if (last) s = s_end;
      if (!last || used > trial) dt = used;
      for (double v : y)
        if (!std::isfinite(v)) throw Error(ErrorKind::non_convergence, "integration produced a non-finite value");
      if (on_step(y)) return true;
    } else {
      dt = used;
      if (dt < 1e-12 * std::max(1.0, std::abs(s_before)))
        throw Error(ErrorKind::non_convergence, "step size underflow");
    }
  }
  return false;
}

// +1: v0 too large (U changes sign first), -1: v0 too small, 0: undecided up to the horizon.
inline int classify_shot(const ExponentPair& e, const ShootingConfig& cfg, double v0, double* s_decided = nullptr) {
  CriticalSystem sys{e.n, e.p0, e.q0};
  double s = std::log(cfg.r_start);
  OdeState y = series_state(e.n, e.p0, e.q0, v0, cfg.r_start);
  auto stepper = make_stepper(cfg.ode_tolerance);
  double dt = 1e-3;
  int verdict = 0;
  const double k = e.n - 2;
  advance(stepper, sys, y, s, cfg.decision_horizon, dt, [&](const OdeState& z) {
    double wu = z[0] + z[1] / k, wv = z[2] + z[3] / k;
    bool ufail = wu < 0 || z[0] <= 0;
    bool vfail = wv < 0 || z[2] <= 0;
    if (ufail && vfail) {
      verdict = (wu / std::abs(z[0]) < wv / std::abs(z[2])) ? 1 : -1;
    } else if (ufail) {
      verdict = 1;
    } else if (vfail) {
      verdict = -1;
    }
    return verdict != 0;
  });
  if (s_decided) *s_decided = s;
  return verdict;
}

inline Eigen::VectorXd least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
  Eigen::VectorXd scale = A.cwiseAbs().colwise().maxCoeff().transpose();
  for (Eigen::Index j = 0; j < scale.size(); ++j)
    if (scale[j] == 0) scale[j] = 1;
  Eigen::MatrixXd As = A * scale.cwiseInverse().asDiagonal();
  Eigen::VectorXd x = As.colPivHouseholderQr().solve(y);
  return x.cwiseQuotient(scale);
}

}  // namespace detail

/// Fits the asymptotic constants of a profile on its tail window.
inline TailFit extract_tail_constants(const RadialProfile& prof) {
  const ExponentPair& e = prof.pair;
  const int n = e.n;
  TailFit t;
  t.regime = e.regime;
  t.r_lo = prof.config.window_lo();
  t.r_hi = prof.config.window_hi();
  t.kappa_U = decay_exponent_U(n, e.p0, e.regime);
  t.kappa_V = n - 2;
  t.theta_V = t.kappa_U * e.q0 - n;
  t.theta_U = e.regime == Regime::log ? t.theta_V : std::abs((n - 2) * e.p0 - n);

  std::vector<std::size_t> idx;
  for (std::size_t i = 1; i < prof.size(); ++i)
    if (prof.r[i] >= t.r_lo * (1 - 1e-12) && prof.r[i] <= t.r_hi * (1 + 1e-12)) idx.push_back(i);
  if (idx.size() < 8) throw Error(ErrorKind::fit_residual_too_large, "too few samples in the tail window");
  const Eigen::Index m = static_cast<Eigen::Index>(idx.size());

  auto fit_power = [&](const std::vector<double>& y, double kappa, double theta, double& amp, double& c, double& d,
                       double& slope, double& resid) {
    // Constant fit with the decay rate fixed.
    Eigen::MatrixXd A(m, 3);
    Eigen::VectorXd rhs(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      double r = prof.r[idx[k]];
      double x = std::pow(r, -theta);
      A(k, 0) = 1;
      A(k, 1) = x;
      A(k, 2) = x * x;
      rhs[k] = y[idx[k]] * std::pow(r, kappa);
    }
    Eigen::VectorXd sol = detail::least_squares(A, rhs);
    amp = sol[0];
    c = sol[1] / amp;
    d = sol[2] / amp;
    double ss = 0;
    for (Eigen::Index k = 0; k < m; ++k) {
      double rel = (A.row(k).dot(sol) - rhs[k]) / rhs[k];
      ss += rel * rel;
    }
    resid = std::sqrt(ss / m);
    // Free log-log slope with the same correction terms.
    Eigen::MatrixXd B(m, 4);
    Eigen::VectorXd ly(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      double r = prof.r[idx[k]];
      double x = std::pow(r, -theta);
      B(k, 0) = 1;
      B(k, 1) = std::log(r);
      B(k, 2) = x;
      B(k, 3) = x * x;
      ly[k] = std::log(y[idx[k]]);
    }
    slope = detail::least_squares(B, ly)[1];
  };

  if (e.regime == Regime::log) {
    Eigen::MatrixXd A(m, 3);
    Eigen::VectorXd rhs(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      double r = prof.r[idx[k]];
      A(k, 0) = std::log(r);
      A(k, 1) = 1;
      A(k, 2) = std::pow(r, -t.theta_U);
      rhs[k] = prof.U[idx[k]] * std::pow(r, t.kappa_U);
    }
    Eigen::VectorXd sol = detail::least_squares(A, rhs);
    t.a = sol[0];
    t.c_U = sol[1];
    t.d_U = sol[2];
    double ss = 0;
    for (Eigen::Index k = 0; k < m; ++k) {
      double rel = (A.row(k).dot(sol) - rhs[k]) / rhs[k];
      ss += rel * rel;
    }
    t.residual_U = std::sqrt(ss / m);
    Eigen::MatrixXd B(m, 3);
    Eigen::VectorXd ly(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      double r = prof.r[idx[k]];
      B(k, 0) = 1;
      B(k, 1) = std::log(r);
      B(k, 2) = std::pow(r, -t.theta_U);
      ly[k] = std::log(prof.U[idx[k]] / (std::log(r) + t.c_U / t.a));
    }
    t.slope_U = detail::least_squares(B, ly)[1];
  } else {
    fit_power(prof.U, t.kappa_U, t.theta_U, t.a, t.c_U, t.d_U, t.slope_U, t.residual_U);
  }
  fit_power(prof.V, t.kappa_V, t.theta_V, t.b, t.c_V, t.d_V, t.slope_V, t.residual_V);

  const double tol = prof.config.slope_tolerance;
  if (!(t.a > 0 && t.b > 0)) throw Error(ErrorKind::fit_residual_too_large, "non-positive tail amplitude");
  if (std::abs(-t.slope_U - t.kappa_U) > tol * t.kappa_U || std::abs(-t.slope_V - t.kappa_V) > tol * t.kappa_V)
    throw Error(ErrorKind::fit_residual_too_large, "window is not in the asymptotic range (slope mismatch)");
  if (t.residual_U > prof.config.fit_residual_tolerance || t.residual_V > prof.config.fit_residual_tolerance)
    throw Error(ErrorKind::fit_residual_too_large, "tail model residual exceeds tolerance");
  return t;
}

namespace detail {

// Sup-norm residual of the first-order system, from the Boole-rule identity
// y_{j+4} - y_j = int f ds on blocks of four log-steps.
inline double integral_identity_residual(const RadialProfile& prof) {
  const ExponentPair& e = prof.pair;
  CriticalSystem sys{e.n, e.p0, e.q0};
  const double h = prof.log_step;
  std::vector<OdeState> y(prof.size()), f(prof.size());
  for (std::size_t i = 1; i < prof.size(); ++i) {
    double r = prof.r[i];
    y[i] = {prof.U[i], r * prof.dU[i], prof.V[i], r * prof.dV[i]};
    sys(y[i], f[i], std::log(r));
  }
  double worst = 0;
  for (std::size_t j = 1; j + 4 < prof.size(); j += 4) {
    for (int c = 0; c < 4; ++c) {
      double integral =
          2 * h / 45 * (7 * f[j][c] + 32 * f[j + 1][c] + 12 * f[j + 2][c] + 32 * f[j + 3][c] + 7 * f[j + 4][c]);
      double scale = 0;
      for (int k = 0; k <= 4; ++k) scale = std::max(scale, std::abs(y[j + k][c]));
      if (scale == 0) continue;
      worst = std::max(worst, std::abs(y[j + 4][c] - y[j][c] - integral) / scale);
    }
  }
  return worst;
}

}  // namespace detail

/// Shooting on V(0) with bisection, then a fixed-grid integration out to R_max.
inline RadialProfile solve_ground_state(const ExponentPair& pair, const ShootingConfig& cfg = {}) {
  cfg.validate();
  if (pair.p0 <= 0 || pair.q0 <= 0) throw Error(ErrorKind::invalid_argument, "exponents must be positive");

  auto classify = [&](double v) { return detail::classify_shot(pair, cfg, v); };
  double lo = 1, hi = 1;
  int c1 = classify(1.0);
  bool collapsed = c1 == 0;
  if (!collapsed) {
    double probe = 1;
    int expansions = 0;
    for (;;) {
      if (++expansions > 60) throw Error(ErrorKind::bracket_not_found, "no sign change of the shooting defect");
      probe = c1 > 0 ? probe / 2 : probe * 2;
      int c = classify(probe);
      if (c == 0) {
        lo = hi = probe;
        collapsed = true;
        break;
      }
      if (c != c1) {
        lo = c1 > 0 ? probe : probe / 2;
        hi = c1 > 0 ? probe * 2 : probe;
        break;
      }
    }
  }
  int iterations = 0;
  while (!collapsed && hi - lo > cfg.bisection_tolerance) {
    if (++iterations > cfg.max_bisections)
      throw Error(ErrorKind::non_convergence, "bisection budget exhausted");
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    int c = classify(mid);
    if (c == 0) {
      lo = hi = mid;
      break;
    }
    (c > 0 ? hi : lo) = mid;
  }

  RadialProfile prof;
  prof.pair = pair;
  prof.config = cfg;
  prof.v0 = 0.5 * (lo + hi);
  prof.bracket_width = hi - lo;

  const double s0 = std::log(cfg.r_start), s1 = std::log(cfg.R_max);
  const std::size_t M = static_cast<std::size_t>(std::ceil((s1 - s0) * cfg.points_per_unit_log));
  const double h = (s1 - s0) / M;
  prof.log_step = h;
  prof.r.reserve(M + 2);
  auto push = [&](double r, const detail::OdeState& y) {
    prof.r.push_back(r);
    prof.U.push_back(y[0]);
    prof.V.push_back(y[2]);
    prof.dU.push_back(r > 0 ? y[1] / r : 0.0);
    prof.dV.push_back(r > 0 ? y[3] / r : 0.0);
  };
  push(0.0, {1.0, 0.0, prof.v0, 0.0});
  detail::CriticalSystem sys{pair.n, pair.p0, pair.q0};
  detail::OdeState y = detail::series_state(pair.n, pair.p0, pair.q0, prof.v0, cfg.r_start);
  push(cfg.r_start, y);
  auto stepper = detail::make_stepper(cfg.ode_tolerance);
  double s = s0, dt = 1e-3;
  for (std::size_t j = 1; j <= M; ++j) {
    double target = j == M ? s1 : s0 + j * h;
    detail::advance(stepper, sys, y, s, target, dt, [](const detail::OdeState&) { return false; });
    // W = U + rU'/(n-2) may dip below zero near R_max when it only carries a
    // subleading correction; sign changes of U or V themselves are fatal.
    if (y[0] <= 0 || y[2] <= 0 || y[1] > 0 || y[3] > 0)
      throw Error(ErrorKind::non_convergence, "shooting resolution insufficient for R_max");
    push(std::exp(target), y);
  }
  prof.r.back() = cfg.R_max;
  prof.ode_residual = detail::integral_identity_residual(prof);
  prof.tail = extract_tail_constants(prof);
  return prof;
}

inline ProfilePoint RadialProfile::eval(double rr) const {
  if (rr < 0) throw Error(ErrorKind::invalid_argument, "negative radius");
  if (rr > r.back()) return {tail.U(rr), tail.V(rr), tail.dU(rr), tail.dV(rr)};
  if (rr < r[1]) {
    auto c = detail::series_coefficients(pair.n, pair.p0, pair.q0, v0);
    double r2 = rr * rr;
    return {1 + c.u2 * r2 + c.u4 * r2 * r2, v0 + c.v2 * r2 + c.v4 * r2 * r2, 2 * c.u2 * rr + 4 * c.u4 * r2 * rr,
            2 * c.v2 * rr + 4 * c.v4 * r2 * rr};
  }
  double s = std::log(rr);
  double x = (s - s_first()) / log_step;
  std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(std::max(0.0, std::floor(x))), size() - 3) + 1;
  double t = std::clamp((s - std::log(r[j])) / log_step, 0.0, 1.0);
  // Cubic Hermite in s, slopes d/ds = r d/dr, limited to keep monotone data monotone.
  auto hermite = [&](const std::vector<double>& f, const std::vector<double>& df, double& val, double& der) {
    double f0 = f[j], f1 = f[j + 1];
    double m0 = r[j] * df[j] * log_step, m1 = r[j + 1] * df[j + 1] * log_step;
    double delta = f1 - f0;
    if (delta == 0) {
      m0 = m1 = 0;
    } else {
      double al = m0 / delta, be = m1 / delta;
      if (al < 0) m0 = 0, al = 0;
      if (be < 0) m1 = 0, be = 0;
      double norm = al * al + be * be;
      if (norm > 9) {
        double tau = 3 / std::sqrt(norm);
        m0 = tau * al * delta;
        m1 = tau * be * delta;
      }
    }
    double t2 = t * t, t3 = t2 * t;
    val = (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * f1 + (t3 - t2) * m1;
    double dds = ((6 * t2 - 6 * t) * f0 + (3 * t2 - 4 * t + 1) * m0 + (-6 * t2 + 6 * t) * f1 + (3 * t2 - 2 * t) * m1) /
                 log_step;
    der = dds / rr;
  };
  ProfilePoint out;
  hermite(U, dU, out.U, out.dU);
  hermite(V, dV, out.V, out.dV);
  return out;
}

/// Scaled bubble lambda^{n/(q0+1)} U(lambda |y - xi|), lambda^{n/(p0+1)} V(lambda |y - xi|).
template <class Vec>
std::pair<double, double> rescale_evaluate(const RadialProfile& prof, const Vec& xi, double lambda, const Vec& y) {
  if (!(lambda > 0)) throw Error(ErrorKind::invalid_argument, "scale must be positive");
  double d2 = 0;
  for (std::size_t i = 0; i < std::size(y); ++i) d2 += (y[i] - xi[i]) * (y[i] - xi[i]);
  auto pt = prof.eval(lambda * std::sqrt(d2));
  const int n = prof.n();
  return {std::pow(lambda, n / (prof.pair.q0 + 1)) * pt.U, std::pow(lambda, n / (prof.pair.p0 + 1)) * pt.V};
}

}  // namespace bubble_lab
