#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "ground_state.hpp"
#include "quadrature.hpp"

namespace bubble_lab {

enum class ConstantId { A1, A2, A3, B1, B2, B3 };

inline const char* to_string(ConstantId id) {
  static const char* names[] = {"A1", "A2", "A3", "B1", "B2", "B3"};
  return names[static_cast<int>(id)];
}

/// Integrals over R^n of the ground state:
/// A1 = U^{q0+1}, A2 = U^{q0}, A3 = U^{q0+1} log U, and B* the same with V, p0.
struct EnergyConstants {
  double A1 = 0, A2 = 0, A3 = 0, B1 = 0, B2 = 0, B3 = 0;
  bool B2_defined = false;
  double grad_UV = 0;     // integral of grad U . grad V
  double quad_error = 0;  // largest relative error estimate among the defined constants
};

namespace detail {

struct TailData {
  double amp, kappa, theta, c, d;
};

inline TailData tail_of(const TailFit& t, bool u_side) {
  return u_side ? TailData{t.a, t.kappa_U, t.theta_U, t.c_U, t.d_U} : TailData{t.b, t.kappa_V, t.theta_V, t.c_V, t.d_V};
}

// Tail expansion of r^{n-1} f^m (or r^{n-1} f^m log f) for f ~ amp r^{-kappa}(1 + c x + d x^2), x = r^{-theta}.
inline std::vector<PowerLogTerm> power_tail_terms(const TailData& f, int n, double m, bool with_log) {
  double e1 = m * f.c;
  double e2 = m * f.d + 0.5 * m * (m - 1) * f.c * f.c;
  double am = std::pow(f.amp, m), la = std::log(f.amp);
  double base = f.kappa * m - n;
  if (!with_log)
    return {{am, 0, base}, {am * e1, 0, base + f.theta}, {am * e2, 0, base + 2 * f.theta}};
  double l1 = f.c, l2 = f.d - 0.5 * f.c * f.c;
  return {{am * la, -am * f.kappa, base},
          {am * (e1 * la + l1), -am * f.kappa * e1, base + f.theta},
          {am * (e2 * la + e1 * l1 + l2), -am * f.kappa * e2, base + 2 * f.theta}};
}

// Tail expansion of r^{n-1} U'(r) V'(r).
inline std::vector<PowerLogTerm> gradient_tail_terms(const TailData& u, const TailData& v, int n) {
  double cu[3] = {u.kappa, (u.kappa + u.theta) * u.c, (u.kappa + 2 * u.theta) * u.d};
  double cv[3] = {v.kappa, (v.kappa + v.theta) * v.c, (v.kappa + 2 * v.theta) * v.d};
  std::vector<PowerLogTerm> out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      out.push_back({u.amp * v.amp * cu[i] * cv[j], 0, u.kappa + v.kappa + 2 + i * u.theta + j * v.theta - n});
  return out;
}

// Numerical tail integral over [R, inf) via r = R e^t.
inline double numeric_tail(const std::function<double(double)>& g, double R) {
  boost::math::quadrature::exp_sinh<double> integrator;
  auto h = [&](double t) {
    double r = R * std::exp(t);
    double v = g(r) * r;
    return std::isfinite(v) ? v : 0.0;
  };
  return integrator.integrate(h, 0.0, std::numeric_limits<double>::infinity());
}

}  // namespace detail

/// True iff the integrand of the given constant decays faster than r^{-n}.
inline bool integrability_precheck(const ExponentPair& e, ConstantId which) {
  const int n = e.n;
  double kU = decay_exponent_U(n, e.p0, e.regime), kV = n - 2;
  switch (which) {
    case ConstantId::A1:
    case ConstantId::A3: return kU * (e.q0 + 1) > n;
    case ConstantId::A2: return kU * e.q0 > n;
    case ConstantId::B1:
    case ConstantId::B3: return kV * (e.p0 + 1) > n;
    case ConstantId::B2: return kV * e.p0 > n;
  }
  return false;
}

/// Radial integral |S^{n-1}| int_0^inf F(r) r^{n-1} dr where F is sampled on the
/// profile grid up to the start of the tail window and continued by `tail`
/// (closed form) beyond it. `tail_numeric` is an independent evaluation of the
/// same tail, used only for the error estimate.
inline QuadResult radial_integral(const RadialProfile& prof, const std::function<double(std::size_t)>& sample,
                                  const std::vector<PowerLogTerm>& tail,
                                  const std::function<double(double)>& tail_numeric, double tail_rel_uncertainty) {
  const int n = prof.n();
  std::size_t jlo = 1;
  while (jlo + 1 < prof.size() && prof.r[jlo] < prof.tail.r_lo * (1 - 1e-12)) ++jlo;
  std::vector<double> f(prof.size(), 0.0);
  for (std::size_t i = 1; i <= jlo; ++i) f[i] = sample(i) * std::pow(prof.r[i], n);
  QuadResult grid = simpson_uniform(f, 1, jlo, prof.log_step);
  double r0 = prof.r[1];
  double core = sample(0) * std::pow(r0, n) / n;
  double R = prof.r[jlo];
  double closed = prof.tail.regime == Regime::log ? detail::numeric_tail(tail_numeric, R) : tail_integral(tail, R);
  double numeric = detail::numeric_tail(tail_numeric, R);
  QuadResult out;
  double area = sphere_area(n);
  out.value = area * (core + grid.value + closed);
  out.error = area * (grid.error + std::abs(closed - numeric) + tail_rel_uncertainty * std::abs(closed) +
                      1e-14 * std::abs(grid.value));
  return out;
}

inline EnergyConstants compute_constants(const RadialProfile& prof) {
  const ExponentPair& e = prof.pair;
  const int n = e.n;
  const double p0 = e.p0, q0 = e.q0;
  const TailFit& tf = prof.tail;
  const auto tu = detail::tail_of(tf, true), tv = detail::tail_of(tf, false);
  const double unc_u = tf.residual_U, unc_v = tf.residual_V;

  for (ConstantId id : {ConstantId::A1, ConstantId::A2, ConstantId::A3, ConstantId::B1, ConstantId::B3})
    if (!integrability_precheck(e, id))
      throw Error(ErrorKind::divergent_integral, std::string(to_string(id)) + " is not integrable for this pair");

  // log of the tail model, written to avoid underflow of U itself.
  auto log_u_tail = [&](double r) {
    if (tf.regime == Regime::log)
      return (2.0 - n) * std::log(r) + std::log(tf.a * std::log(r) + tf.c_U + tf.d_U * std::pow(r, -tf.theta_U));
    double x = std::pow(r, -tu.theta);
    return std::log(tu.amp) - tu.kappa * std::log(r) + std::log1p(tu.c * x + tu.d * x * x);
  };
  auto log_v_tail = [&](double r) {
    double x = std::pow(r, -tv.theta);
    return std::log(tv.amp) - tv.kappa * std::log(r) + std::log1p(tv.c * x + tv.d * x * x);
  };
  auto pw = [&](std::function<double(double)> lg, double m, bool with_log) {
    return [lg, m, n, with_log](double r) {
      double L = lg(r);
      double v = std::exp(m * L + (n - 1) * std::log(r));
      return with_log ? v * L : v;
    };
  };

  EnergyConstants c;
  double worst = 0;
  auto take = [&](QuadResult q, double& dst) {
    dst = q.value;
    worst = std::max(worst, q.error / std::abs(q.value));
  };
  auto U = [&](std::size_t i) { return prof.U[i]; };
  auto V = [&](std::size_t i) { return prof.V[i]; };
  take(radial_integral(prof, [&](std::size_t i) { return std::pow(U(i), q0 + 1); },
                       detail::power_tail_terms(tu, n, q0 + 1, false), pw(log_u_tail, q0 + 1, false), unc_u),
       c.A1);
  take(radial_integral(prof, [&](std::size_t i) { return std::pow(U(i), q0); },
                       detail::power_tail_terms(tu, n, q0, false), pw(log_u_tail, q0, false), unc_u),
       c.A2);
  take(radial_integral(prof, [&](std::size_t i) { return std::pow(U(i), q0 + 1) * std::log(U(i)); },
                       detail::power_tail_terms(tu, n, q0 + 1, true), pw(log_u_tail, q0 + 1, true), unc_u),
       c.A3);
  take(radial_integral(prof, [&](std::size_t i) { return std::pow(V(i), p0 + 1); },
                       detail::power_tail_terms(tv, n, p0 + 1, false), pw(log_v_tail, p0 + 1, false), unc_v),
       c.B1);
  take(radial_integral(prof, [&](std::size_t i) { return std::pow(V(i), p0 + 1) * std::log(V(i)); },
                       detail::power_tail_terms(tv, n, p0 + 1, true), pw(log_v_tail, p0 + 1, true), unc_v),
       c.B3);
  c.B2_defined = integrability_precheck(e, ConstantId::B2);
  if (c.B2_defined)
    take(radial_integral(prof, [&](std::size_t i) { return std::pow(V(i), p0); },
                         detail::power_tail_terms(tv, n, p0, false), pw(log_v_tail, p0, false), unc_v),
         c.B2);
  if (tf.regime != Regime::log) {
    auto grad_tail = [&](double r) { return tf.dU(r) * tf.dV(r) * std::pow(r, n - 1); };
    take(radial_integral(prof, [&](std::size_t i) { return prof.dU[i] * prof.dV[i]; },
                         detail::gradient_tail_terms(tu, tv, n), grad_tail, unc_u + unc_v),
         c.grad_UV);
  }
  c.quad_error = worst;
  return c;
}

/// Constant by name; B2 throws divergent-integral when undefined.
inline double constant_value(const EnergyConstants& c, ConstantId id) {
  switch (id) {
    case ConstantId::A1: return c.A1;
    case ConstantId::A2: return c.A2;
    case ConstantId::A3: return c.A3;
    case ConstantId::B1: return c.B1;
    case ConstantId::B2:
      if (!c.B2_defined) throw Error(ErrorKind::divergent_integral, "B2 is not integrable for this pair");
      return c.B2;
    case ConstantId::B3: return c.B3;
  }
  return 0;
}

}  // namespace bubble_lab

namespace bubble_lab {

/// int_{r_a}^{r_b} f(r)^m r^{n-1} dr with f = U (u_side) or V; r_b may be +inf.
/// Grid nodes are used where available, Gauss-Legendre on the interpolant for the
/// partial cells at the ends, and the fitted tail beyond the start of the tail window.
inline double profile_moment(const RadialProfile& prof, bool u_side, double m, double r_a, double r_b) {
  if (!(r_a >= 0) || !(r_b > r_a)) throw Error(ErrorKind::invalid_argument, "bad integration range");
  const int n = prof.n();
  const double R_tail = prof.tail.r_lo;
  auto value = [&](double r) {
    auto pt = prof.eval(r);
    return std::pow(u_side ? pt.U : pt.V, m) * std::pow(r, n - 1);
  };
  // 5-point Gauss-Legendre in s = log r (or in r when starting at the origin).
  static constexpr double gx[] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                                  0.9061798459386640};
  static constexpr double gw[] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                                  0.2369268850561891};
  auto gl = [&](double a, double b) {
    if (b <= a) return 0.0;
    double sum = 0;
    if (a == 0) {
      for (int i = 0; i < 5; ++i) sum += gw[i] * value(0.5 * (a + b) + 0.5 * (b - a) * gx[i]);
      return 0.5 * (b - a) * sum;
    }
    double sa = std::log(a), sb = std::log(b);
    for (int i = 0; i < 5; ++i) {
      double r = std::exp(0.5 * (sa + sb) + 0.5 * (sb - sa) * gx[i]);
      sum += gw[i] * value(r) * r;
    }
    return 0.5 * (sb - sa) * sum;
  };
  double total = 0;
  double inner_end = std::min(r_b, R_tail);
  if (r_a < inner_end) {
    std::size_t j0 = 1;
    while (j0 < prof.size() && prof.r[j0] < r_a) ++j0;
    std::size_t j1 = j0;
    while (j1 + 1 < prof.size() && prof.r[j1 + 1] <= inner_end) ++j1;
    if (j0 < prof.size() && prof.r[j0] <= inner_end && j1 > j0) {
      std::vector<double> f(prof.size(), 0.0);
      for (std::size_t i = j0; i <= j1; ++i)
        f[i] = std::pow(u_side ? prof.U[i] : prof.V[i], m) * std::pow(prof.r[i], n);
      total += simpson_uniform(f, j0, j1, prof.log_step).value;
      total += gl(r_a, prof.r[j0]) + gl(prof.r[j1], inner_end);
    } else {
      // Range shorter than a grid cell: split it geometrically.
      double a = r_a;
      for (int k = 0; k < 4; ++k) {
        double b = a == 0 ? inner_end * (k + 1) / 4 : a * std::pow(inner_end / a, 1.0 / (4 - k));
        total += gl(a, b);
        a = b;
      }
    }
  }
  if (r_b > R_tail) {
    double lo = std::max(r_a, R_tail);
    auto terms = detail::power_tail_terms(detail::tail_of(prof.tail, u_side), n, m, false);
    if (prof.tail.regime == Regime::log && u_side) {
      auto g = [&](double r) { return std::pow(prof.tail.U(r), m) * std::pow(r, n - 1); };
      double hi = std::isfinite(r_b) ? detail::numeric_tail(g, r_b) : 0.0;
      total += detail::numeric_tail(g, lo) - hi;
    } else {
      total += tail_integral(terms, lo) - (std::isfinite(r_b) ? tail_integral(terms, r_b) : 0.0);
    }
  }
  return total;
}

}  // namespace bubble_lab
