#pragma once

// Acceptance checks shared by the acceptance test binary and `bubble_lab report`.

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "domain_green.hpp"
#include "energy_constants.hpp"
#include "ground_state.hpp"
#include "linearization.hpp"
#include "projection.hpp"
#include "reduced_energy.hpp"

namespace bubble_lab::acceptance {

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct PairCase {
  int n;
  Rational p0;
};

inline std::string label(const PairCase& s) {
  return "(" + std::to_string(s.n) + "," + s.p0.to_string() + ")";
}

inline const std::vector<PairCase>& talenti_pairs() {
  static const std::vector<PairCase> v{{3, {5, 1}}, {4, {3, 1}}, {5, {7, 3}}};
  return v;
}

// FAST and SLOW pairs used throughout: the Talenti pairs plus the two asymmetric ones.
inline const std::vector<PairCase>& acceptance_pairs() {
  static const std::vector<PairCase> v{{3, {5, 1}}, {4, {3, 1}}, {5, {7, 3}}, {4, {5, 2}}, {5, {7, 5}}};
  return v;
}

/// Ground states are cached per pair; solving is deterministic.
inline const RadialProfile& profile(const PairCase& s) {
  static std::map<std::pair<int, std::pair<long long, long long>>, RadialProfile> cache;
  auto key = std::make_pair(s.n, std::make_pair(static_cast<long long>(s.p0.num), static_cast<long long>(s.p0.den)));
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, solve_ground_state(ExponentPair::make(s.n, s.p0))).first;
  return it->second;
}

inline double talenti(int n, double r) { return std::pow(1 + r * r / (n * (n - 2.0)), -(n - 2) / 2.0); }

namespace oracle {

/// Minimizer of f over [x0, x1] x [y0, y1] by a log-spaced 400 x 400 scan followed by
/// repeated 400 x 400 scans of a shrinking window around the best node. Uses only
/// function values.
inline std::pair<double, double> log_grid_minimize(const std::function<double(double, double)>& f, double x0,
                                                   double x1, double y0, double y1, double rel_cell = 1e-9) {
  const int N = 400;
  double lx0 = std::log(x0), lx1 = std::log(x1), ly0 = std::log(y0), ly1 = std::log(y1);
  double bx = 0, by = 0;
  for (int round = 0; round < 40; ++round) {
    double best = std::numeric_limits<double>::infinity();
    const double hx = (lx1 - lx0) / (N - 1), hy = (ly1 - ly0) / (N - 1);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        double x = lx0 + i * hx, y = ly0 + j * hy;
        double v = f(std::exp(x), std::exp(y));
        if (v < best) {
          best = v;
          bx = x;
          by = y;
        }
      }
    if (hx < rel_cell && hy < rel_cell) break;
    lx0 = bx - 4 * hx;
    lx1 = bx + 4 * hx;
    ly0 = by - 4 * hy;
    ly1 = by + 4 * hy;
  }
  return {std::exp(bx), std::exp(by)};
}

}  // namespace oracle

namespace detail {

template <class F>
CheckResult timed(int id, std::string name, F&& body) {
  CheckResult r;
  r.id = id;
  r.name = std::move(name);
  auto t0 = std::chrono::steady_clock::now();
  try {
    std::ostringstream os;
    os.precision(4);
    r.pass = body(os);
    r.detail = os.str();
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline std::vector<Point> random_ball_points(int n, double R, std::size_t count, std::mt19937_64& rng,
                                             double max_radius_fraction = 0.95) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Point> pts;
  for (std::size_t k = 0; k < count; ++k) {
    Point w(n);
    for (int i = 0; i < n; ++i) w[i] = g(rng);
    pts.push_back(w.normalized() * R * max_radius_fraction * std::pow(u(rng), 1.0 / n));
  }
  return pts;
}

// Reduced-energy coefficients with the SLOW placement integral frozen at Lambda = t = 1.
inline ReducedCoefficients coefficients_for(const PairCase& s, double eps, double alpha = 1, double beta = 1) {
  const RadialProfile& prof = profile(s);
  ExponentPair e = ExponentPair::make(s.n, s.p0, alpha, beta, 0);
  EnergyConstants k = compute_constants(prof);
  std::optional<double> I;
  if (e.regime == Regime::slow) I = slow_placement_integral(prof, placement_ratio(e, eps, 1, 1));
  return assemble_coefficients(k, e, prof.tail.b, I);
}

}  // namespace detail

inline CheckResult check_talenti() {
  return detail::timed(1, "Talenti oracle", [](std::ostream& os) {
    bool ok = true;
    for (const auto& s : talenti_pairs()) {
      auto t0 = std::chrono::steady_clock::now();
      RadialProfile prof = solve_ground_state(ExponentPair::make(s.n, s.p0));
      double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      double err = 0;
      for (int i = 0; i <= 2000; ++i) {
        double r = 10.0 * i / 2000;
        double exact = talenti(s.n, r);
        auto pt = prof.eval(r);
        err = std::max({err, std::abs(pt.U - exact) / exact, std::abs(pt.V - exact) / exact});
      }
      ok = ok && err <= 1e-4 && secs <= 10;
      os << label(s) << " err=" << err << " t=" << secs << "s; ";
    }
    return ok;
  });
}

inline CheckResult check_constants() {
  return detail::timed(2, "A1 oracle and A1 = B1", [](std::ostream& os) {
    const double oracle = 32 * std::numbers::pi * std::numbers::pi / 3;
    EnergyConstants k = compute_constants(profile({4, {3, 1}}));
    double e0 = std::abs(k.A1 - oracle) / k.A1;
    bool ok = e0 <= 1e-3;
    os << "(4,3) A1 rel.err=" << e0 << "; ";
    for (PairCase s : {PairCase{4, {5, 2}}, PairCase{5, {7, 5}}}) {
      EnergyConstants c = compute_constants(profile(s));
      double gap = std::abs(c.A1 - c.B1) / c.A1;
      ok = ok && gap <= 0.01;
      os << label(s) << " |A1-B1|/A1=" << gap << "; ";
    }
    return ok;
  });
}

inline CheckResult check_slow_identity() {
  return detail::timed(3, "SLOW tail identity", [](std::ostream& os) {
    const RadialProfile& prof = profile({5, {7, 5}});
    const int n = 5;
    const double p0 = prof.pair.p0;
    double lhs = std::pow(prof.tail.b, p0);
    double rhs = prof.tail.a * ((n - 2) * p0 - 2) * (n - (n - 2) * p0);
    double rel = std::abs(lhs - rhs) / lhs;
    os << "b^p0=" << lhs << " a(..)(..)=" << rhs << " rel=" << rel;
    return rel <= 0.02;
  });
}

inline CheckResult check_decay_slopes() {
  return detail::timed(4, "decay slopes", [](std::ostream& os) {
    bool ok = true;
    for (const auto& s : acceptance_pairs()) {
      const RadialProfile& prof = profile(s);
      double expect = decay_exponent_U(s.n, prof.pair.p0, prof.pair.regime);
      double rel = std::abs(-prof.tail.slope_U / expect - 1);
      ok = ok && rel <= 0.01;
      os << label(s) << " " << -prof.tail.slope_U << " vs " << expect << "; ";
    }
    return ok;
  });
}

inline CheckResult check_nondegeneracy() {
  return detail::timed(5, "kernel residuals and mode dimensions", [](std::ostream& os) {
    bool ok = true;
    for (const auto& s : acceptance_pairs()) {
      const RadialProfile& prof = profile(s);
      double worst = 0;
      for (const auto& kp : kernel_basis(prof)) worst = std::max(worst, linearized_residual(prof, kp));
      int d0 = mode_kernel_dimension(prof, 0).dimension;
      int d1 = mode_kernel_dimension(prof, 1).dimension;
      int d2 = mode_kernel_dimension(prof, 2).dimension;
      ok = ok && worst <= 1e-6 && d0 == 1 && d1 == 1 && d2 == 0;
      os << label(s) << " res=" << worst << " dims=(" << d0 << "," << d1 << "," << d2 << "); ";
    }
    return ok;
  });
}

inline CheckResult check_green() {
  return detail::timed(6, "Green function on the ball", [](std::ostream& os) {
    bool ok = true;
    std::mt19937_64 rng(20240607);
    for (int n : {3, 4, 5}) {
      auto D = DomainModel::ball(Point::Zero(n), 1.0);
      auto xs = detail::random_ball_points(n, 1.0, 100, rng);
      auto ys = detail::random_ball_points(n, 1.0, 100, rng);
      double sym = 0, bnd = 0, harm = 0;
      for (std::size_t i = 0; i < 100; ++i) {
        double g1 = green_ball(D, xs[i], ys[i]), g2 = green_ball(D, ys[i], xs[i]);
        sym = std::max(sym, std::abs(g1 - g2) / std::abs(g1));
        Point z = xs[i].normalized();  // boundary point
        double gamma = fundamental_solution(n, z, ys[i]);
        bnd = std::max(bnd, std::abs(gamma - regular_part_ball(D, z, ys[i])) / gamma);
        if (i < 20) harm = std::max(harm, harmonicity_residual(D, xs[i] * 0.9, ys[i], 1e-3));
      }
      std::vector<Point> bps;
      for (int k = 0; k < 8; ++k) {
        Point p = Point::Zero(n);
        p[0] = std::cos(0.7 * k);
        p[1] = std::sin(0.7 * k);
        bps.push_back(p);
      }
      auto ysin = detail::random_ball_points(n, 1.0, 50, rng, 0.7);
      auto rep = regular_part_boundary_check(D, bps, ysin, 0.1, 4);
      ok = ok && sym <= 1e-10 && bnd <= 1e-10 && harm <= 1e-6 && rep.bounded;
      os << "n=" << n << " sym=" << sym << " bnd=" << bnd << " harm=" << harm << " H-ratio=[";
      for (const auto& l : rep.levels) os << l.max_ratio << " ";
      os << "]; ";
    }
    return ok;
  });
}

// Targets around xi_eps along the normal and tangentially, in units of eta, plus far points.
inline std::vector<Point> projection_targets(const DomainModel& D, const BubblePlacement& pl) {
  const int n = D.n();
  std::vector<Point> t;
  for (double s : {0.001, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0}) {
    Point a = pl.xi_eps() + s * pl.eta() * pl.nu;
    if (D.contains(a)) t.push_back(a);
    Point b = pl.xi_eps();
    b[1] += s * pl.eta();
    if (D.contains(b)) t.push_back(b);
    Point c = pl.xi_eps() - 0.9 * pl.eta() * pl.nu;
    c[1] += s * pl.eta();
    if (D.contains(c)) t.push_back(c);
  }
  Point far = Point::Zero(n);
  far[1] = 0.3;
  t.push_back(far);
  Point nb = pl.xi * (1 - 1e-3);
  nb[1] = 0.02;
  if (D.contains(nb)) t.push_back(nb);
  return t;
}

inline CheckResult check_projection() {
  return detail::timed(7, "projection bounds", [](std::ostream& os) {
    bool ok = true;
    for (PairCase s : {PairCase{4, {5, 2}}, PairCase{5, {7, 5}}}) {
      const RadialProfile& prof = profile(s);
      const int n = s.n;
      auto D = DomainModel::ball(Point::Zero(n), 1.0);
      Point xi = Point::Zero(n);
      xi[0] = 1;
      std::vector<double> ratios;
      for (double eps : {0.1, 0.05, 0.025}) {
        auto pl = BubblePlacement::make(D, xi, prof.pair, 1, 1, eps);
        auto bc = projection_bound_check(D, prof, pl, projection_targets(D, pl));
        ok = ok && bc.ordering_ok && bc.bound_ok;
        ratios.push_back(bc.bound_ratio);
        os << label(s) << " eps=" << eps << " PU/U in [" << bc.min_PU_over_U << "," << bc.max_PU_over_U << "] PV/V in ["
           << bc.min_PV_over_V << "," << bc.max_PV_over_V << "] bound=" << bc.bound_ratio << "; ";
      }
      if (prof.pair.regime == Regime::slow) {
        // empirical constant of the maximum-principle bound must not grow along the refinement
        for (std::size_t i = 1; i < ratios.size(); ++i) ok = ok && ratios[i] <= 1.5 * ratios[i - 1];
      } else {
        std::vector<Point> offs;
        for (double a : {0.5, 1.0, 2.0}) {
          Point o = Point::Zero(n);
          o[0] = a;
          offs.push_back(o);
          o[0] = -0.9;
          o[1] = a;
          offs.push_back(o);
        }
        auto rep = projection_remainder_sweep(D, prof, xi, 1, 1, {0.1, 0.05, 0.025, 0.0125}, offs);
        ok = ok && rep.bounded;
        os << "remainder ratios [";
        for (const auto& l : rep.levels) os << l.ratio << " ";
        os << "]; ";
      }
    }
    return ok;
  });
}

inline std::vector<double> scaling_ratios(int count = 9) {
  std::vector<double> r;
  for (int i = 0; i < count; ++i) r.push_back(std::pow(10.0, -3 + 2.0 * i / (count - 1)));
  return r;
}

inline CheckResult check_scaling() {
  return detail::timed(8, "external-norm scaling", [](std::ostream& os) {
    bool ok = true;
    for (PairCase s : {PairCase{4, {5, 2}}, PairCase{5, {7, 5}}}) {
      for (bool u : {true, false}) {
        auto t0 = std::chrono::steady_clock::now();
        auto sw = external_norm_scaling(profile(s), scaling_ratios(), u);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        double rel = sw.fitted_slope / sw.predicted_exponent - 1;
        ok = ok && std::abs(rel) <= 0.05 && secs <= 60;
        os << label(s) << (u ? " U" : " V") << " slope=" << sw.fitted_slope << " pred=" << sw.predicted_exponent
           << " rel=" << rel << "; ";
      }
    }
    return ok;
  });
}

inline CheckResult check_reduced_energy() {
  return detail::timed(9, "reduced energy", [](std::ostream& os) {
    bool ok = true;
    const double eps = 0.01;
    for (PairCase s : {PairCase{4, {5, 2}}, PairCase{5, {7, 5}}}) {
      ReducedCoefficients c = detail::coefficients_for(s, eps);
      for (WeightData w : {WeightData{1.0, 1.0}, WeightData{3.0, 0.5}, WeightData{0.2, 4.0}}) {
        auto ic = inner_critical_point(c, w.a, w.g);
        double stat = stationarity_residual(c, w, ic.Lambda_star, ic.t_star);
        auto f = [&](double L, double t) { return bracket_term(c, w, L, t); };
        auto [Lg, tg] = oracle::log_grid_minimize(f, ic.Lambda_star / 4, ic.Lambda_star * 4, ic.t_star / 4, ic.t_star * 4);
        double dev = std::max(std::abs(Lg / ic.Lambda_star - 1), std::abs(tg / ic.t_star - 1));
        ok = ok && stat <= 1e-12 && dev <= 1e-6 && ic.hessian_definite;
        os << label(s) << " stat=" << stat << " grid=" << dev << "; ";
      }
      bool threw = false;
      try {
        inner_critical_point(c, 1.0, 0.0);
      } catch (const Error& e) {
        threw = e.kind() == ErrorKind::no_interior_minimum;
      }
      ok = ok && threw;
      os << "g=0 -> no-interior-minimum: " << (threw ? "yes" : "no") << "; ";
    }
    // weight rescaling on the annulus
    Point ctr = Point::Zero(4);
    ctr[0] = 3;
    auto D1 = DomainModel::shifted_annulus(ctr, 1, 2, {2});
    ReducedCoefficients c = detail::coefficients_for({4, {5, 2}}, eps);
    auto r1 = find_configuration(D1, c, 2, eps);
    auto r2 = find_configuration(D1.with_weight_scale(7.3), c, 2, eps);
    double dev = 0;
    for (int i = 0; i < 2; ++i) {
      dev = std::max({dev, std::abs(r2.inner[i].Lambda_star / r1.inner[i].Lambda_star - 1),
                      std::abs(r2.inner[i].t_star / r1.inner[i].t_star - 1),
                      (r2.config.xi_list[i] - r1.config.xi_list[i]).norm()});
    }
    double jdev = std::abs(r2.J_model / (7.3 * r1.J_model) - 1);
    ok = ok && dev <= 1e-12 && jdev <= 1e-12;
    os << "rescaling argmin dev=" << dev << " J ratio dev=" << jdev;
    return ok;
  });
}

inline std::vector<CheckResult> run_library_checks(const std::function<void(const CheckResult&)>& on_result = {}) {
  std::vector<CheckResult> out;
  for (auto fn : {check_talenti, check_constants, check_slow_identity, check_decay_slopes, check_nondegeneracy,
                  check_green, check_projection, check_scaling, check_reduced_energy}) {
    out.push_back(fn());
    if (on_result) on_result(out.back());
  }
  return out;
}

}  // namespace bubble_lab::acceptance
