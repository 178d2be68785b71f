#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "ground_state.hpp"

namespace bubble_lab {

/// Kernel element of the linearized system, stored by its radial factor on the
/// profile grid. Index 0 is the dilation mode; indices 1..n share the radial
/// factor (U', V') and differ only by the angular factor y_l / |y|.
struct KernelPair {
  int index = 0;
  std::vector<double> Psi, Phi;

  int mode() const { return index == 0 ? 0 : 1; }
};

inline std::vector<KernelPair> kernel_basis(const RadialProfile& prof) {
  const int n = prof.n();
  const double q0 = prof.pair.q0, p0 = prof.pair.p0;
  KernelPair dil;
  dil.index = 0;
  KernelPair trans;
  trans.index = 1;
  for (std::size_t i = 0; i < prof.size(); ++i) {
    double r = prof.r[i];
    dil.Psi.push_back(r * prof.dU[i] + n * prof.U[i] / (q0 + 1));
    dil.Phi.push_back(r * prof.dV[i] + n * prof.V[i] / (p0 + 1));
  }
  trans.Psi = prof.dU;
  trans.Phi = prof.dV;
  std::vector<KernelPair> out{dil};
  for (int l = 1; l <= n; ++l) {
    trans.index = l;
    out.push_back(trans);
  }
  return out;
}

namespace detail {

// Sixth-order central differences in the uniform log variable.
inline std::array<double, 3> log_derivatives(const std::vector<double>& f, std::size_t i, double h) {
  static constexpr double d1[] = {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0, 3.0 / 4, -3.0 / 20, 1.0 / 60};
  static constexpr double d2[] = {1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90};
  double a = 0, b = 0;
  for (int k = -3; k <= 3; ++k) {
    a += d1[k + 3] * f[i + k];
    b += d2[k + 3] * f[i + k];
  }
  return {f[i], a / h, b / (h * h)};
}

}  // namespace detail

/// Sup over interior grid points of the relative defect of
/// -Delta_l Psi = p0 V^{p0-1} Phi and -Delta_l Phi = q0 U^{q0-1} Psi.
inline double linearized_residual(const RadialProfile& prof, const KernelPair& kp) {
  const int n = prof.n();
  const int l = kp.mode();
  const double h = prof.log_step, p0 = prof.pair.p0, q0 = prof.pair.q0;
  const double ang = l * (l + n - 2.0);
  double worst = 0;
  // Grid index 0 is the origin; the uniform log grid starts at index 1.
  for (std::size_t i = 4; i + 3 < prof.size(); ++i) {
    double r2 = prof.r[i] * prof.r[i];
    auto one = [&](const std::vector<double>& f, const std::vector<double>& g, double coef) {
      auto [v, fs, fss] = detail::log_derivatives(f, i, h);
      double lap = fss + (n - 2) * fs - ang * v;
      double src = r2 * coef * g[i];
      // In log-radial form every term is O(|f|), so |f| belongs to the scale;
      // without it round-off dominates near the origin where the terms are O(r^2).
      double scale = std::abs(v) + std::abs(fss) + (n - 2) * std::abs(fs) + ang * std::abs(v) + std::abs(src);
      return scale > 0 ? std::abs(lap + src) / scale : 0.0;
    };
    double rp = one(kp.Psi, kp.Phi, p0 * std::pow(prof.V[i], p0 - 1));
    double rf = one(kp.Phi, kp.Psi, q0 * std::pow(prof.U[i], q0 - 1));
    worst = std::max({worst, rp, rf});
  }
  return worst;
}

struct ModeReport {
  int ell = 0;
  int dimension = 0;
  std::array<double, 2> singular_values{};  // of the normalized far-field growth map
};

namespace detail {

// Ground state plus a mode-l linear pair, in s = log r:
// (U, U_s, V, V_s, Psi, Psi_s, Phi, Phi_s).
struct AugmentedSystem {
  int n;
  double p, q, ang;
  void operator()(const std::array<double, 8>& y, std::array<double, 8>& dy, double s) const {
    double r2 = std::exp(2 * s);
    double Vp1 = std::pow(std::max(y[2], 0.0), p - 1), Uq1 = std::pow(std::max(y[0], 0.0), q - 1);
    dy[0] = y[1];
    dy[1] = -(n - 2) * y[1] - r2 * Vp1 * y[2];
    dy[2] = y[3];
    dy[3] = -(n - 2) * y[3] - r2 * Uq1 * y[0];
    dy[4] = y[5];
    dy[5] = -(n - 2) * y[5] + ang * y[4] - r2 * p * Vp1 * y[6];
    dy[6] = y[7];
    dy[7] = -(n - 2) * y[7] + ang * y[6] - r2 * q * Uq1 * y[4];
  }
};

}  // namespace detail

/// Counts regular solutions of the mode-l linearized radial system that decay
/// at R_max. Regular data at the origin form the family (A, B) r^l with
/// (A, B) = (cos t, sin t); by linearity two shots span it. Each shot's growing
/// amplitudes along r^l are read off at R_max, rows of the 2x2 growth map are
/// equilibrated, and singular values below decay_threshold count as kernel
/// directions. Values within a factor 5 above the threshold are inconclusive.
inline ModeReport mode_kernel_dimension(const RadialProfile& prof, int ell, double decay_threshold = 1e-3) {
  if (ell < 0) throw Error(ErrorKind::invalid_argument, "mode index must be non-negative");
  if (prof.pair.regime == Regime::log)
    throw Error(ErrorKind::unsupported_regime, "far-field amplitudes carry log resonances in the borderline regime");
  namespace odeint = boost::numeric::odeint;
  using State8 = std::array<double, 8>;
  const int n = prof.n();
  const double p0 = prof.pair.p0, q0 = prof.pair.q0, v0 = prof.v0;
  const double ang = ell * (ell + n - 2.0);
  detail::AugmentedSystem sys{n, p0, q0, ang};
  const double r0 = prof.config.r_start, R = prof.config.R_max, sR = std::log(R);
  const double m = 2.0 - n - ell;
  // When V^{p0-1} ~ b^{p0-1} r^{-sigma} decays slower than r^{-2}, a growing Phi ~ alpha r^l
  // drives Psi ~ C alpha r^{l+2-sigma}, which must be removed before reading Psi's own r^l amplitude.
  const double sigma = (n - 2) * (p0 - 1);
  const double k = ell + 2 - sigma;
  const bool driven = sigma < 2;
  const double C = driven ? -p0 * std::pow(prof.tail.b, p0 - 1) / (k * (k + n - 2) - ang) : 0.0;
  Eigen::Matrix2d M;
  for (int col = 0; col < 2; ++col) {
    double A = col == 0 ? 1 : 0, B = col == 0 ? 0 : 1;
    auto c = detail::series_state(n, p0, q0, v0, r0);
    double a2 = -p0 * std::pow(v0, p0 - 1) * B / (2.0 * n + 4 * ell);
    double b2 = -q0 * A / (2.0 * n + 4 * ell);
    double rl = std::pow(r0, ell), rr = r0 * r0;
    State8 y{c[0], c[1], c[2], c[3],
             A * rl + a2 * rl * rr, ell * A * rl + (ell + 2) * a2 * rl * rr,
             B * rl + b2 * rl * rr, ell * B * rl + (ell + 2) * b2 * rl * rr};
    auto stepper = odeint::make_controlled(1e-300, prof.config.ode_tolerance, odeint::runge_kutta_dopri5<State8>());
    odeint::integrate_adaptive(stepper, sys, y, std::log(r0), sR, 1e-3);
    for (double v : y)
      if (!std::isfinite(v)) throw Error(ErrorKind::non_convergence, "linearized shot diverged");
    // f ~ alpha r^l + beta r^m  =>  alpha R^l = (m f - f_s) / (m - l).
    double gPhi = (m * y[6] - y[7]) / (m - ell);
    double psi = y[4], psi_s = y[5];
    if (driven) {
      double part = C * gPhi * std::pow(R, k - ell);
      psi -= part;
      psi_s -= k * part;
    }
    M(0, col) = (m * psi - psi_s) / (m - ell);
    M(1, col) = gPhi;
  }
  for (int row = 0; row < 2; ++row) {
    double s = M.row(row).cwiseAbs().maxCoeff();
    if (s > 0) M.row(row) /= s;
  }
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(M);
  ModeReport rep;
  rep.ell = ell;
  rep.singular_values = {svd.singularValues()[0], svd.singularValues()[1]};
  for (double s : rep.singular_values) {
    if (s <= decay_threshold)
      ++rep.dimension;
    else if (s <= 5 * decay_threshold)
      throw Error(ErrorKind::inconclusive, "growth-map singular value inside the tolerance band");
  }
  return rep;
}

}  // namespace bubble_lab
