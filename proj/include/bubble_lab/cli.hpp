#pragma once

// Command-line front end. Every subcommand prints its primary JSON result on `out`
// and writes artifacts into --out-dir.

#include <charconv>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "acceptance.hpp"

namespace bubble_lab::cli {

using nlohmann::json;

/// Shortest round-trip decimal form, independent of the locale.
inline std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}
  void header(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) os_ << (i ? "," : "") << cols[i];
    os_ << '\n';
  }
  void row(const std::vector<double>& vals) {
    for (std::size_t i = 0; i < vals.size(); ++i) os_ << (i ? "," : "") << fmt(vals[i]);
    os_ << '\n';
  }

 private:
  std::ostream& os_;
};

// Usage problems (bad flags, unreadable or malformed config) exit with 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline json point_json(const Point& p) { return std::vector<double>(p.data(), p.data() + p.size()); }

inline std::string utc_timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

struct Common {
  std::string out_dir = ".";
  std::uint64_t seed = 42;
};

struct PairArgs {
  int n = 4;
  std::string p0 = "5/2";
  double alpha = 1, beta = 1;
};

inline ExponentPair make_pair(const PairArgs& a, bool with_slopes = false) {
  Rational p0 = parse_rational(a.p0);
  return with_slopes ? ExponentPair::make(a.n, p0, a.alpha, a.beta, 0) : ExponentPair::make(a.n, p0);
}

inline void add_pair_options(CLI::App* sub, PairArgs& a) {
  sub->add_option("--n", a.n, "dimension")->capture_default_str();
  sub->add_option("--p0", a.p0, "first exponent, rational (5/2) or decimal")->capture_default_str();
}

inline json pair_json(const ExponentPair& e) {
  return {{"n", e.n}, {"p0", e.p0}, {"q0", e.q0}, {"regime", to_string(e.regime)}};
}

inline DomainModel load_domain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read domain file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("malformed JSON in '" + path + "': " + e.what());
  }
  try {
    return DomainModel::from_json(j);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

class Output {
 public:
  explicit Output(const Common& c) : dir_(c.out_dir) {}
  void prepare() const {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (!std::filesystem::is_directory(dir_)) throw UsageError("cannot create output directory '" + dir_.string() + "'");
  }
  std::ofstream open(const std::string& name) const {
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw UsageError("cannot write '" + (dir_ / name).string() + "'");
    return f;
  }
  void write_json(const std::string& name, const json& j) const { open(name) << j.dump(2) << '\n'; }

 private:
  std::filesystem::path dir_;
};

// ---- subcommands -------------------------------------------------------------

inline json run_ground_state(const PairArgs& pa, double r_max, const Common& c, const Output& o) {
  ShootingConfig cfg;
  cfg.R_max = r_max;
  RadialProfile prof = solve_ground_state(make_pair(pa), cfg);
  {
    auto f = o.open("profile.csv");
    CsvWriter w(f);
    w.header({"r", "U", "V"});
    for (std::size_t i = 0; i < prof.size(); ++i) w.row({prof.r[i], prof.U[i], prof.V[i]});
  }
  json j = {{"n", prof.n()},
            {"p0", prof.pair.p0},
            {"q0", prof.pair.q0},
            {"v0", prof.v0},
            {"tail_a", prof.tail.a},
            {"tail_b", prof.tail.b},
            {"tail_exponent", prof.tail.kappa_U},
            {"regime", to_string(prof.pair.regime)},
            {"R_max", cfg.R_max},
            {"bracket_width", prof.bracket_width},
            {"ode_residual", prof.ode_residual},
            {"seed", c.seed},
            {"generated_at", utc_timestamp()}};
  o.write_json("profile.json", j);
  return j;
}

inline json run_tail(const PairArgs& pa, const Common& c, const Output& o) {
  RadialProfile prof = solve_ground_state(make_pair(pa));
  const TailFit& t = prof.tail;
  json j = pair_json(prof.pair);
  j["a"] = t.a;
  j["b"] = t.b;
  j["tail_exponent_U"] = t.kappa_U;
  j["tail_exponent_V"] = t.kappa_V;
  j["fitted_slope_U"] = -t.slope_U;
  j["fitted_slope_V"] = -t.slope_V;
  j["fit_residual_U"] = t.residual_U;
  j["fit_residual_V"] = t.residual_V;
  j["window"] = {t.r_lo, t.r_hi};
  if (prof.pair.regime == Regime::slow) {
    const int n = prof.n();
    const double p0 = prof.pair.p0;
    double lhs = std::pow(t.b, p0), rhs = t.a * ((n - 2) * p0 - 2) * (n - (n - 2) * p0);
    j["slow_identity_rel_error"] = std::abs(lhs - rhs) / lhs;
  }
  j["seed"] = c.seed;
  o.write_json("tail.json", j);
  return j;
}

inline json run_kernel_check(const PairArgs& pa, const Common& c, const Output& o) {
  RadialProfile prof = solve_ground_state(make_pair(pa));
  json j = pair_json(prof.pair);
  json res = json::array();
  for (const auto& kp : kernel_basis(prof)) res.push_back({{"index", kp.index}, {"residual", linearized_residual(prof, kp)}});
  j["kernel_residuals"] = res;
  json modes = json::array();
  for (int ell = 0; ell <= 2; ++ell) {
    auto m = mode_kernel_dimension(prof, ell);
    modes.push_back({{"ell", ell}, {"dimension", m.dimension}, {"singular_values", m.singular_values}});
  }
  j["modes"] = modes;
  j["seed"] = c.seed;
  o.write_json("kernel.json", j);
  return j;
}

inline json run_constants(const PairArgs& pa, const Common& c, const Output& o) {
  RadialProfile prof = solve_ground_state(make_pair(pa));
  EnergyConstants k = compute_constants(prof);
  json j = {{"n", prof.n()},     {"p0", prof.pair.p0}, {"q0", prof.pair.q0}, {"A1", k.A1},
            {"A2", k.A2},        {"A3", k.A3},         {"B1", k.B1},         {"B3", k.B3},
            {"B2_defined", k.B2_defined},              {"quad_error", k.quad_error},
            {"grad_UV", k.grad_UV}, {"seed", c.seed}};
  j["B2"] = k.B2_defined ? json(k.B2) : json(nullptr);
  o.write_json("constants.json", j);
  return j;
}

inline json run_green_check(int n, int samples, const Common& c, const Output& o) {
  if (samples < 1) throw UsageError("--samples must be positive");
  auto D = DomainModel::ball(Point::Zero(n), 1.0);
  std::mt19937_64 rng(c.seed);
  auto xs = acceptance::detail::random_ball_points(n, 1.0, samples, rng);
  auto ys = acceptance::detail::random_ball_points(n, 1.0, samples, rng);
  double sym = 0, bnd = 0, harm = 0, minG = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    double g1 = green_ball(D, xs[i], ys[i]), g2 = green_ball(D, ys[i], xs[i]);
    sym = std::max(sym, std::abs(g1 - g2) / std::abs(g1));
    minG = std::min(minG, g1);
    Point z = xs[i].normalized();
    double gamma = fundamental_solution(n, z, ys[i]);
    bnd = std::max(bnd, std::abs(gamma - regular_part_ball(D, z, ys[i])) / gamma);
    harm = std::max(harm, harmonicity_residual(D, xs[i] * 0.9, ys[i], 1e-3));
  }
  std::vector<Point> bps;
  for (int k = 0; k < 8; ++k) {
    Point p = Point::Zero(n);
    p[0] = std::cos(0.7 * k);
    p[1] = std::sin(0.7 * k);
    bps.push_back(p);
  }
  auto rep = regular_part_boundary_check(D, bps, acceptance::detail::random_ball_points(n, 1.0, 50, rng, 0.7), 0.1, 4);
  json levels = json::array();
  for (const auto& l : rep.levels) levels.push_back({{"d", l.d}, {"max_ratio", l.max_ratio}, {"min_H", l.min_H}});
  json j = {{"n", n},
            {"samples", samples},
            {"symmetry_max", sym},
            {"boundary_max", bnd},
            {"harmonicity_max", harm},
            {"min_G", minG},
            {"regular_part_levels", levels},
            {"regular_part_bounded", rep.bounded},
            {"seed", c.seed}};
  o.write_json("green.json", j);
  return j;
}

struct ProjectArgs {
  double epsilon = 0.1, t = 1, Lambda = 1;
  std::size_t mc_samples = 0;
};

inline json run_project(const PairArgs& pa, const ProjectArgs& a, const Common& c, const Output& o) {
  RadialProfile prof = solve_ground_state(make_pair(pa));
  const int n = prof.n();
  auto D = DomainModel::ball(Point::Zero(n), 1.0);
  Point xi = Point::Zero(n);
  xi[0] = 1;
  auto pl = BubblePlacement::make(D, xi, prof.pair, a.t, a.Lambda, a.epsilon);
  auto targets = acceptance::projection_targets(D, pl);
  auto vals = project_bubble(D, prof, pl, targets);
  {
    auto f = o.open("projection.csv");
    CsvWriter w(f);
    std::vector<std::string> cols;
    for (int i = 0; i < n; ++i) cols.push_back("x" + std::to_string(i + 1));
    for (const char* s : {"U", "PU", "err_U", "V", "PV", "err_V"}) cols.push_back(s);
    w.header(cols);
    for (std::size_t i = 0; i < targets.size(); ++i) {
      std::vector<double> row(targets[i].data(), targets[i].data() + n);
      for (double v : {vals.U[i], vals.PU[i], vals.err_U[i], vals.V[i], vals.PV[i], vals.err_V[i]}) row.push_back(v);
      w.row(row);
    }
  }
  auto bc = projection_bound_check(D, prof, pl, targets);
  json j = pair_json(prof.pair);
  j["epsilon"] = a.epsilon;
  j["delta"] = pl.delta();
  j["eta"] = pl.eta();
  j["xi_eps"] = point_json(pl.xi_eps());
  j["ordering_ok"] = bc.ordering_ok;
  j["PU_over_U"] = {bc.min_PU_over_U, bc.max_PU_over_U};
  j["PV_over_V"] = {bc.min_PV_over_V, bc.max_PV_over_V};
  j["bound_ratio"] = bc.bound_ratio;
  j["bound_ok"] = bc.bound_ok;
  if (a.mc_samples > 0) {
    std::size_t pick = targets.size() > 2 ? 2 : 0;
    auto mc = project_bubble_monte_carlo(D, prof, pl, targets[pick], true, a.mc_samples, c.seed);
    j["monte_carlo"] = {{"target", point_json(targets[pick])},
                        {"PU_quadrature", vals.PU[pick]},
                        {"PU_monte_carlo", mc.first},
                        {"standard_error", mc.second},
                        {"samples", a.mc_samples}};
  }
  j["seed"] = c.seed;
  j["generated_at"] = utc_timestamp();
  o.write_json("projection.json", j);
  return j;
}

struct SweepArgs {
  std::string regime;
  int points = 9;
  double ratio_min = 1e-3, ratio_max = 1e-1;
  std::string side = "u";
};

inline json run_residual_sweep(PairArgs pa, bool n_set, bool p0_set, const SweepArgs& a, const Common& c,
                               const Output& o) {
  if (a.regime != "fast" && a.regime != "slow") throw UsageError("--regime must be fast or slow");
  if (a.side != "u" && a.side != "v") throw UsageError("--side must be u or v");
  if (a.points < 2 || !(a.ratio_min > 0) || !(a.ratio_max > a.ratio_min))
    throw UsageError("need at least two points and 0 < ratio-min < ratio-max");
  if (a.regime == "slow") {
    if (!n_set) pa.n = 5;
    if (!p0_set) pa.p0 = "7/5";
  }
  ExponentPair e = make_pair(pa);
  Regime want = a.regime == "slow" ? Regime::slow : Regime::fast;
  if (e.regime != want)
    throw Error(ErrorKind::invalid_argument, std::string("pair is in the ") + to_string(e.regime) + " regime");
  RadialProfile prof = solve_ground_state(e);
  std::vector<double> ratios;
  for (int i = 0; i < a.points; ++i)
    ratios.push_back(a.ratio_min * std::pow(a.ratio_max / a.ratio_min, double(i) / (a.points - 1)));
  auto sw = external_norm_scaling(prof, ratios, a.side == "u");
  {
    auto f = o.open("sweep.csv");
    CsvWriter w(f);
    w.header({"epsilon", "delta", "eta", "measured_norm", "predicted_exponent", "fitted_slope"});
    for (const auto& r : sw.rows) w.row({r.epsilon, r.delta, r.eta, r.measured_norm, sw.predicted_exponent, sw.fitted_slope});
  }
  json j = pair_json(e);
  j["side"] = a.side;
  j["predicted_exponent"] = sw.predicted_exponent;
  j["fitted_slope"] = sw.fitted_slope;
  j["relative_deviation"] = sw.fitted_slope / sw.predicted_exponent - 1;
  j["ratios"] = ratios;
  j["seed"] = c.seed;
  j["generated_at"] = utc_timestamp();
  o.write_json("sweep.json", j);
  return j;
}

struct ReduceArgs {
  std::string domain;
  int kappa = 1;
  double epsilon = 0.01;
  std::string p0;  // empty: symmetric pair (n+2)/(n-2)
  double alpha = 1, beta = 1;
  double margin_constant = 1;
};

inline json run_reduce(const ReduceArgs& a, const Common& c, const Output& o) {
  DomainModel D = load_domain(a.domain);
  if (!(a.epsilon > 0 && a.epsilon < 1)) throw UsageError("--epsilon must lie in (0, 1)");
  const int n = D.n();
  PairArgs pa;
  pa.n = n;
  pa.p0 = a.p0.empty() ? Rational(n + 2, n - 2).to_string() : a.p0;
  pa.alpha = a.alpha;
  pa.beta = a.beta;
  ExponentPair e = make_pair(pa, true);
  RadialProfile prof = solve_ground_state(ExponentPair::make(n, parse_rational(pa.p0)));
  EnergyConstants k = compute_constants(prof);
  std::optional<double> I;
  if (e.regime == Regime::slow) I = slow_placement_integral(prof, placement_ratio(e, a.epsilon, 1, 1));
  ReducedCoefficients co = assemble_coefficients(k, e, prof.tail.b, I, a.margin_constant);
  ConfigurationResult r = find_configuration(D, co, a.kappa, a.epsilon);
  json xs = json::array(), xe = json::array(), hd = json::array();
  for (std::size_t i = 0; i < r.config.xi_list.size(); ++i) {
    xs.push_back(point_json(r.config.xi_list[i]));
    xe.push_back(point_json(r.xi_eps[i]));
    hd.push_back(r.inner[i].hessian_definite);
  }
  json j = {{"epsilon", a.epsilon},
            {"xi_list", xs},
            {"Lambda_star", r.config.Lambda_list},
            {"t_star", r.config.t_list},
            {"delta_pred", r.delta_pred},
            {"J_model", r.J_model},
            {"margin", r.margin},
            {"xi_eps", xe},
            {"hessian_definite", hd},
            {"rate", co.rate},
            {"pair", pair_json(e)},
            {"coefficients",
             {{"c1", co.c1}, {"c2", co.c2}, {"c3", co.c3}, {"c4", co.c4}, {"c5", co.c5}, {"c5_prime", co.c5_prime},
              {"c6", co.c6}}},
            {"seed", c.seed}};
  if (I) j["slow_integral"] = *I;
  o.write_json("reduce.json", j);
  return j;
}

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// End-to-end check: `reduce` on the two-sphere annulus |x - (3,0,0,0)| in (1, 2)
/// with a = (x^1)^2 and kappa = 2.
inline acceptance::CheckResult check_end_to_end(const std::filesystem::path& work_dir) {
  return acceptance::detail::timed(10, "reduce on the annulus", [&](std::ostream& os) {
    std::filesystem::create_directories(work_dir);
    auto domain_path = work_dir / "annulus.json";
    {
      std::ofstream f(domain_path);
      f << json{{"shape", "shifted_annulus"}, {"n", 4}, {"center", {3, 0, 0, 0}}, {"radii", {1, 2}},
                {"weight_exponents", {2}}}
               .dump();
    }
    std::string dp = domain_path.string(), wd = work_dir.string();
    std::vector<const char*> args{"bubble_lab", "--out-dir", wd.c_str(), "reduce", "--domain",
                                  dp.c_str(),   "--kappa",   "2",        "--epsilon", "0.01"};
    std::ostringstream so, se;
    int code = cli_dispatch(static_cast<int>(args.size()), args.data(), so, se);
    if (code != 0) {
      os << "exit code " << code << ": " << se.str();
      return false;
    }
    json j = json::parse(so.str());
    bool ok = j["xi_list"].size() == 2;
    std::vector<double> x1;
    for (const auto& p : j["xi_list"]) {
      x1.push_back(p[0].get<double>());
      for (std::size_t i = 1; i < p.size(); ++i) ok = ok && p[i].get<double>() == 0;
    }
    std::sort(x1.begin(), x1.end());
    ok = ok && x1.size() == 2 && std::abs(x1[0] - 1) <= 1e-12 && std::abs(x1[1] - 4) <= 1e-12;
    for (const auto& h : j["hessian_definite"]) ok = ok && h.get<bool>();
    const double eps = 0.01, n = 4;
    double worst = 0;
    for (std::size_t i = 0; i < j["delta_pred"].size(); ++i) {
      double expect = std::pow(eps, (n - 1) / (n - 2)) * j["Lambda_star"][i].get<double>();
      worst = std::max(worst, std::abs(j["delta_pred"][i].get<double>() / expect - 1));
    }
    ok = ok && worst <= 1e-12;
    os << "x1 = {" << (x1.size() > 0 ? x1[0] : 0) << "," << (x1.size() > 1 ? x1[1] : 0) << "} delta rel.dev=" << worst;
    return ok;
  });
}

inline std::vector<acceptance::CheckResult> run_report(const Common& c, std::ostream& out) {
  auto print = [&](const acceptance::CheckResult& r) {
    out << (r.pass ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << " (" << std::fixed << std::setprecision(2)
        << r.seconds << " s)" << std::defaultfloat << "  " << r.detail << '\n';
    out.flush();
  };
  auto results = acceptance::run_library_checks(print);
  results.push_back(check_end_to_end(std::filesystem::path(c.out_dir) / "report_work"));
  print(results.back());
  return results;
}

inline int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"bubble_lab: ground states, projections and reduced energies for critical Lane-Emden systems"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--out-dir", common.out_dir, "directory for artifacts")->capture_default_str();
  app.add_option("--seed", common.seed, "seed for Monte Carlo cross-checks and random samples")->capture_default_str();

  PairArgs gs, tl, kc, cs, pj, rs;
  double r_max = 200;
  auto* s_gs = app.add_subcommand("ground-state", "solve the radial ground state; writes profile.csv and profile.json");
  add_pair_options(s_gs, gs);
  s_gs->add_option("--r-max", r_max, "outer radius of the shooting interval")->capture_default_str();

  auto* s_tl = app.add_subcommand("tail", "tail constants a, b and fitted decay slopes");
  add_pair_options(s_tl, tl);
  auto* s_kc = app.add_subcommand("kernel-check", "kernel residuals and mode kernel dimensions for l = 0, 1, 2");
  add_pair_options(s_kc, kc);
  auto* s_cs = app.add_subcommand("constants", "energy constants A1..B3");
  add_pair_options(s_cs, cs);

  int g_n = 4, g_samples = 100;
  auto* s_gc = app.add_subcommand("green-check", "symmetry, boundary values and harmonicity of the ball Green function");
  s_gc->add_option("--n", g_n, "dimension")->capture_default_str();
  s_gc->add_option("--samples", g_samples, "random point pairs")->capture_default_str();

  ProjectArgs pa;
  auto* s_pj = app.add_subcommand("project", "projected bubble on the unit ball; writes projection.csv");
  add_pair_options(s_pj, pj);
  s_pj->add_option("--epsilon", pa.epsilon)->capture_default_str();
  s_pj->add_option("--t", pa.t)->capture_default_str();
  s_pj->add_option("--Lambda", pa.Lambda)->capture_default_str();
  s_pj->add_option("--mc-samples", pa.mc_samples, "Monte Carlo cross-check samples (0 = off)")->capture_default_str();

  SweepArgs sa;
  auto* s_rs = app.add_subcommand("residual-sweep", "external-norm scaling sweep; writes sweep.csv");
  add_pair_options(s_rs, rs);
  s_rs->add_option("--regime", sa.regime, "fast or slow")->required();
  s_rs->add_option("--points", sa.points)->capture_default_str();
  s_rs->add_option("--ratio-min", sa.ratio_min)->capture_default_str();
  s_rs->add_option("--ratio-max", sa.ratio_max)->capture_default_str();
  s_rs->add_option("--side", sa.side, "u or v")->capture_default_str();

  ReduceArgs ra;
  auto* s_rd = app.add_subcommand("reduce", "critical configuration of the reduced energy");
  s_rd->add_option("--domain", ra.domain, "domain JSON")->required();
  s_rd->add_option("--kappa", ra.kappa)->capture_default_str();
  s_rd->add_option("--epsilon", ra.epsilon)->required();
  s_rd->add_option("--p0", ra.p0, "first exponent (default: symmetric pair)");
  s_rd->add_option("--alpha", ra.alpha)->capture_default_str();
  s_rd->add_option("--beta", ra.beta)->capture_default_str();
  s_rd->add_option("--margin-constant", ra.margin_constant)->capture_default_str();

  auto* s_rp = app.add_subcommand("report", "run every acceptance check and print a pass/fail table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return 2;
  }

  try {
    Output o(common);
    o.prepare();
    json result;
    if (*s_gs) result = run_ground_state(gs, r_max, common, o);
    else if (*s_tl) result = run_tail(tl, common, o);
    else if (*s_kc) result = run_kernel_check(kc, common, o);
    else if (*s_cs) result = run_constants(cs, common, o);
    else if (*s_gc) result = run_green_check(g_n, g_samples, common, o);
    else if (*s_pj) result = run_project(pj, pa, common, o);
    else if (*s_rs)
      result = run_residual_sweep(rs, s_rs->count("--n") > 0, s_rs->count("--p0") > 0, sa, common, o);
    else if (*s_rd) result = run_reduce(ra, common, o);
    else if (*s_rp) {
      auto results = run_report(common, out);
      json j = json::array();
      bool all = true;
      for (const auto& r : results) {
        j.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"seconds", r.seconds}});
        all = all && r.pass;
      }
      o.write_json("report.json", {{"checks", j}, {"seed", common.seed}, {"generated_at", utc_timestamp()}});
      return all ? 0 : 1;
    }
    out << result.dump(2) << '\n';
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace bubble_lab::cli
