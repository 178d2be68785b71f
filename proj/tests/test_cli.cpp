#include <filesystem>
#include <fstream>
#include <sstream>

#include <bubble_lab/cli.hpp>

#include "support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bubble_lab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Outcome run(std::vector<std::string> args) {
    std::string d = dir_.string();
    args.insert(args.begin(), {"bubble_lab", "--out-dir", d});
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    int code = bubble_lab::cli::cli_dispatch(static_cast<int>(argv.size()), argv.data(), o, e);
    return {code, o.str(), e.str()};
  }
  std::string slurp(const std::string& name) const {
    std::ifstream f(dir_ / name);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }
  fs::path write(const std::string& name, const std::string& text) const {
    fs::create_directories(dir_);
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, GroundStateWritesProfileAndSidecar) {
  auto r = run({"ground-state", "--n", "4", "--p0", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string csv = slurp("profile.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "r,U,V");
  json side = json::parse(slurp("profile.json"));
  for (const char* k : {"n", "p0", "q0", "v0", "tail_a", "tail_b", "tail_exponent", "seed"})
    EXPECT_TRUE(side.contains(k)) << k;
  EXPECT_NEAR(side["v0"].get<double>(), 1, 1e-9);
  EXPECT_NEAR(side["tail_a"].get<double>(), 8, 1e-3);
}

TEST_F(CliTest, ReduceOnTheAnnulusSample) {
  auto domain = write("annulus.json",
                      R"({"shape":"shifted_annulus","n":4,"center":[3,0,0,0],"radii":[1,2],"weight_exponents":[2]})");
  auto r = run({"reduce", "--domain", domain.string(), "--kappa", "2", "--epsilon", "0.01"});
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  for (const char* k : {"epsilon", "xi_list", "Lambda_star", "t_star", "delta_pred", "J_model", "margin", "seed"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["xi_list"][0][0].get<double>(), 1);
  EXPECT_EQ(j["xi_list"][1][0].get<double>(), 4);
  EXPECT_EQ(json::parse(slurp("reduce.json")), j);
}

TEST_F(CliTest, ResidualSweepCsv) {
  auto r = run({"residual-sweep", "--regime", "slow", "--n", "5", "--p0", "1.4"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string csv = slurp("sweep.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "epsilon,delta,eta,measured_norm,predicted_exponent,fitted_slope");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 10);
  EXPECT_TRUE(json::parse(slurp("sweep.json")).contains("seed"));
  // CSV bodies are reproducible
  ASSERT_EQ(run({"residual-sweep", "--regime", "slow"}).code, 0);
  EXPECT_EQ(slurp("sweep.csv"), csv);
}

TEST_F(CliTest, SweepRegimeMismatchIsADomainError) {
  auto r = run({"residual-sweep", "--regime", "slow", "--n", "4", "--p0", "5/2"});
  EXPECT_EQ(r.code, 1);
}

TEST_F(CliTest, ProjectIsReproducibleForAFixedSeed) {
  std::vector<std::string> args{"--seed", "7", "project", "--n", "4", "--p0", "5/2", "--mc-samples", "2000"};
  auto a = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  std::string csv = slurp("projection.csv");
  auto ja = json::parse(a.out);
  auto b = run(args);
  EXPECT_EQ(slurp("projection.csv"), csv);
  EXPECT_EQ(ja["monte_carlo"], json::parse(b.out)["monte_carlo"]);
  EXPECT_TRUE(ja["ordering_ok"].get<bool>());
}

TEST_F(CliTest, OtherSubcommands) {
  for (std::vector<std::string> args : {std::vector<std::string>{"tail", "--n", "5", "--p0", "7/5"},
                                        {"kernel-check", "--n", "4", "--p0", "5/2"},
                                        {"constants", "--n", "4", "--p0", "3"},
                                        {"green-check", "--n", "3", "--samples", "20"}}) {
    auto r = run(args);
    EXPECT_EQ(r.code, 0) << args[0] << ": " << r.err;
    EXPECT_TRUE(json::accept(r.out)) << args[0];
  }
}

TEST_F(CliTest, UsageErrorsExitWithTwo) {
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"reduce", "--epsilon", "0.01"}).code, 2);  // --domain missing
  EXPECT_EQ(run({"reduce", "--domain", "/nonexistent/d.json", "--epsilon", "0.01"}).code, 2);
  auto bad = write("bad.json", "{ not json");
  EXPECT_EQ(run({"reduce", "--domain", bad.string(), "--epsilon", "0.01"}).code, 2);
  auto good = write("ball.json", R"({"shape":"ball","n":4,"center":[3,0,0,0],"radii":[1],"weight_exponents":[1]})");
  EXPECT_EQ(run({"reduce", "--domain", good.string(), "--epsilon", "2"}).code, 2);
  EXPECT_EQ(run({"residual-sweep", "--regime", "medium"}).code, 2);
}

TEST_F(CliTest, DomainErrorsExitWithOne) {
  auto flat = write("flat.json", R"({"shape":"ball","n":4,"center":[0,0,0,0],"radii":[1]})");
  auto r = run({"reduce", "--domain", flat.string(), "--epsilon", "0.01"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("insufficient-critical-points"), std::string::npos) << r.err;
  EXPECT_EQ(run({"constants", "--n", "4", "--p0", "1/2"}).code, 1);
}

TEST(CsvFormat, ShortestRoundTrip) {
  EXPECT_EQ(bubble_lab::cli::fmt(0.1), "0.1");
  EXPECT_EQ(bubble_lab::cli::fmt(1e-300), "1e-300");
  double x = 1.0 / 3;
  EXPECT_EQ(std::stod(bubble_lab::cli::fmt(x)), x);
}
