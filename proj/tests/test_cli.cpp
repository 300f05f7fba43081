#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "betarc/report.hpp"

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("betarc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) const {
    const std::string cmd = std::string(BETARC_CLI) + " " + args + " >" + (dir_ / "stdout").string() + " 2>" +
                            (dir_ / "stderr").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  static std::vector<std::vector<double>> read_numeric_csv(const std::string& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
      std::vector<double> r;
      std::istringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) r.push_back(std::stod(cell));
      rows.push_back(r);
    }
    return rows;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run("--version"), 0);
  EXPECT_NE(slurp(path("stdout")).find(betarc::kVersion), std::string::npos);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("simulate --bogus 1"), 2);
  EXPECT_EQ(run("simulate --map tent"), 2);
  EXPECT_EQ(run("simulate --map logistic --theta 5 -o " + path("a.csv")), 2);
  EXPECT_EQ(run("simulate --map bernoulli --theta 2.5 -o " + path("a.csv")), 2);
  EXPECT_EQ(run("simulate --nu -1 -o " + path("a.csv")), 2);
  EXPECT_EQ(run("fit --data " + path("missing.csv") + " -o " + path("r.json")), 3);
  EXPECT_EQ(run("fit --data x.csv --u0 0.3 --u0-grid 4"), 2);
  EXPECT_EQ(run("mc --preset nope -o " + path("mc")), 2);
  EXPECT_EQ(run("density --map mp --theta 0.5 --method quadrature -o " + path("d.csv")), 2);

  std::ofstream(path("bad.csv")) << "y\n0.3\n1.3\n";
  EXPECT_EQ(run("fit --data " + path("bad.csv") + " --u0 0.3 -o " + path("r.json")), 3);
  EXPECT_NE(slurp(path("stderr")).find("row 2"), std::string::npos);
}

TEST_F(Cli, SimulateWritesRequestedRows) {
  ASSERT_EQ(run("simulate --map mp --theta 0.5 --nu 20 --u0 0.3 --n 100 --seed 42 -o " + path("s.csv")), 0);
  std::ifstream in(path("s.csv"));
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t,y,mu");
  const auto rows = read_numeric_csv(path("s.csv"));
  ASSERT_EQ(rows.size(), 100u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i][0], static_cast<double>(i + 1));
    EXPECT_GT(rows[i][1], 0.0);
    EXPECT_LT(rows[i][1], 1.0);
  }
  EXPECT_DOUBLE_EQ(rows[0][2], 0.3);
}

TEST_F(Cli, SimulateIsDeterministic) {
  ASSERT_EQ(run("simulate --map logistic --theta 3.8 --seed 9 -o " + path("a.csv")), 0);
  ASSERT_EQ(run("simulate --map logistic --theta 3.8 --seed 9 -o " + path("b.csv")), 0);
  ASSERT_EQ(run("simulate --map logistic --theta 3.8 --seed 10 -o " + path("c.csv")), 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_NE(slurp(path("a.csv")), slurp(path("c.csv")));
}

TEST_F(Cli, PrecisionControlsScatter) {
  auto scatter = [&](const std::string& nu) {
    EXPECT_EQ(run("simulate --map mp --theta 0.5 --n 500 --seed 1 --nu " + nu + " -o " + path("p.csv")), 0);
    double ss = 0.0;
    const auto rows = read_numeric_csv(path("p.csv"));
    for (const auto& r : rows) ss += (r[1] - r[2]) * (r[1] - r[2]);
    return ss / static_cast<double>(rows.size());
  };
  EXPECT_LT(scatter("120"), 0.25 * scatter("6"));
}

TEST_F(Cli, DensitySinglePointGrid) {
  ASSERT_EQ(run("density --map bernoulli --theta 3 --nu 15 --grid 1 -o " + path("d.csv")), 0);
  const auto rows = read_numeric_csv(path("d.csv"));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0][0], 0.5);
  EXPECT_GT(rows[0][1], 0.0);
}

TEST_F(Cli, DensityIsDeterministic) {
  const std::string args = "density --map mp --theta 0.5 --method orbit --orbit-length 20000 --grid 11 "
                           "--sample-size 2000 --bins 20 --seed 4";
  ASSERT_EQ(run(args + " -o " + path("a.csv") + " --histogram-output " + path("ha.csv")), 0);
  ASSERT_EQ(run(args + " -o " + path("b.csv") + " --histogram-output " + path("hb.csv")), 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_EQ(slurp(path("ha.csv")), slurp(path("hb.csv")));
  EXPECT_EQ(read_numeric_csv(path("ha.csv")).size(), 20u);
}

TEST_F(Cli, McSingleReplicateHasZeroSpread) {
  ASSERT_EQ(run("mc --preset table1 --replicates 1 -o " + path("mc")), 0);
  const auto j = nlohmann::json::parse(slurp(path("mc/summary.json")));
  ASSERT_EQ(j["cells"].size(), 27u);
  for (const auto& c : j["cells"]) EXPECT_EQ(c["sd"].get<double>(), 0.0);
  EXPECT_TRUE(fs::exists(path("mc/cell_00.csv")));
  EXPECT_TRUE(fs::exists(path("mc/cell_26.csv")));
}

TEST_F(Cli, McIsDeterministic) {
  std::ofstream(path("cfg.json"))
      << R"({"map":"bernoulli","map_params":[3,5],"u0s":[0.2314],"ns":[100],"nu":40,"replicates":6,"seed":11})";
  ASSERT_EQ(run("mc --config " + path("cfg.json") + " -o " + path("m1")), 0);
  ASSERT_EQ(run("mc --config " + path("cfg.json") + " -o " + path("m2")), 0);
  EXPECT_EQ(slurp(path("m1/summary.json")), slurp(path("m2/summary.json")));
  EXPECT_EQ(slurp(path("m1/cell_01.csv")), slurp(path("m2/cell_01.csv")));
}

TEST_F(Cli, FitRecoversSimulatedParameters) {
  ASSERT_EQ(run("simulate --map logistic --theta 3.9 --nu 40 --u0 0.3 --p 1 --phi 0.3 --alpha 0.2 "
                "--link-g logit --link-h identity --n 600 --seed 5 -o " + path("s.csv")),
            0);
  ASSERT_EQ(run("fit --data " + path("s.csv") + " --map logistic --theta 3.9 --p 1 --link-g logit "
                "--link-h identity --u0 0.3 --holdout 10 -o " + path("r.json")),
            0);
  const auto report = nlohmann::json::parse(slurp(path("r.json"))).get<betarc::RunReport>();
  EXPECT_EQ(report.n_fit, 590u);
  EXPECT_EQ(report.holdout, 10u);
  ASSERT_FALSE(report.models.empty());
  const auto& m = report.models[0];
  ASSERT_TRUE(m.out_of_sample.has_value());
  EXPECT_EQ(m.forecasts.size(), 10u);
  const std::vector<double> truth{40.0, 0.2, 0.3};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ASSERT_TRUE(std::isfinite(m.se[i])) << m.names[i];
    EXPECT_LT(std::abs(m.estimates[i] - truth[i]), 3.0 * m.se[i]) << m.names[i];
  }
}

TEST_F(Cli, FitOutputIsDeterministic) {
  ASSERT_EQ(run("simulate --map mp --theta 0.4 --nu 25 --n 150 --seed 2 -o " + path("s.csv")), 0);
  const std::string args = "fit --data " + path("s.csv") + " --map mp --theta 0.4 --p 1 --u0-grid 5 --holdout 5";
  ASSERT_EQ(run(args + " -o " + path("a.json")), 0);
  ASSERT_EQ(run(args + " -o " + path("b.json")), 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  const auto j = nlohmann::json::parse(slurp(path("a.json")));
  EXPECT_EQ(j["grid_size"], 5);
  EXPECT_EQ(j["u0_trace"].size(), 5u);
  EXPECT_FALSE(j.contains("timing_seconds"));
}
