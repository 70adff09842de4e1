#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <sys/wait.h>

#include "graphukf/config.hpp"
#include "graphukf/experiment.hpp"
#include "graphukf/noise.hpp"

using namespace graphukf;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int status;
  std::string output;
};

// Runs the CLI with stderr folded into stdout.
Outcome cli(const std::string& args) {
  const std::string command = std::string(GRAPHUKF_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string output;
  std::array<char, 4096> buffer{};
  while (std::size_t got = fread(buffer.data(), 1, buffer.size(), pipe)) output.append(buffer.data(), got);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, output};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("graphukf_it_" + name);
  fs::remove_all(dir);
  return dir;
}

const std::string kSmallRun =
    "run --scenario caseB1 --filters ukf,gsp-srukf,gsp-gr-srukf --seed 5 --trials 6 --steps 25 --n 6";

}  // namespace

TEST(Cli, RunWritesAllArtifacts) {
  auto dir = scratch("run");
  auto res = cli(kSmallRun + " --out " + dir.string());
  ASSERT_EQ(res.status, 0) << res.output;
  for (const char* f : {"rmse.csv", "armse.csv", "config.resolved", "graph.edges"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_NE(res.output.find("gsp-gr-srukf"), std::string::npos);
  auto resolved = load_config(dir / "config.resolved");
  EXPECT_EQ(resolved.m_trials, 6);
  EXPECT_EQ(resolved.d_steps, 25);
  EXPECT_EQ(resolved.noise_scenario, "caseB1");
  fs::remove_all(dir);
}

TEST(Cli, SameSeedGivesByteIdenticalCsv) {
  auto a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  ASSERT_EQ(cli(kSmallRun + " --out " + a.string()).status, 0);
  ASSERT_EQ(cli(kSmallRun + " --threads 2 --out " + b.string()).status, 0);
  ASSERT_EQ(cli(kSmallRun + " --serial --out " + c.string()).status, 0);
  for (const char* f : {"rmse.csv", "armse.csv", "graph.edges"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(c / f)) << f;
  }
  for (auto& d : {a, b, c}) fs::remove_all(d);
}

TEST(Cli, FlagsOverrideConfigFile) {
  auto dir = scratch("cfg");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "exp.ini");
    cfg << "[experiment]\nn = 5\nsteps = 10\ntrials = 2\nscenario = caseA1\nfilters = gsp-srukf\n";
  }
  auto res = cli("run --config " + (dir / "exp.ini").string() + " --steps 12 --out " +
                 (dir / "out").string());
  ASSERT_EQ(res.status, 0) << res.output;
  auto resolved = load_config(dir / "out" / "config.resolved");
  EXPECT_EQ(resolved.n, 5);
  EXPECT_EQ(resolved.d_steps, 12);
  EXPECT_EQ(resolved.noise_scenario, "caseA1");
  fs::remove_all(dir);
}

TEST(Cli, ErrorsAreMachineReadable) {
  auto res = cli("run --scenario caseZ --trials 1 --steps 2 --out " + scratch("err").string());
  EXPECT_NE(res.status, 0);
  EXPECT_NE(res.output.find("error kind=ConfigError"), std::string::npos) << res.output;
  auto bad_filter = cli("run --filters kalman --trials 1 --steps 2");
  EXPECT_NE(bad_filter.status, 0);
  EXPECT_NE(bad_filter.output.find("error kind=ConfigError"), std::string::npos);
  auto bad_graph = cli("graph --n 10 --model erdos_renyi --p 1e-9");
  EXPECT_NE(bad_graph.status, 0);
  EXPECT_NE(bad_graph.output.find("error kind=GenerationError"), std::string::npos);
}

TEST(Cli, GraphSubcommandRoundTrips) {
  auto dir = scratch("graph");
  fs::create_directories(dir);
  auto res = cli("graph --n 7 --model ring --out " + (dir / "ring.edges").string());
  ASSERT_EQ(res.status, 0) << res.output;
  auto topo = load_edge_list(dir / "ring.edges");
  EXPECT_EQ(topo.n(), 7);
  EXPECT_DOUBLE_EQ(topo.weights().sum(), 14.0);
  auto to_stdout = cli("graph --n 4 --model geometric --radius 0.9 --seed 3");
  ASSERT_EQ(to_stdout.status, 0);
  EXPECT_EQ(to_stdout.output.rfind("n 4", 0), 0u);
  fs::remove_all(dir);
}

TEST(Cli, AnalyzeReportsSpectralRadius) {
  auto res = cli("analyze --scenario caseA1 --steps 40 --n 6 --phi 0 --filter gsp-srukf");
  EXPECT_NE(res.output.find("spectral_radius="), std::string::npos) << res.output;
  if (res.status == 0) {
    EXPECT_NE(res.output.find("delta_diag="), std::string::npos);
    EXPECT_NE(res.output.find("residual="), std::string::npos);
  } else {
    EXPECT_NE(res.output.find("error kind=UnstableDynamicsError"), std::string::npos);
  }
}

// Raising the outlier rate of the caseB1 mixture from 1% to 5% hurts the
// non-robust spectral filter by a larger factor than the robust one.
TEST(Pipeline, OutlierRateHurtsNonRobustFilterMore) {
  auto mixture = [](double p) {
    return Mixture{{{1.0 - p, 0.0, 10.0}, {p, 0.0, 10000.0}}};
  };
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ExperimentConfig c;
    c.seed = seed;
    c.filters = {"gsp-ukf", "gsp-gr-srukf"};
    auto setup = prepare_experiment(c);
    std::array<std::array<double, 2>, 2> armse_by_rate{};
    for (int r = 0; r < 2; ++r) {
      setup.meas_noise = mixture(r == 0 ? 0.01 : 0.05);
      std::vector<Eigen::MatrixXd> truths;
      std::array<std::vector<Eigen::MatrixXd>, 2> est;
      for (int k = 0; k < c.m_trials; ++k) {
        auto out = run_trial(c, setup, k);
        if (out.failed[0] || out.failed[1]) continue;
        truths.push_back(out.truth);
        est[0].push_back(out.estimates[0]);
        est[1].push_back(out.estimates[1]);
      }
      for (int f = 0; f < 2; ++f) armse_by_rate[r][f] = armse(rmse_series(truths, est[f]));
    }
    const double ukf_ratio = armse_by_rate[1][0] / armse_by_rate[0][0];
    const double gr_ratio = armse_by_rate[1][1] / armse_by_rate[0][1];
    EXPECT_GT(ukf_ratio, gr_ratio) << "seed " << seed;
  }
}
