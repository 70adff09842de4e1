#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "graphukf/filter.hpp"
#include "graphukf/graph.hpp"
#include "graphukf/stability.hpp"

namespace graphukf {

struct ExperimentConfig {
  int n = 10;
  int d_steps = 100;
  int m_trials = 100;
  std::uint64_t seed = 1;

  TopologyModel graph_model = ErdosRenyi{0.5};
  std::optional<std::uint64_t> graph_seed;  // master seed when unset

  double phi = 1.0;
  double q_var = 0.01;
  double r_nominal = 10.0;
  double init_var = 4.0;
  std::string noise_scenario = "caseB1";
  std::vector<std::string> filters{"ukf", "gsp-ukf", "gsp-srukf", "gsp-huber-srukf",
                                   "gsp-cauchy-srukf", "gsp-gr-srukf"};
  LossDefaults losses;
  double ut_alpha = 1.0;
  double ut_beta = 2.0;
  double ut_kappa = 0.0;
  double irls_threshold = 1e-6;
  int irls_max_iters = 50;
  GainMode gsp_gain = GainMode::Full;

  int threads = 0;  // 0: OpenMP default
  std::filesystem::path out_dir = "results";

  /// Throws ConfigError on non-positive counts or unknown names.
  void validate() const;
  std::uint64_t resolved_graph_seed() const { return graph_seed.value_or(seed); }
};

struct RunResult {
  std::vector<std::string> filters;
  std::vector<Eigen::VectorXd> rmse;  // one D-series per filter
  std::vector<double> armse;
  std::vector<int> failures;
  std::vector<std::uint64_t> trial_seeds;
  double wall_seconds = 0.0;
  GraphTopology topology{Eigen::MatrixXd::Zero(1, 1)};
};

/// Per-trial generator seed: splitmix64 of master + (k + 1) * golden ratio.
std::uint64_t trial_seed(std::uint64_t master, int trial);

/// RMSE(i) = sqrt( (1/N)(1/M) sum_k ||x_i^k - xhat_i^k||^2 ); each entry of
/// `truths` / `estimates` is one trial's D x N matrix.
Eigen::VectorXd rmse_series(const std::vector<Eigen::MatrixXd>& truths,
                            const std::vector<Eigen::MatrixXd>& estimates);

/// Mean of the series; throws InputError when empty.
double armse(const Eigen::VectorXd& series);

/// Estimates of every configured filter on one trajectory. A filter that
/// throws a library error or produces a non-finite estimate is marked failed.
struct TrialOutcome {
  Eigen::MatrixXd truth;                   // D x n
  std::vector<Eigen::MatrixXd> estimates;  // per filter, D x n
  std::vector<bool> failed;
};

struct ExperimentSetup {
  GraphTopology topology;
  GftBasis basis;
  StateSpaceModel model;
  NoiseSpec process_noise;
  NoiseSpec meas_noise;
  std::vector<FilterConfig> filters;
};

ExperimentSetup prepare_experiment(const ExperimentConfig& config);
TrialOutcome run_trial(const ExperimentConfig& config, const ExperimentSetup& setup, int trial);

/// Trials run on an OpenMP worker pool; aggregation is in trial order, so the
/// result is identical for any thread count.
RunResult run_experiment(const ExperimentConfig& config);

/// Single-threaded reference used to check run_experiment.
RunResult run_experiment_serial(const ExperimentConfig& config);

/// Linearized error dynamics of one filter at the end of trial 0: gain and
/// H^v from the final step, F^v from the transition Jacobian at the final
/// estimate. `delta` and `residual` are set only when spectral_radius < 1.
struct StabilitySnapshot {
  std::string filter;
  ErrorDynamics dynamics;
  double spectral_radius = 0.0;
  bool stable = false;
  Eigen::MatrixXd delta;
  double residual = 0.0;
};

StabilitySnapshot analyze_snapshot(const ExperimentConfig& config, const std::string& filter);

/// Writes rmse.csv, armse.csv, config.resolved and graph.edges into `dir`.
void emit_csv(const RunResult& result, const ExperimentConfig& config,
              const std::filesystem::path& dir);

}  // namespace graphukf
