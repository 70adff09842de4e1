#include "graphukf/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>

#include <omp.h>

#include "graphukf/config.hpp"
#include "graphukf/errors.hpp"

namespace graphukf {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kInitStreamSalt = 0xD1B54A32D192ED03ULL;

Eigen::VectorXd rmse_from_squared_errors(const Eigen::VectorXd& sum_sq, int n, int trials) {
  if (trials == 0) return Eigen::VectorXd::Constant(sum_sq.size(), std::nan(""));
  return (sum_sq / (static_cast<double>(n) * trials)).cwiseSqrt();
}

template <class Loop>
RunResult aggregate(const ExperimentConfig& config, Loop&& run_all) {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentSetup setup = prepare_experiment(config);
  std::vector<TrialOutcome> outcomes(config.m_trials);
  run_all(setup, outcomes);

  const std::size_t filters = config.filters.size();
  RunResult result;
  result.filters = config.filters;
  result.topology = setup.topology;
  result.failures.assign(filters, 0);
  std::vector<Eigen::VectorXd> sum_sq(filters, Eigen::VectorXd::Zero(config.d_steps));
  for (int k = 0; k < config.m_trials; ++k) {
    result.trial_seeds.push_back(trial_seed(config.seed, k));
    const TrialOutcome& outcome = outcomes[k];
    for (std::size_t f = 0; f < filters; ++f) {
      if (outcome.failed[f]) {
        ++result.failures[f];
        continue;
      }
      sum_sq[f] += (outcome.truth - outcome.estimates[f]).rowwise().squaredNorm();
    }
  }
  for (std::size_t f = 0; f < filters; ++f) {
    result.rmse.push_back(
        rmse_from_squared_errors(sum_sq[f], config.n, config.m_trials - result.failures[f]));
    result.armse.push_back(armse(result.rmse.back()));
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n < 2 || d_steps < 1 || m_trials < 1) {
    throw ConfigError("experiment: n >= 2, steps >= 1 and trials >= 1 are required");
  }
  if (filters.empty()) throw ConfigError("experiment: no filters configured");
  if (!(init_var > 0.0) || !(r_nominal > 0.0) || !(q_var >= 0.0)) {
    throw ConfigError("experiment: init_var and r_nominal must be > 0, q_var >= 0");
  }
  if (threads < 0) throw ConfigError("experiment: threads must be >= 0");
  scenario_noise(noise_scenario);
  const UtParams ut(n, ut_alpha, ut_beta, ut_kappa);
  for (const auto& name : filters) {
    filter_preset(name, ut, losses, gsp_gain).validate(n);
  }
}

std::uint64_t trial_seed(std::uint64_t master, int trial) {
  return splitmix64(master + static_cast<std::uint64_t>(trial + 1) * 0x9E3779B97F4A7C15ULL);
}

Eigen::VectorXd rmse_series(const std::vector<Eigen::MatrixXd>& truths,
                            const std::vector<Eigen::MatrixXd>& estimates) {
  if (truths.size() != estimates.size() || truths.empty()) {
    throw ShapeError("rmse_series: need the same positive number of trials");
  }
  const Eigen::Index steps = truths.front().rows();
  const Eigen::Index n = truths.front().cols();
  Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(steps);
  for (std::size_t k = 0; k < truths.size(); ++k) {
    if (truths[k].rows() != steps || truths[k].cols() != n || estimates[k].rows() != steps ||
        estimates[k].cols() != n) {
      throw ShapeError("rmse_series: trial matrices differ in shape");
    }
    sum_sq += (truths[k] - estimates[k]).rowwise().squaredNorm();
  }
  return rmse_from_squared_errors(sum_sq, static_cast<int>(n), static_cast<int>(truths.size()));
}

double armse(const Eigen::VectorXd& series) {
  if (series.size() == 0) throw InputError("armse: empty series");
  return series.mean();
}

ExperimentSetup prepare_experiment(const ExperimentConfig& config) {
  config.validate();
  GraphTopology topology =
      generate_topology(config.n, config.graph_model, config.resolved_graph_seed());
  GftBasis basis = eigendecompose(build_laplacian(topology));
  StateSpaceModel model = benchmark_model(config.n, config.phi, config.q_var, config.r_nominal);
  const UtParams ut(config.n, config.ut_alpha, config.ut_beta, config.ut_kappa);
  std::vector<FilterConfig> filters;
  for (const auto& name : config.filters) {
    FilterConfig fc = filter_preset(name, ut, config.losses, config.gsp_gain);
    fc.irls_threshold = config.irls_threshold;
    fc.irls_max_iters = config.irls_max_iters;
    filters.push_back(std::move(fc));
  }
  return {std::move(topology),
          std::move(basis),
          std::move(model),
          Gaussian{0.0, config.q_var},
          scenario_noise(config.noise_scenario),
          std::move(filters)};
}

TrialOutcome run_trial(const ExperimentConfig& config, const ExperimentSetup& setup, int trial) {
  const std::uint64_t seed = trial_seed(config.seed, trial);
  const Eigen::VectorXd x0 = benchmark_initial_state(config.n);
  const Trajectory traj = simulate_trajectory(setup.model, setup.process_noise, setup.meas_noise,
                                              x0, config.d_steps, seed);
  Rng init_rng(splitmix64(seed ^ kInitStreamSalt));
  const Eigen::VectorXd x_init =
      x0 + sample_vector(Gaussian{0.0, config.init_var}, config.n, init_rng);
  const Eigen::MatrixXd p_init =
      config.init_var * Eigen::MatrixXd::Identity(config.n, config.n);

  TrialOutcome out;
  out.truth = traj.states;
  out.failed.assign(setup.filters.size(), false);
  for (std::size_t f = 0; f < setup.filters.size(); ++f) {
    const FilterConfig& fc = setup.filters[f];
    Eigen::MatrixXd estimates(config.d_steps, config.n);
    try {
      FilterState state = FilterState::make(x_init, p_init, fc.use_sqrt);
      for (int i = 0; i < config.d_steps; ++i) {
        state = step(state, traj.measurements.row(i).transpose(), setup.model, setup.basis, fc);
        estimates.row(i) = state.x_hat.transpose();
      }
    } catch (const Error&) {
      out.failed[f] = true;
    }
    if (!out.failed[f] && !estimates.allFinite()) out.failed[f] = true;
    out.estimates.push_back(std::move(estimates));
  }
  return out;
}

RunResult run_experiment(const ExperimentConfig& config) {
  return aggregate(config, [&config](const ExperimentSetup& setup,
                                     std::vector<TrialOutcome>& outcomes) {
    const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int k = 0; k < config.m_trials; ++k) {
      outcomes[k] = run_trial(config, setup, k);
    }
  });
}

RunResult run_experiment_serial(const ExperimentConfig& config) {
  return aggregate(config, [&config](const ExperimentSetup& setup,
                                     std::vector<TrialOutcome>& outcomes) {
    for (int k = 0; k < config.m_trials; ++k) {
      outcomes[k] = run_trial(config, setup, k);
    }
  });
}

StabilitySnapshot analyze_snapshot(const ExperimentConfig& config, const std::string& filter) {
  const ExperimentSetup setup = prepare_experiment(config);
  const UtParams ut(config.n, config.ut_alpha, config.ut_beta, config.ut_kappa);
  FilterConfig fc = filter_preset(filter, ut, config.losses, config.gsp_gain);
  fc.irls_threshold = config.irls_threshold;
  fc.irls_max_iters = config.irls_max_iters;

  const std::uint64_t seed = trial_seed(config.seed, 0);
  const Eigen::VectorXd x0 = benchmark_initial_state(config.n);
  const Trajectory traj = simulate_trajectory(setup.model, setup.process_noise, setup.meas_noise,
                                              x0, config.d_steps, seed);
  Rng init_rng(splitmix64(seed ^ kInitStreamSalt));
  FilterState state = FilterState::make(
      x0 + sample_vector(Gaussian{0.0, config.init_var}, config.n, init_rng),
      config.init_var * Eigen::MatrixXd::Identity(config.n, config.n), fc.use_sqrt);
  StepTrace trace;
  for (int i = 0; i < config.d_steps; ++i) {
    state = step(state, traj.measurements.row(i).transpose(), setup.model, setup.basis, fc, &trace);
  }

  const Eigen::MatrixXd v =
      fc.use_graph ? setup.basis.v : Eigen::MatrixXd::Identity(config.n, config.n).eval();
  const Eigen::MatrixXd jac = setup.model.f_jacobian
                                  ? (*setup.model.f_jacobian)(state.x_hat, state.time_index + 1)
                                  : finite_difference_jacobian(
                                        [&](const Eigen::VectorXd& x) {
                                          return setup.model.f(x, state.time_index + 1);
                                        },
                                        state.x_hat);
  StabilitySnapshot snap;
  snap.filter = filter;
  snap.dynamics = error_dynamics(v.transpose() * jac * v, trace.aug.h_v, trace.irls.k_gain,
                                 v.transpose() * setup.model.q_cov * v,
                                 v.transpose() * setup.model.r_cov_nominal * v);
  snap.spectral_radius = spectral_radius(snap.dynamics.a_mat);
  snap.stable = snap.spectral_radius < 1.0;
  if (snap.stable) {
    snap.delta = solve_lyapunov(snap.dynamics);
    snap.residual = lyapunov_residual(snap.dynamics, snap.delta);
  }
  return snap;
}

void emit_csv(const RunResult& result, const ExperimentConfig& config,
              const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  auto open = [](const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << std::setprecision(9);
    return out;
  };

  {
    std::ofstream out = open(dir / "rmse.csv");
    out << "step";
    for (const auto& name : result.filters) out << ',' << name;
    out << '\n';
    const Eigen::Index steps = result.rmse.empty() ? 0 : result.rmse.front().size();
    for (Eigen::Index i = 0; i < steps; ++i) {
      out << i + 1;
      for (const auto& series : result.rmse) out << ',' << series(i);
      out << '\n';
    }
    if (!out) throw IoError("failed writing rmse.csv");
  }
  {
    std::ofstream out = open(dir / "armse.csv");
    out << "filter,armse,failures\n";
    for (std::size_t f = 0; f < result.filters.size(); ++f) {
      out << result.filters[f] << ',' << result.armse[f] << ',' << result.failures[f] << '\n';
    }
    if (!out) throw IoError("failed writing armse.csv");
  }
  {
    std::ofstream out = open(dir / "config.resolved");
    write_config(config, out);
    if (!out) throw IoError("failed writing config.resolved");
  }
  save_edge_list(result.topology, dir / "graph.edges");
}

}  // namespace graphukf
