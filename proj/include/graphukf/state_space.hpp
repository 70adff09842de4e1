#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include <Eigen/Core>

#include "graphukf/noise.hpp"

namespace graphukf {

/// x_i = f(x_{i-1}, i) + q_i,  y_i = h(x_i) + r_i.
struct StateSpaceModel {
  using Transition = std::function<Eigen::VectorXd(const Eigen::VectorXd&, int)>;
  using Measurement = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  using Jacobian = std::function<Eigen::MatrixXd(const Eigen::VectorXd&, int)>;

  int n = 0;
  Transition f;
  Measurement h;
  Eigen::MatrixXd q_cov;
  Eigen::MatrixXd r_cov_nominal;
  /// Optional analytic df/dx; finite differences are used when absent.
  std::optional<Jacobian> f_jacobian;

  /// Throws ShapeError / InputError on inconsistent sizes or non-PSD covariances.
  void validate() const;
};

inline constexpr double kMeasurementPoleGuard = 1e-6;

/// Elementwise x/2 + 25x/(1+x^2) + 8 cos(1.2 (i-1)).
Eigen::VectorXd benchmark_f(const Eigen::VectorXd& x, int i);
/// Elementwise d/dx of benchmark_f (diagonal matrix).
Eigen::MatrixXd benchmark_f_jacobian(const Eigen::VectorXd& x);
/// Elementwise x + phi sin(x) + phi / g(x), g = x + x^2 with |g| clamped to
/// kMeasurementPoleGuard (sign kept; g == 0 maps to +guard).
Eigen::VectorXd benchmark_h(const Eigen::VectorXd& x, double phi);

/// Benchmark model with Q = q_var * I and nominal R = r_nominal * I.
StateSpaceModel benchmark_model(int n, double phi, double q_var = 0.01, double r_nominal = 10.0);

/// Initial true state x_{0,k} = 0.5 k, k = 1..n.
Eigen::VectorXd benchmark_initial_state(int n);

struct Trajectory {
  Eigen::MatrixXd states;        // D x n, row i-1 holds x_i
  Eigen::MatrixXd measurements;  // D x n, row i-1 holds y_i
  std::uint64_t seed = 0;
};

Trajectory simulate_trajectory(const StateSpaceModel& model, const NoiseSpec& process_noise,
                               const NoiseSpec& meas_noise, const Eigen::VectorXd& x0,
                               int steps, std::uint64_t seed);

/// Same recursion drawing from a caller-owned generator.
Trajectory simulate_trajectory(const StateSpaceModel& model, const NoiseSpec& process_noise,
                               const NoiseSpec& meas_noise, const Eigen::VectorXd& x0,
                               int steps, Rng& rng);

}  // namespace graphukf
