#include "graphukf/state_space.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "graphukf/errors.hpp"

namespace graphukf {

namespace {

void require_psd(const Eigen::MatrixXd& m, int n, const char* what) {
  if (m.rows() != n || m.cols() != n) {
    throw ShapeError(std::string(what) + ": expected an n x n matrix");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InputError(std::string(what) + ": matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw InputError(std::string(what) + ": matrix is not positive semidefinite");
  }
}

}  // namespace

void StateSpaceModel::validate() const {
  if (n < 1) throw InputError("StateSpaceModel: n must be positive");
  if (!f || !h) throw InputError("StateSpaceModel: f and h are required");
  require_psd(q_cov, n, "StateSpaceModel q_cov");
  require_psd(r_cov_nominal, n, "StateSpaceModel r_cov_nominal");
}

Eigen::VectorXd benchmark_f(const Eigen::VectorXd& x, int i) {
  const double forcing = 8.0 * std::cos(1.2 * static_cast<double>(i - 1));
  return x.unaryExpr([forcing](double v) { return 0.5 * v + 25.0 * v / (1.0 + v * v) + forcing; });
}

Eigen::MatrixXd benchmark_f_jacobian(const Eigen::VectorXd& x) {
  const Eigen::VectorXd d = x.unaryExpr([](double v) {
    const double s = 1.0 + v * v;
    return 0.5 + 25.0 * (1.0 - v * v) / (s * s);
  });
  return d.asDiagonal();
}

Eigen::VectorXd benchmark_h(const Eigen::VectorXd& x, double phi) {
  return x.unaryExpr([phi](double v) {
    double g = v + v * v;
    if (std::abs(g) < kMeasurementPoleGuard) g = g < 0.0 ? -kMeasurementPoleGuard : kMeasurementPoleGuard;
    return v + phi * std::sin(v) + phi / g;
  });
}

StateSpaceModel benchmark_model(int n, double phi, double q_var, double r_nominal) {
  StateSpaceModel model;
  model.n = n;
  model.f = [](const Eigen::VectorXd& x, int i) { return benchmark_f(x, i); };
  model.h = [phi](const Eigen::VectorXd& x) { return benchmark_h(x, phi); };
  model.q_cov = q_var * Eigen::MatrixXd::Identity(n, n);
  model.r_cov_nominal = r_nominal * Eigen::MatrixXd::Identity(n, n);
  model.f_jacobian = [](const Eigen::VectorXd& x, int) { return benchmark_f_jacobian(x); };
  return model;
}

Eigen::VectorXd benchmark_initial_state(int n) {
  return Eigen::VectorXd::LinSpaced(n, 0.5, 0.5 * n);
}

Trajectory simulate_trajectory(const StateSpaceModel& model, const NoiseSpec& process_noise,
                               const NoiseSpec& meas_noise, const Eigen::VectorXd& x0,
                               int steps, Rng& rng) {
  if (steps < 1) throw InputError("simulate_trajectory: need at least one step");
  if (x0.size() != model.n) throw ShapeError("simulate_trajectory: x0 has wrong length");
  validate(process_noise);
  validate(meas_noise);
  Trajectory traj{Eigen::MatrixXd(steps, model.n), Eigen::MatrixXd(steps, model.n), 0};
  Eigen::VectorXd x = x0;
  for (int i = 1; i <= steps; ++i) {
    x = model.f(x, i) + sample_vector(process_noise, model.n, rng);
    const Eigen::VectorXd y = model.h(x) + sample_vector(meas_noise, model.n, rng);
    traj.states.row(i - 1) = x.transpose();
    traj.measurements.row(i - 1) = y.transpose();
  }
  return traj;
}

Trajectory simulate_trajectory(const StateSpaceModel& model, const NoiseSpec& process_noise,
                               const NoiseSpec& meas_noise, const Eigen::VectorXd& x0,
                               int steps, std::uint64_t seed) {
  Rng rng(seed);
  Trajectory traj = simulate_trajectory(model, process_noise, meas_noise, x0, steps, rng);
  traj.seed = seed;
  return traj;
}

}  // namespace graphukf
