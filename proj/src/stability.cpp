#include "graphukf/stability.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "graphukf/errors.hpp"

namespace graphukf {

ErrorDynamics error_dynamics(const Eigen::MatrixXd& f_jacobian_v, const Eigen::MatrixXd& h_v,
                             const Eigen::MatrixXd& k_gain, const Eigen::MatrixXd& q_v,
                             const Eigen::MatrixXd& r_v) {
  const Eigen::Index n = f_jacobian_v.rows();
  auto square = [n](const Eigen::MatrixXd& m) { return m.rows() == n && m.cols() == n; };
  if (!square(f_jacobian_v) || !square(h_v) || !square(k_gain) || !square(q_v) || !square(r_v)) {
    throw ShapeError("error_dynamics: all matrices must be n x n");
  }
  const Eigen::MatrixXd contraction = Eigen::MatrixXd::Identity(n, n) - k_gain * h_v;
  ErrorDynamics out;
  out.a_mat = contraction * f_jacobian_v;
  const Eigen::MatrixXd b =
      contraction * q_v * contraction.transpose() + k_gain * r_v * k_gain.transpose();
  out.b_mat = 0.5 * (b + b.transpose());
  return out;
}

Eigen::MatrixXd finite_difference_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& fn, const Eigen::VectorXd& x,
    double step) {
  const Eigen::VectorXd f0 = fn(x);
  Eigen::MatrixXd jac(f0.size(), x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Eigen::VectorXd hi = x;
    Eigen::VectorXd lo = x;
    hi(k) += step;
    lo(k) -= step;
    jac.col(k) = (fn(hi) - fn(lo)) / (2.0 * step);
  }
  return jac;
}

double spectral_radius(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw ShapeError("spectral_radius: matrix must be square");
  if (a.rows() == 0) return 0.0;
  if (a.rows() <= 64) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
    if (solver.info() != Eigen::Success) {
      throw NumericalError("spectral_radius: eigensolver did not converge");
    }
    return solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  // Gelfand: rho(A) = lim ||A^k||^{1/k}, tracked through normalized powers.
  Eigen::MatrixXd power = a;
  double log_scale = 0.0;
  double previous = 0.0;
  double k = 1.0;
  for (int squarings = 0; squarings <= 60; ++squarings, k *= 2.0) {
    const double norm = power.norm();
    if (norm == 0.0) return 0.0;
    power /= norm;
    log_scale += std::log(norm);
    const double estimate = std::exp(log_scale / k);
    if (k > 1 && std::abs(estimate - previous) <= 1e-10 * std::max(1.0, estimate)) {
      return estimate;
    }
    previous = estimate;
    power = power * power;
    log_scale *= 2.0;
  }
  return previous;
}

Eigen::MatrixXd solve_lyapunov(const ErrorDynamics& dynamics) {
  const Eigen::MatrixXd& a = dynamics.a_mat;
  const Eigen::Index n = a.rows();
  if (a.cols() != n || dynamics.b_mat.rows() != n || dynamics.b_mat.cols() != n) {
    throw ShapeError("solve_lyapunov: A and B must be n x n");
  }
  if (spectral_radius(a) >= 1.0) {
    throw UnstableDynamicsError("solve_lyapunov: spectral radius of A is >= 1");
  }
  // Column-stacked vec: vec(A X A^T) = (A kron A) vec(X).
  Eigen::MatrixXd kron(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      kron.block(i * n, j * n, n, n) = a(i, j) * a;
    }
  }
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n * n, n * n) - kron;
  const Eigen::VectorXd vec_b = Eigen::Map<const Eigen::VectorXd>(dynamics.b_mat.data(), n * n);
  const Eigen::VectorXd vec_delta = system.partialPivLu().solve(vec_b);
  Eigen::MatrixXd delta = Eigen::Map<const Eigen::MatrixXd>(vec_delta.data(), n, n);
  return 0.5 * (delta + delta.transpose());
}

double lyapunov_residual(const ErrorDynamics& dynamics, const Eigen::MatrixXd& delta) {
  const Eigen::MatrixXd& a = dynamics.a_mat;
  return (delta - a * delta * a.transpose() - dynamics.b_mat).cwiseAbs().maxCoeff();
}

}  // namespace graphukf
