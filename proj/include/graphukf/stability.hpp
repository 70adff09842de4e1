#pragma once

#include <functional>

#include <Eigen/Core>

namespace graphukf {

/// Error recursion xi_i = A xi_{i-1} + w_i with steady covariance solving
/// delta = A delta A^T + B.
struct ErrorDynamics {
  Eigen::MatrixXd a_mat;  // (I - K H) F
  Eigen::MatrixXd b_mat;  // (I - K H) Q (I - K H)^T + K R K^T
};

ErrorDynamics error_dynamics(const Eigen::MatrixXd& f_jacobian_v, const Eigen::MatrixXd& h_v,
                             const Eigen::MatrixXd& k_gain, const Eigen::MatrixXd& q_v,
                             const Eigen::MatrixXd& r_v);

/// Central-difference Jacobian with step 1e-6.
Eigen::MatrixXd finite_difference_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& fn, const Eigen::VectorXd& x,
    double step = 1e-6);

/// Largest eigenvalue magnitude. Full eigensolve for n <= 64; above that,
/// ||A^k||^(1/k) over repeated squaring until it settles to 1e-10.
double spectral_radius(const Eigen::MatrixXd& a);

/// vec(delta) = (I - A kron A)^{-1} vec(B). Throws UnstableDynamicsError if
/// the spectral radius of A is >= 1.
Eigen::MatrixXd solve_lyapunov(const ErrorDynamics& dynamics);

/// max |delta - A delta A^T - B|
double lyapunov_residual(const ErrorDynamics& dynamics, const Eigen::MatrixXd& delta);

}  // namespace graphukf
