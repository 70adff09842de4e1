#include <cmath>

#include <gtest/gtest.h>
#include <Eigen/Eigenvalues>

#include "graphukf/errors.hpp"
#include "graphukf/stability.hpp"
#include "graphukf/state_space.hpp"
#include "oracles/lyapunov_iter.hpp"
#include "support/models.hpp"

using namespace graphukf;
using testing_support::max_abs;
using testing_support::random_matrix;
using testing_support::random_spd;
using testing_support::random_stable;

namespace {

Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

}  // namespace

TEST(ErrorDynamics, ZeroGain) {
  std::mt19937_64 rng(3);
  Eigen::MatrixXd f = random_matrix(3, 3, rng), h = random_matrix(3, 3, rng);
  Eigen::MatrixXd q = random_spd(3, rng), r = random_spd(3, rng);
  auto dyn = error_dynamics(f, h, Eigen::MatrixXd::Zero(3, 3), q, r);
  EXPECT_LE(max_abs(dyn.a_mat - f), 1e-15);
  EXPECT_LE(max_abs(dyn.b_mat - q), 1e-15);
}

TEST(ErrorDynamics, IdentityGainAndMeasurement) {
  std::mt19937_64 rng(5);
  Eigen::MatrixXd f = random_matrix(3, 3, rng), q = random_spd(3, rng), r = random_spd(3, rng);
  Eigen::MatrixXd i = Eigen::MatrixXd::Identity(3, 3);
  auto dyn = error_dynamics(f, i, i, q, r);
  EXPECT_LE(max_abs(dyn.a_mat), 1e-15);
  EXPECT_LE(max_abs(dyn.b_mat - r), 1e-15);
}

TEST(ErrorDynamics, ScalarHandComputation) {
  auto dyn = error_dynamics(scalar(0.5), scalar(1.0), scalar(0.5), scalar(1.0), scalar(1.0));
  EXPECT_DOUBLE_EQ(dyn.a_mat(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(dyn.b_mat(0, 0), 0.5);
}

TEST(ErrorDynamics, ShapeMismatch) {
  EXPECT_THROW(error_dynamics(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(3, 3),
                              Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2),
                              Eigen::MatrixXd::Identity(2, 2)),
               ShapeError);
}

TEST(FiniteDifference, MatchesAnalyticBenchmarkJacobian) {
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(6, -4.0, 3.0);
  auto fd = finite_difference_jacobian([](const Eigen::VectorXd& v) { return benchmark_f(v, 4); }, x);
  EXPECT_LE(max_abs(fd - benchmark_f_jacobian(x)), 1e-6);
}

TEST(SpectralRadius, Basics) {
  EXPECT_NEAR(spectral_radius(Eigen::MatrixXd::Identity(4, 4)), 1.0, 1e-12);
  EXPECT_NEAR(spectral_radius(Eigen::Vector2d(0.3, -0.9).asDiagonal().toDenseMatrix()), 0.9, 1e-12);
  Eigen::Matrix2d rot;
  rot << 0, -0.5, 0.5, 0;
  EXPECT_NEAR(spectral_radius(rot), 0.5, 1e-12);
  EXPECT_THROW(spectral_radius(Eigen::MatrixXd::Zero(2, 3)), ShapeError);
}

TEST(SpectralRadius, MatchesEigensolverIncludingLargeMatrices) {
  std::mt19937_64 rng(7);
  for (int n : {3, 10, 70, 90}) {
    Eigen::MatrixXd a = random_matrix(n, n, rng) / std::sqrt(double(n));
    const double ref = Eigen::EigenSolver<Eigen::MatrixXd>(a).eigenvalues().cwiseAbs().maxCoeff();
    EXPECT_NEAR(spectral_radius(a), ref, 1e-8 * (1 + ref)) << "n=" << n;
  }
}

TEST(Lyapunov, ZeroDynamics) {
  std::mt19937_64 rng(11);
  Eigen::MatrixXd b = random_spd(4, rng);
  auto delta = solve_lyapunov({Eigen::MatrixXd::Zero(4, 4), b});
  EXPECT_LE(max_abs(delta - b), 1e-14);
}

TEST(Lyapunov, ScalarGeometricSeries) {
  auto delta = solve_lyapunov({scalar(0.5), scalar(1.0)});
  EXPECT_NEAR(delta(0, 0), 4.0 / 3.0, 1e-14);
}

TEST(Lyapunov, MatchesFixedPointOnRandomStableSystems) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 8;
    ErrorDynamics dyn{random_stable(n, 0.9, rng), random_spd(n, rng)};
    auto delta = solve_lyapunov(dyn);
    auto ref = oracle::lyapunov_fixed_point(dyn.a_mat, dyn.b_mat);
    const double scale = 1.0 + max_abs(dyn.b_mat);
    EXPECT_LE(max_abs(delta - ref), 1e-8 * scale);
    EXPECT_LE(lyapunov_residual(dyn, delta), 1e-8 * scale);
    EXPECT_LE(max_abs(delta - delta.transpose()), 1e-10 * scale);
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(delta).eigenvalues()(0), -1e-10);
  }
}

TEST(Lyapunov, UnstableThrows) {
  EXPECT_THROW(solve_lyapunov({scalar(1.0), scalar(1.0)}), UnstableDynamicsError);
  EXPECT_THROW(solve_lyapunov({scalar(-1.5), scalar(1.0)}), UnstableDynamicsError);
  EXPECT_THROW(solve_lyapunov({Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(3, 3)}), ShapeError);
}
