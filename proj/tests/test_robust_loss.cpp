#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "graphukf/errors.hpp"
#include "graphukf/robust_loss.hpp"
#include "oracles/loss_reference.hpp"

using namespace graphukf;

namespace {

// Frozen from a 30-digit independent evaluation.
constexpr double kGeneralLossAt11 = 0.401923788646684059708830487741;
constexpr double kGeneralWeightAt11 = 0.649519052838328985072792378065;

std::vector<LossSpec> gradient_specs() {
  return {GeneralRobust{-1.0, 1.1}, GeneralRobust{2.0, 1.1},  GeneralRobust{1.0, 0.7},
          GeneralRobust{0.0, 1.1},  GeneralRobust{0.5, 2.0},  GeneralRobust{-2.0, 1.1},
          GeneralRobust{-1e7, 1.1}, Huber{1.1},               Cauchy{1.1},
          Cauchy{0.4},              UnitLoss{}};
}

}  // namespace

TEST(LossValue, ZeroResidualIsZero) {
  for (const auto& spec : gradient_specs()) EXPECT_EQ(loss_value(spec, 0.0), 0.0) << spec.describe();
}

TEST(LossValue, GeneralRobustReferencePoint) {
  const LossSpec spec = GeneralRobust{-1.0, 1.1};
  EXPECT_NEAR(loss_value(spec, 1.1), kGeneralLossAt11, 1e-15);
  EXPECT_NEAR(weight(spec, 1.1), kGeneralWeightAt11, 1e-15);
}

TEST(LossValue, GeneralRobustMatchesMultiprecision) {
  for (double beta : {-3.0, -1.0, -0.25, 0.5, 1.0, 1.5, 3.0}) {
    for (double c : {-7.0, -1.3, -0.01, 0.2, 1.1, 4.0, 9.5}) {
      const LossSpec spec = GeneralRobust{beta, 1.1};
      const double ref = oracle::general_loss(beta, 1.1, c).convert_to<double>();
      EXPECT_NEAR(loss_value(spec, c), ref, 1e-13 * (1.0 + std::abs(ref)))
          << "beta=" << beta << " c=" << c;
      const double wref = oracle::general_weight(beta, 1.1, c).convert_to<double>();
      EXPECT_NEAR(weight(spec, c), wref, 1e-13) << "beta=" << beta << " c=" << c;
    }
  }
}

TEST(LossValue, LimitBranches) {
  const double c = 1.7, g = 1.1, x2 = (c / g) * (c / g);
  EXPECT_DOUBLE_EQ(loss_value(GeneralRobust{2.0, g}, c), 0.5 * x2);
  EXPECT_DOUBLE_EQ(loss_value(GeneralRobust{0.0, g}, c), std::log(0.5 * x2 + 1.0));
  EXPECT_DOUBLE_EQ(loss_value(GeneralRobust{-1e6, g}, c), 1.0 - std::exp(-0.5 * x2));
  EXPECT_DOUBLE_EQ(loss_value(GeneralRobust{-std::numeric_limits<double>::infinity(), g}, c),
                   1.0 - std::exp(-0.5 * x2));
  EXPECT_DOUBLE_EQ(loss_value(UnitLoss{}, c), 0.5 * c * c);
}

TEST(LossValue, BetaLimitContinuity) {
  for (double c : {-2.0, -1.0, 0.3, 2.0}) {
    const double quad = loss_value(GeneralRobust{2.0, 1.1}, c);
    EXPECT_NEAR(loss_value(GeneralRobust{2.0 + 1e-8, 1.1}, c), quad, 1e-6);
    EXPECT_NEAR(loss_value(GeneralRobust{2.0 - 1e-8, 1.1}, c), quad, 1e-6);
  }
  for (double c : {-5.0, -1.0, 0.3, 2.0, 8.0}) {
    const double lg = loss_value(GeneralRobust{0.0, 1.1}, c);
    EXPECT_NEAR(loss_value(GeneralRobust{1e-8, 1.1}, c), lg, 1e-6);
    EXPECT_NEAR(loss_value(GeneralRobust{-1e-8, 1.1}, c), lg, 1e-6);
  }
}

// Near beta = 2 the gap to the quadratic branch is eps*u*(log(u/eps) - 1)/4 to first order,
// with u = (c/gamma)^2, so it grows past 1e-6 for large residuals.
TEST(LossValue, BetaLimitGapMatchesFirstOrderTerm) {
  const double eps = 1e-8;
  for (double c : {-10.0, -5.0, 4.0, 8.0}) {
    const double u = (c / 1.1) * (c / 1.1);
    const double expected = eps * u * (std::log(u / eps) - 1.0) / 4.0;
    const double gap = loss_value(GeneralRobust{2.0 + eps, 1.1}, c) -
                       loss_value(GeneralRobust{2.0, 1.1}, c);
    EXPECT_NEAR(gap, expected, 0.05 * expected) << "c = " << c;
  }
}

TEST(LossValue, HuberBranches) {
  const LossSpec spec = Huber{1.1};
  EXPECT_DOUBLE_EQ(loss_value(spec, 0.5), 0.125);
  EXPECT_DOUBLE_EQ(loss_value(spec, -3.0), 1.1 * 3.0 - 0.5 * 1.21);
}

TEST(LossValue, NonFiniteResidualThrows) {
  EXPECT_THROW(loss_value(Huber{1.0}, std::nan("")), InputError);
  EXPECT_THROW(loss_value(UnitLoss{}, std::numeric_limits<double>::infinity()), InputError);
}

TEST(LossSpec, RejectsNonPositiveScale) {
  EXPECT_THROW(LossSpec(GeneralRobust{-1.0, 0.0}), InputError);
  EXPECT_THROW(LossSpec(Huber{-1.0}), InputError);
  EXPECT_THROW(LossSpec(Cauchy{0.0}), InputError);
  EXPECT_TRUE(LossSpec{}.is_unit());
  EXPECT_FALSE(LossSpec(Huber{}).is_unit());
}

TEST(Weight, UnitIsOne) {
  for (double c : {-100.0, 0.0, 3.0, 1e9}) EXPECT_EQ(weight(UnitLoss{}, c), 1.0);
}

TEST(Weight, HuberPiecewise) {
  EXPECT_DOUBLE_EQ(weight(Huber{1.1}, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(weight(Huber{1.1}, 2.2), 0.5);
  EXPECT_DOUBLE_EQ(weight(Huber{1.1}, -2.2), 0.5);
}

TEST(Weight, NormalizedAtZero) {
  for (const auto& spec : gradient_specs()) EXPECT_DOUBLE_EQ(weight(spec, 0.0), 1.0) << spec.describe();
}

TEST(Weight, GradientConsistency) {
  const double h = 1e-6;
  for (const auto& spec : gradient_specs()) {
    const double w0 = raw_weight(spec, 0.0);
    const auto* huber = std::get_if<Huber>(&spec.variant());
    for (int k = -1000; k <= 1000; ++k) {
      const double c = 0.01 * k;
      if (huber && std::abs(std::abs(c) - huber->sigma) < 2 * h) continue;
      const double fd = (loss_value(spec, c + h) - loss_value(spec, c - h)) / (2 * h);
      const double analytic = weight(spec, c) * c * w0;
      EXPECT_LE(std::abs(analytic - fd), 1e-6 * (1.0 + std::abs(fd)))
          << spec.describe() << " c=" << c;
    }
  }
}

TEST(Weight, MonotoneDownweighting) {
  for (double beta : {1.5, 1.0, 0.0, -1.0, -5.0, -1e7}) {
    const LossSpec spec = GeneralRobust{beta, 1.1};
    double prev = weight(spec, 0.0);
    for (int k = 1; k <= 2000; ++k) {
      const double w = weight(spec, 0.01 * k);
      EXPECT_LE(w, prev) << "beta=" << beta;
      EXPECT_GT(w, 0.0);
      prev = w;
    }
  }
}

TEST(WeightMatrix, UnitAndZeroResidual) {
  Eigen::VectorXd e(6);
  e << 1, -50, 3, 0.2, 1e3, -7;
  auto w = build_weight_matrix(UnitLoss{}, e);
  EXPECT_EQ(w.xi_x, Eigen::VectorXd::Ones(3));
  EXPECT_EQ(w.xi_y, Eigen::VectorXd::Ones(3));
  auto z = build_weight_matrix(GeneralRobust{}, Eigen::VectorXd::Zero(6));
  EXPECT_EQ(z.dense(), Eigen::MatrixXd::Identity(6, 6));
}

TEST(WeightMatrix, HuberElementwise) {
  auto w = build_weight_matrix(Huber{1.1}, Eigen::Vector2d(0.0, 2.2));
  EXPECT_DOUBLE_EQ(w.xi_x(0), 1.0);
  EXPECT_DOUBLE_EQ(w.xi_y(0), 0.5);
}

TEST(WeightMatrix, EntriesInUnitInterval) {
  Eigen::VectorXd e = Eigen::VectorXd::LinSpaced(20, -1e8, 1e8);
  for (const auto& spec : gradient_specs()) {
    auto w = build_weight_matrix(spec, e);
    EXPECT_GE(w.xi_x.minCoeff(), kMinWeight);
    EXPECT_LE(w.xi_x.maxCoeff(), 1.0);
    EXPECT_GE(w.xi_y.minCoeff(), kMinWeight);
    EXPECT_LE(w.xi_y.maxCoeff(), 1.0);
  }
}

TEST(WeightMatrix, OddLengthThrows) {
  EXPECT_THROW(build_weight_matrix(UnitLoss{}, Eigen::VectorXd::Zero(3)), ShapeError);
}
