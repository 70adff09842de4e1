#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "graphukf/graph.hpp"
#include "graphukf/robust_loss.hpp"
#include "graphukf/sqrt_factor.hpp"
#include "graphukf/state_space.hpp"

namespace graphukf {

/// Scaled unscented-transform parameters and the weights they induce for an
/// n-dimensional state.
class UtParams {
 public:
  /// Throws ConfigError when n + eta <= 0.
  UtParams(int n, double alpha_ut = 1.0, double beta_ut = 2.0, double kappa = 0.0);

  int n() const { return n_; }
  double alpha_ut() const { return alpha_ut_; }
  double beta_ut() const { return beta_ut_; }
  double kappa() const { return kappa_; }
  double eta() const { return eta_; }
  /// sqrt(n + eta), the sigma-point spread.
  double spread() const { return std::sqrt(n_ + eta_); }
  const Eigen::VectorXd& wm() const { return wm_; }
  const Eigen::VectorXd& wc() const { return wc_; }

 private:
  int n_;
  double alpha_ut_;
  double beta_ut_;
  double kappa_;
  double eta_;
  Eigen::VectorXd wm_;
  Eigen::VectorXd wc_;
};

enum class GainMode { Full, Diagonal };

struct FilterConfig {
  bool use_graph = true;
  bool use_sqrt = true;
  LossSpec loss;
  GainMode gain_mode = GainMode::Full;
  double irls_threshold = 1e-6;
  int irls_max_iters = 50;
  UtParams ut{1};

  /// Throws ConfigError on a non-positive threshold, iteration cap, or a UT
  /// dimension different from n.
  void validate(int n) const;
};

/// Posterior estimate in the vertex domain. Square-root filters carry
/// `cov_sqrt`; full-covariance filters carry `cov`.
struct FilterState {
  Eigen::VectorXd x_hat;
  SqrtFactor cov_sqrt;
  Eigen::MatrixXd cov;
  bool sqrt_form = true;
  int time_index = 0;

  static FilterState make(const Eigen::VectorXd& x, const Eigen::MatrixXd& p, bool sqrt_form,
                          int time_index = 0);
  Eigen::MatrixXd covariance() const;
  /// Cholesky-style factor of the covariance regardless of representation.
  SqrtFactor factor() const;
};

/// Rows are sigma points: 0 is x_hat, 1..n add spread * S columns, n+1..2n
/// subtract them.
Eigen::MatrixXd sigma_points(const Eigen::VectorXd& x_hat, const SqrtFactor& sigma,
                             const UtParams& ut);

struct Prediction {
  Eigen::VectorXd x_pred;
  SqrtFactor sigma_pred;
  Eigen::MatrixXd p_pred;  // filled in full-covariance mode
  bool downdate_fallback = false;
};

/// Unscented time update. `time_index` is the index of the predicted step.
Prediction predict(const FilterState& state, const StateSpaceModel& model, const UtParams& ut,
                   int time_index, bool sqrt_form);

struct MeasurementStats {
  Eigen::VectorXd y_pred;    // vertex domain
  Eigen::VectorXd y_pred_v;  // spectral domain
  Eigen::MatrixXd p_xy_v;
  SqrtFactor omega_v;        // square root of the spectral innovation covariance
  Eigen::MatrixXd p_yy_v;
  bool downdate_fallback = false;
};

MeasurementStats measurement_stats(const Prediction& prediction, const StateSpaceModel& model,
                                   const UtParams& ut, const Eigen::MatrixXd& v, bool sqrt_form);

/// Whitened regression d = Gamma * x + e built in the spectral domain.
struct AugmentedSystem {
  Eigen::VectorXd d;          // 2n
  Eigen::MatrixXd gamma_mat;  // 2n x n
  Eigen::MatrixXd psi;        // lower factor of P_pred^v
  Eigen::MatrixXd phi;        // lower factor of R^v
  Eigen::MatrixXd h_v;
  Eigen::VectorXd x_pred_v;
  Eigen::VectorXd y_pred_v;
  Eigen::VectorXd y_obs_v;
  Eigen::VectorXd z_v;

  int n() const { return static_cast<int>(x_pred_v.size()); }
  /// Block-diagonal [psi 0; 0 phi].
  Eigen::MatrixXd upsilon() const;
};

/// Throws NumericalError if P_pred^v or R^v is singular.
AugmentedSystem build_augmented_system(const Prediction& prediction, const Eigen::VectorXd& y_obs,
                                       const MeasurementStats& stats,
                                       const Eigen::MatrixXd& r_cov, const Eigen::MatrixXd& v);

struct IrlsResult {
  Eigen::VectorXd x_post_v;
  Eigen::MatrixXd k_gain;
  Eigen::MatrixXd p_bar;
  Eigen::MatrixXd r_bar;
  WeightMatrix weights;
  int iterations = 0;
  bool converged = false;
};

/// Gain for a given modified prior covariance and measurement covariance.
Eigen::MatrixXd kalman_gain(const Eigen::MatrixXd& p_bar, const Eigen::MatrixXd& h,
                            const Eigen::MatrixXd& r_bar, GainMode mode);

IrlsResult irls_update(const AugmentedSystem& aug, const FilterConfig& config);

/// Square root of (I - K H) P (I - K H)^T + K R_bar K^T from a QR of the
/// stacked block [(I - K H) Sigma, K sqrt(R_bar)].
SqrtFactor posterior_sqrt_update(const SqrtFactor& sigma_pred_v, const Eigen::MatrixXd& k_gain,
                                 const Eigen::MatrixXd& h_v, const Eigen::MatrixXd& r_bar);

/// Per-step diagnostics; optional output of step().
struct StepTrace {
  Prediction prediction;
  MeasurementStats stats;
  AugmentedSystem aug;
  IrlsResult irls;
};

/// One full filter cycle: predict, measurement statistics, augmented system,
/// IRLS update, posterior covariance, back-transform to the vertex domain.
/// With config.use_graph false the identity basis replaces `basis`.
FilterState step(const FilterState& state, const Eigen::VectorXd& y_obs,
                 const StateSpaceModel& model, const GftBasis& basis, const FilterConfig& config,
                 StepTrace* trace = nullptr);

/// Variant names: ukf, gsp-ukf, gsp-srukf, gsp-huber-srukf, gsp-cauchy-srukf,
/// gsp-gr-srukf.
const std::vector<std::string>& filter_variant_names();

struct LossDefaults {
  GeneralRobust general{};
  Huber huber{};
  Cauchy cauchy{};
};

/// Preset configuration for a named variant: `ukf` is vertex-domain with a
/// full gain; the gsp-* variants work in the graph spectral domain with
/// `gsp_gain`. Throws ConfigError for unknown names.
FilterConfig filter_preset(const std::string& name, const UtParams& ut,
                           const LossDefaults& losses = {},
                           GainMode gsp_gain = GainMode::Full);

}  // namespace graphukf
