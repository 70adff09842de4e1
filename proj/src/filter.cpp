#include "graphukf/filter.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "graphukf/errors.hpp"

namespace graphukf {

namespace {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Lower-triangular solve L^{-1} * b that reports a singular factor.
Eigen::MatrixXd lower_solve(const Eigen::MatrixXd& l, const Eigen::MatrixXd& b, const char* what) {
  const double scale = std::max(l.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  if (l.diagonal().minCoeff() <= 1e-14 * scale) {
    throw NumericalError(std::string(what) + ": factor is singular");
  }
  return l.triangularView<Eigen::Lower>().solve(b);
}

// Square-root covariance from weighted deviations plus an additive noise root:
// QR over the s >= 1 deviations, then a rank-1 correction for s = 0. A failed
// downdate falls back to re-factorizing the explicitly summed covariance.
SqrtFactor sqrt_covariance(const Eigen::MatrixXd& dev, const UtParams& ut,
                           const Eigen::MatrixXd& noise_root, bool* fallback) {
  const Eigen::Index n = dev.cols();
  const Eigen::Index points = dev.rows();
  Eigen::MatrixXd columns(n, (points - 1) + noise_root.cols());
  columns << std::sqrt(ut.wc()(1)) * dev.bottomRows(points - 1).transpose(), noise_root;
  SqrtFactor s = qr_sqrt(columns);
  const double wc0 = ut.wc()(0);
  if (wc0 == 0.0) return s;
  try {
    return rank1_update(s, dev.row(0).transpose(), std::abs(wc0),
                        wc0 > 0.0 ? UpdateSign::Plus : UpdateSign::Minus);
  } catch (const DowndateFailure&) {
    if (fallback) *fallback = true;
    const Eigen::MatrixXd p =
        dev.transpose() * ut.wc().asDiagonal() * dev + noise_root * noise_root.transpose();
    return SqrtFactor::from_covariance(p);
  }
}

}  // namespace

UtParams::UtParams(int n, double alpha_ut, double beta_ut, double kappa)
    : n_(n), alpha_ut_(alpha_ut), beta_ut_(beta_ut), kappa_(kappa) {
  if (n < 1) throw ConfigError("UtParams: n must be positive");
  eta_ = alpha_ut * alpha_ut * (n + kappa) - n;
  if (!(n + eta_ > 0.0)) throw ConfigError("UtParams: n + eta must be positive");
  const int points = 2 * n + 1;
  wm_ = Eigen::VectorXd::Constant(points, 1.0 / (2.0 * (n + eta_)));
  wc_ = wm_;
  wm_(0) = eta_ / (n + eta_);
  wc_(0) = wm_(0) + (1.0 - alpha_ut * alpha_ut + beta_ut);
}

void FilterConfig::validate(int n) const {
  if (!(irls_threshold > 0.0)) throw ConfigError("FilterConfig: irls_threshold must be > 0");
  if (irls_max_iters < 1) throw ConfigError("FilterConfig: irls_max_iters must be >= 1");
  if (ut.n() != n) throw ConfigError("FilterConfig: UT dimension does not match the model");
}

FilterState FilterState::make(const Eigen::VectorXd& x, const Eigen::MatrixXd& p, bool sqrt_form,
                              int time_index) {
  FilterState s;
  s.x_hat = x;
  s.sqrt_form = sqrt_form;
  s.time_index = time_index;
  if (sqrt_form) {
    s.cov_sqrt = SqrtFactor::from_covariance(p);
  } else {
    s.cov = symmetrize(p);
  }
  return s;
}

Eigen::MatrixXd FilterState::covariance() const {
  return sqrt_form ? reconstruct(cov_sqrt) : cov;
}

SqrtFactor FilterState::factor() const {
  return sqrt_form ? cov_sqrt : SqrtFactor::from_covariance(cov);
}

Eigen::MatrixXd sigma_points(const Eigen::VectorXd& x_hat, const SqrtFactor& sigma,
                             const UtParams& ut) {
  const int n = ut.n();
  if (x_hat.size() != n || sigma.dim() != n) {
    throw ShapeError("sigma_points: state, factor and UT dimensions disagree");
  }
  const Eigen::MatrixXd offset = ut.spread() * sigma.matrix();
  Eigen::MatrixXd points(2 * n + 1, n);
  points.row(0) = x_hat.transpose();
  for (int s = 0; s < n; ++s) {
    points.row(1 + s) = (x_hat + offset.col(s)).transpose();
    points.row(1 + n + s) = (x_hat - offset.col(s)).transpose();
  }
  return points;
}

Prediction predict(const FilterState& state, const StateSpaceModel& model, const UtParams& ut,
                   int time_index, bool sqrt_form) {
  const Eigen::MatrixXd chi = sigma_points(state.x_hat, state.factor(), ut);
  Eigen::MatrixXd propagated(chi.rows(), chi.cols());
  for (Eigen::Index s = 0; s < chi.rows(); ++s) {
    propagated.row(s) = model.f(chi.row(s).transpose(), time_index).transpose();
  }
  Prediction out;
  out.x_pred = propagated.transpose() * ut.wm();
  const Eigen::MatrixXd dev = propagated.rowwise() - out.x_pred.transpose();
  if (sqrt_form) {
    out.sigma_pred = sqrt_covariance(dev, ut, psd_sqrt(model.q_cov), &out.downdate_fallback);
  } else {
    out.p_pred = symmetrize(dev.transpose() * ut.wc().asDiagonal() * dev + model.q_cov);
    out.sigma_pred = SqrtFactor::from_covariance(out.p_pred);
  }
  return out;
}

MeasurementStats measurement_stats(const Prediction& prediction, const StateSpaceModel& model,
                                   const UtParams& ut, const Eigen::MatrixXd& v, bool sqrt_form) {
  const Eigen::MatrixXd chi = sigma_points(prediction.x_pred, prediction.sigma_pred, ut);
  Eigen::MatrixXd meas(chi.rows(), chi.cols());
  for (Eigen::Index s = 0; s < chi.rows(); ++s) {
    meas.row(s) = model.h(chi.row(s).transpose()).transpose();
  }
  MeasurementStats out;
  out.y_pred = meas.transpose() * ut.wm();
  out.y_pred_v = v.transpose() * out.y_pred;
  // Row s holds V^T (h(chi_s) - y_pred) and V^T (chi_s - x_pred).
  const Eigen::MatrixXd dy_v = (meas.rowwise() - out.y_pred.transpose()) * v;
  const Eigen::MatrixXd dx_v = (chi.rowwise() - prediction.x_pred.transpose()) * v;
  out.p_xy_v = dx_v.transpose() * ut.wm().asDiagonal() * dy_v;

  const Eigen::MatrixXd r_root_v = v.transpose() * psd_sqrt(model.r_cov_nominal);
  if (sqrt_form) {
    out.omega_v = sqrt_covariance(dy_v, ut, r_root_v, &out.downdate_fallback);
    out.p_yy_v = reconstruct(out.omega_v);
  } else {
    out.p_yy_v = symmetrize(dy_v.transpose() * ut.wc().asDiagonal() * dy_v +
                            r_root_v * r_root_v.transpose());
    out.omega_v = SqrtFactor::from_covariance(out.p_yy_v);
  }
  return out;
}

Eigen::MatrixXd AugmentedSystem::upsilon() const {
  const Eigen::Index n = psi.rows();
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  u.topLeftCorner(n, n) = psi;
  u.bottomRightCorner(n, n) = phi;
  return u;
}

AugmentedSystem build_augmented_system(const Prediction& prediction, const Eigen::VectorXd& y_obs,
                                       const MeasurementStats& stats,
                                       const Eigen::MatrixXd& r_cov, const Eigen::MatrixXd& v) {
  const Eigen::Index n = prediction.x_pred.size();
  if (y_obs.size() != n || v.rows() != n || v.cols() != n || r_cov.rows() != n ||
      stats.p_xy_v.rows() != n) {
    throw ShapeError("build_augmented_system: dimension mismatch");
  }
  AugmentedSystem aug;
  aug.x_pred_v = v.transpose() * prediction.x_pred;
  aug.y_pred_v = stats.y_pred_v;
  aug.y_obs_v = v.transpose() * y_obs;

  if (prediction.p_pred.size() > 0) {
    Eigen::LLT<Eigen::MatrixXd> llt(symmetrize(v.transpose() * prediction.p_pred * v));
    if (llt.info() != Eigen::Success) {
      throw NumericalError("build_augmented_system: predicted covariance is singular");
    }
    aug.psi = llt.matrixL();
  } else {
    aug.psi = qr_sqrt(v.transpose() * prediction.sigma_pred.matrix()).matrix();
  }
  Eigen::LLT<Eigen::MatrixXd> r_llt(symmetrize(v.transpose() * r_cov * v));
  if (r_llt.info() != Eigen::Success) {
    throw NumericalError("build_augmented_system: measurement covariance is singular");
  }
  aug.phi = r_llt.matrixL();

  // H = ((P^v)^{-1} P_xy^v)^T with P^v = psi psi^T.
  const Eigen::MatrixXd half = lower_solve(aug.psi, stats.p_xy_v, "build_augmented_system");
  aug.h_v = aug.psi.transpose().triangularView<Eigen::Upper>().solve(half).transpose();
  aug.z_v = aug.y_obs_v - aug.y_pred_v + aug.h_v * aug.x_pred_v;

  const Eigen::MatrixXd psi_inv =
      lower_solve(aug.psi, Eigen::MatrixXd::Identity(n, n), "build_augmented_system");
  aug.d.resize(2 * n);
  aug.d << psi_inv * aug.x_pred_v, lower_solve(aug.phi, aug.z_v, "build_augmented_system");
  aug.gamma_mat.resize(2 * n, n);
  aug.gamma_mat << psi_inv, lower_solve(aug.phi, aug.h_v, "build_augmented_system");
  return aug;
}

Eigen::MatrixXd kalman_gain(const Eigen::MatrixXd& p_bar, const Eigen::MatrixXd& h,
                            const Eigen::MatrixXd& r_bar, GainMode mode) {
  const Eigen::MatrixXd ph = p_bar * h.transpose();
  const Eigen::MatrixXd innovation = symmetrize(h * ph + r_bar);
  if (mode == GainMode::Diagonal) {
    const Eigen::VectorXd gains = ph.diagonal().cwiseQuotient(innovation.diagonal());
    if (!gains.allFinite()) throw NumericalError("kalman_gain: singular innovation diagonal");
    return gains.asDiagonal();
  }
  Eigen::LLT<Eigen::MatrixXd> llt(innovation);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("kalman_gain: innovation covariance is not positive definite");
  }
  return llt.solve(ph.transpose()).transpose();
}

IrlsResult irls_update(const AugmentedSystem& aug, const FilterConfig& config) {
  const Eigen::VectorXd innovation = aug.y_obs_v - aug.y_pred_v;
  IrlsResult out;
  Eigen::VectorXd x = aug.x_pred_v;
  for (int j = 1; j <= config.irls_max_iters; ++j) {
    const Eigen::VectorXd e = aug.d - aug.gamma_mat * x;
    out.weights = build_weight_matrix(config.loss, e);
    out.p_bar = aug.psi * out.weights.xi_x.cwiseInverse().asDiagonal() * aug.psi.transpose();
    out.r_bar = aug.phi * out.weights.xi_y.cwiseInverse().asDiagonal() * aug.phi.transpose();
    out.k_gain = kalman_gain(out.p_bar, aug.h_v, out.r_bar, config.gain_mode);
    const Eigen::VectorXd next = aug.x_pred_v + out.k_gain * innovation;
    out.iterations = j;
    if (!next.allFinite()) throw NumericalError("irls_update: non-finite estimate");

    const double change = (next - x).norm();
    const double scale = x.norm();
    x = next;
    // Unit weights do not depend on x, so one pass is the fixed point.
    if (config.loss.is_unit() || change <= config.irls_threshold * scale) {
      out.converged = true;
      break;
    }
  }
  out.x_post_v = x;
  return out;
}

SqrtFactor posterior_sqrt_update(const SqrtFactor& sigma_pred_v, const Eigen::MatrixXd& k_gain,
                                 const Eigen::MatrixXd& h_v, const Eigen::MatrixXd& r_bar) {
  const Eigen::Index n = sigma_pred_v.dim();
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - k_gain * h_v;
  const Eigen::MatrixXd gain_root = k_gain * psd_sqrt(r_bar);
  Eigen::MatrixXd columns(n, n + gain_root.cols());
  columns << a * sigma_pred_v.matrix(), gain_root;
  return qr_sqrt(columns);
}

FilterState step(const FilterState& state, const Eigen::VectorXd& y_obs,
                 const StateSpaceModel& model, const GftBasis& basis, const FilterConfig& config,
                 StepTrace* trace) {
  const int n = model.n;
  if (state.x_hat.size() != n || y_obs.size() != n) {
    throw ShapeError("step: state or measurement has the wrong length");
  }
  if (config.use_graph && basis.n() != n) {
    throw ShapeError("step: basis dimension does not match the model");
  }
  const Eigen::MatrixXd v =
      config.use_graph ? basis.v : Eigen::MatrixXd::Identity(n, n).eval();
  const bool sqrt_form = config.use_sqrt;

  Prediction pred = predict(state, model, config.ut, state.time_index + 1, sqrt_form);
  MeasurementStats stats = measurement_stats(pred, model, config.ut, v, sqrt_form);
  AugmentedSystem aug = build_augmented_system(pred, y_obs, stats, model.r_cov_nominal, v);
  IrlsResult irls = irls_update(aug, config);

  FilterState next;
  next.sqrt_form = sqrt_form;
  next.time_index = state.time_index + 1;
  next.x_hat = v * irls.x_post_v;
  if (sqrt_form) {
    const SqrtFactor post_v =
        posterior_sqrt_update(SqrtFactor(aug.psi), irls.k_gain, aug.h_v, irls.r_bar);
    next.cov_sqrt = qr_sqrt(v * post_v.matrix());
  } else {
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - irls.k_gain * aug.h_v;
    const Eigen::MatrixXd p_v = v.transpose() * pred.p_pred * v;
    const Eigen::MatrixXd post_v =
        a * p_v * a.transpose() + irls.k_gain * irls.r_bar * irls.k_gain.transpose();
    next.cov = symmetrize(v * post_v * v.transpose());
  }
  if (!next.x_hat.allFinite()) throw NumericalError("step: non-finite posterior estimate");

  if (trace) {
    trace->prediction = std::move(pred);
    trace->stats = std::move(stats);
    trace->aug = std::move(aug);
    trace->irls = std::move(irls);
  }
  return next;
}

const std::vector<std::string>& filter_variant_names() {
  static const std::vector<std::string> names{"ukf",           "gsp-ukf",
                                              "gsp-srukf",     "gsp-huber-srukf",
                                              "gsp-cauchy-srukf", "gsp-gr-srukf"};
  return names;
}

FilterConfig filter_preset(const std::string& name, const UtParams& ut, const LossDefaults& losses,
                           GainMode gsp_gain) {
  FilterConfig config;
  config.ut = ut;
  if (name == "ukf") {
    config.use_graph = false;
    config.use_sqrt = false;
    config.gain_mode = GainMode::Full;
    return config;
  }
  config.use_graph = true;
  config.gain_mode = gsp_gain;
  if (name == "gsp-ukf") {
    config.use_sqrt = false;
  } else if (name == "gsp-srukf") {
    config.use_sqrt = true;
  } else if (name == "gsp-huber-srukf") {
    config.loss = LossSpec(losses.huber);
  } else if (name == "gsp-cauchy-srukf") {
    config.loss = LossSpec(losses.cauchy);
  } else if (name == "gsp-gr-srukf") {
    config.loss = LossSpec(losses.general);
  } else {
    throw ConfigError("unknown filter variant '" + name + "'");
  }
  return config;
}

}  // namespace graphukf
