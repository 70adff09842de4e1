#pragma once

#include <Eigen/Core>

namespace graphukf {

/// Lower-triangular square root S of a covariance, P = S * S^T, with a
/// nonnegative diagonal.
class SqrtFactor {
 public:
  SqrtFactor() = default;
  /// Throws InputError unless `lower` is square, lower triangular and has a
  /// nonnegative diagonal.
  explicit SqrtFactor(Eigen::MatrixXd lower);

  static SqrtFactor identity(int n);
  /// Cholesky factor of a symmetric positive definite matrix; throws
  /// NumericalError otherwise.
  static SqrtFactor from_covariance(const Eigen::MatrixXd& p);

  const Eigen::MatrixXd& matrix() const { return s_; }
  int dim() const { return static_cast<int>(s_.rows()); }

 private:
  Eigen::MatrixXd s_;
};

enum class UpdateSign { Plus, Minus };

/// Triangular S with S * S^T = columns * columns^T, from a QR factorization
/// of columns^T. Requires columns.cols() >= columns.rows().
SqrtFactor qr_sqrt(const Eigen::MatrixXd& columns);

/// R with R * R^T = S * S^T +/- w * v * v^T via a Givens (update) or
/// hyperbolic (downdate) sweep. A downdate that loses positive definiteness
/// throws DowndateFailure.
SqrtFactor rank1_update(const SqrtFactor& factor, const Eigen::VectorXd& v, double w,
                        UpdateSign sign);

/// S * S^T
Eigen::MatrixXd reconstruct(const SqrtFactor& factor);

/// Some square root M of a symmetric PSD matrix (M * M^T = p). Uses Cholesky
/// when p is definite and a symmetric eigen square root otherwise, so the
/// result is not necessarily triangular.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& p);

}  // namespace graphukf
