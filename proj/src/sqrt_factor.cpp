#include "graphukf/sqrt_factor.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "graphukf/errors.hpp"

namespace graphukf {

SqrtFactor::SqrtFactor(Eigen::MatrixXd lower) : s_(std::move(lower)) {
  if (s_.rows() != s_.cols()) {
    throw InputError("SqrtFactor: matrix must be square");
  }
  for (Eigen::Index j = 0; j < s_.cols(); ++j) {
    if (!(s_(j, j) >= 0.0)) {
      throw InputError("SqrtFactor: diagonal must be nonnegative");
    }
    for (Eigen::Index i = 0; i < j; ++i) {
      if (s_(i, j) != 0.0) throw InputError("SqrtFactor: matrix must be lower triangular");
    }
  }
}

SqrtFactor SqrtFactor::identity(int n) { return SqrtFactor(Eigen::MatrixXd::Identity(n, n)); }

SqrtFactor SqrtFactor::from_covariance(const Eigen::MatrixXd& p) {
  if (p.rows() != p.cols()) throw ShapeError("from_covariance: matrix must be square");
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (p + p.transpose()));
  if (llt.info() != Eigen::Success) {
    throw NumericalError("from_covariance: matrix is not positive definite");
  }
  return SqrtFactor(llt.matrixL().toDenseMatrix());
}

SqrtFactor qr_sqrt(const Eigen::MatrixXd& columns) {
  const Eigen::Index n = columns.rows();
  if (columns.cols() < n) {
    throw ShapeError("qr_sqrt: need at least as many columns as rows");
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(columns.transpose());
  Eigen::MatrixXd upper = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (upper(i, i) < 0.0) upper.row(i) *= -1.0;
  }
  return SqrtFactor(upper.transpose());
}

SqrtFactor rank1_update(const SqrtFactor& factor, const Eigen::VectorXd& v, double w,
                        UpdateSign sign) {
  const Eigen::Index n = factor.dim();
  if (v.size() != n) throw ShapeError("rank1_update: vector length does not match factor");
  if (!(w >= 0.0)) throw InputError("rank1_update: weight must be nonnegative");

  Eigen::MatrixXd l = factor.matrix();
  Eigen::VectorXd x = std::sqrt(w) * v;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lkk = l(k, k);
    const double xk = x(k);
    const Eigen::Index tail = n - k - 1;
    if (sign == UpdateSign::Plus) {
      const double r = std::hypot(lkk, xk);
      if (r == 0.0) continue;
      const double c = lkk / r;
      const double s = xk / r;
      l(k, k) = r;
      if (tail > 0) {
        const Eigen::VectorXd col = l.col(k).tail(tail);
        l.col(k).tail(tail) = c * col + s * x.tail(tail);
        x.tail(tail) = c * x.tail(tail) - s * col;
      }
    } else {
      const double r2 = (lkk - xk) * (lkk + xk);
      if (!(lkk > 0.0) || !(r2 > 0.0)) {
        throw DowndateFailure("rank1_update: downdate is not positive definite");
      }
      const double r = std::sqrt(r2);
      const double ch = lkk / r;
      const double sh = xk / r;
      l(k, k) = r;
      if (tail > 0) {
        const Eigen::VectorXd col = l.col(k).tail(tail);
        l.col(k).tail(tail) = ch * col - sh * x.tail(tail);
        x.tail(tail) = ch * x.tail(tail) - sh * col;
      }
    }
  }
  return SqrtFactor(std::move(l));
}

Eigen::MatrixXd reconstruct(const SqrtFactor& factor) {
  const Eigen::MatrixXd& s = factor.matrix();
  Eigen::MatrixXd p = s * s.transpose();
  return 0.5 * (p + p.transpose());
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& p) {
  if (p.rows() != p.cols()) throw ShapeError("psd_sqrt: matrix must be square");
  const Eigen::MatrixXd sym = 0.5 * (p + p.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(sym);
  if (llt.info() == Eigen::Success) return llt.matrixL().toDenseMatrix();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw NumericalError("psd_sqrt: matrix is not positive semidefinite");
  }
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace graphukf
