#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/LU>

namespace oracle {

// Plain additive-noise UKF (Wan & van der Merwe), full covariance, written
// independently of the library pipeline.
struct TextbookUkf {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, int)> f;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> h;
  Eigen::MatrixXd q;
  Eigen::MatrixXd r;
  double alpha = 1.0;
  double beta = 2.0;
  double kappa = 0.0;

  Eigen::VectorXd x;
  Eigen::MatrixXd p;
  int i = 0;

  void step(const Eigen::VectorXd& y) {
    const int n = static_cast<int>(x.size());
    const double lambda = alpha * alpha * (n + kappa) - n;
    const int count = 2 * n + 1;
    std::vector<double> wm(count, 0.5 / (n + lambda));
    std::vector<double> wc(count, 0.5 / (n + lambda));
    wm[0] = lambda / (n + lambda);
    wc[0] = wm[0] + 1.0 - alpha * alpha + beta;
    ++i;

    auto points = [&](const Eigen::VectorXd& m, const Eigen::MatrixXd& c) {
      Eigen::MatrixXd root = Eigen::LLT<Eigen::MatrixXd>(c).matrixL();
      root *= std::sqrt(n + lambda);
      std::vector<Eigen::VectorXd> pts;
      pts.push_back(m);
      for (int s = 0; s < n; ++s) pts.push_back(m + root.col(s));
      for (int s = 0; s < n; ++s) pts.push_back(m - root.col(s));
      return pts;
    };

    auto chi = points(x, p);
    std::vector<Eigen::VectorXd> fx;
    Eigen::VectorXd xp = Eigen::VectorXd::Zero(n);
    for (int s = 0; s < count; ++s) {
      fx.push_back(f(chi[s], i));
      xp += wm[s] * fx[s];
    }
    Eigen::MatrixXd pp = q;
    for (int s = 0; s < count; ++s) pp += wc[s] * (fx[s] - xp) * (fx[s] - xp).transpose();

    auto chi2 = points(xp, pp);
    std::vector<Eigen::VectorXd> hy;
    Eigen::VectorXd yp = Eigen::VectorXd::Zero(y.size());
    for (int s = 0; s < count; ++s) {
      hy.push_back(h(chi2[s]));
      yp += wm[s] * hy[s];
    }
    Eigen::MatrixXd pyy = r;
    Eigen::MatrixXd pxy = Eigen::MatrixXd::Zero(n, y.size());
    for (int s = 0; s < count; ++s) {
      pyy += wc[s] * (hy[s] - yp) * (hy[s] - yp).transpose();
      pxy += wc[s] * (chi2[s] - xp) * (hy[s] - yp).transpose();
    }
    Eigen::MatrixXd k = pxy * pyy.inverse();
    x = xp + k * (y - yp);
    p = pp - k * pyy * k.transpose();
  }
};

}  // namespace oracle
