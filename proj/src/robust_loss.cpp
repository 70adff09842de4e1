#include "graphukf/robust_loss.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "graphukf/errors.hpp"

namespace graphukf {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double general_loss(const GeneralRobust& p, double c) {
  const double x2 = (c / p.gamma) * (c / p.gamma);
  if (p.beta == 2.0) return 0.5 * x2;
  if (p.beta == 0.0) return std::log1p(0.5 * x2);
  if (p.beta <= kWelschShapeCutoff) return -std::expm1(-0.5 * x2);
  const double b = std::abs(p.beta - 2.0);
  return b / p.beta * std::expm1(0.5 * p.beta * std::log1p(x2 / b));
}

// Normalized weight (x^2/|b-2| + 1)^(b/2 - 1); raw weight is this over gamma^2.
double general_weight(const GeneralRobust& p, double c) {
  const double x2 = (c / p.gamma) * (c / p.gamma);
  if (p.beta == 2.0) return 1.0;
  if (p.beta <= kWelschShapeCutoff) return std::exp(-0.5 * x2);
  const double b = std::abs(p.beta - 2.0);
  return std::exp((0.5 * p.beta - 1.0) * std::log1p(x2 / b));
}

}  // namespace

LossSpec::LossSpec(Variant variant) : variant_(std::move(variant)) {
  std::visit(Overloaded{
                 [](const GeneralRobust& p) {
                   if (!(p.gamma > 0.0)) throw InputError("GeneralRobust: gamma must be > 0");
                   if (std::isnan(p.beta)) throw InputError("GeneralRobust: beta is NaN");
                 },
                 [](const Huber& p) {
                   if (!(p.sigma > 0.0)) throw InputError("Huber: sigma must be > 0");
                 },
                 [](const Cauchy& p) {
                   if (!(p.sigma > 0.0)) throw InputError("Cauchy: sigma must be > 0");
                 },
                 [](const UnitLoss&) {},
             },
             variant_);
}

std::string LossSpec::describe() const {
  std::ostringstream out;
  std::visit(Overloaded{
                 [&](const GeneralRobust& p) {
                   out << "general(beta=" << p.beta << ",gamma=" << p.gamma << ")";
                 },
                 [&](const Huber& p) { out << "huber(sigma=" << p.sigma << ")"; },
                 [&](const Cauchy& p) { out << "cauchy(sigma=" << p.sigma << ")"; },
                 [&](const UnitLoss&) { out << "unit"; },
             },
             variant_);
  return out.str();
}

double loss_value(const LossSpec& spec, double c) {
  if (!std::isfinite(c)) throw InputError("loss_value: residual is not finite");
  return std::visit(Overloaded{
                        [c](const GeneralRobust& p) { return general_loss(p, c); },
                        [c](const Huber& p) {
                          const double a = std::abs(c);
                          return a < p.sigma ? 0.5 * c * c : p.sigma * a - 0.5 * p.sigma * p.sigma;
                        },
                        // sigma^2/2 * log(1 + c^2/sigma), as tabulated for the benchmark.
                        [c](const Cauchy& p) {
                          return 0.5 * p.sigma * p.sigma * std::log1p(c * c / p.sigma);
                        },
                        [c](const UnitLoss&) { return 0.5 * c * c; },
                    },
                    spec.variant());
}

double raw_weight(const LossSpec& spec, double c) {
  return std::visit(Overloaded{
                        [c](const GeneralRobust& p) {
                          return general_weight(p, c) / (p.gamma * p.gamma);
                        },
                        [c](const Huber& p) {
                          const double a = std::abs(c);
                          return a <= p.sigma ? 1.0 : p.sigma / a;
                        },
                        [c](const Cauchy& p) { return p.sigma / (1.0 + c * c / p.sigma); },
                        [](const UnitLoss&) { return 1.0; },
                    },
                    spec.variant());
}

double weight(const LossSpec& spec, double c) {
  return std::visit(Overloaded{
                        [c](const GeneralRobust& p) { return general_weight(p, c); },
                        [&spec, c](const auto&) { return raw_weight(spec, c) / raw_weight(spec, 0.0); },
                    },
                    spec.variant());
}

Eigen::MatrixXd WeightMatrix::dense() const {
  Eigen::VectorXd diag(xi_x.size() + xi_y.size());
  diag << xi_x, xi_y;
  return diag.asDiagonal();
}

WeightMatrix build_weight_matrix(const LossSpec& spec, const Eigen::VectorXd& e) {
  if (e.size() % 2 != 0 || e.size() == 0) {
    throw ShapeError("build_weight_matrix: residual must have even positive length");
  }
  const Eigen::Index n = e.size() / 2;
  WeightMatrix w{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    w.xi_x(k) = std::max(weight(spec, e(k)), kMinWeight);
    w.xi_y(k) = std::max(weight(spec, e(n + k)), kMinWeight);
  }
  return w;
}

}  // namespace graphukf
