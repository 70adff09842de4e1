#pragma once

#include <string>
#include <type_traits>
#include <variant>

#include <Eigen/Core>

namespace graphukf {

// Loss family members. GeneralRobust is the two-parameter (shape, scale)
// family; shape 2 is the quadratic limit, shape 0 the log (Cauchy-like) limit,
// and shape <= kWelschShapeCutoff the exponential (Welsch) limit.
struct GeneralRobust {
  double beta = -1.0;
  double gamma = 1.1;
};
struct Huber {
  double sigma = 1.1;
};
struct Cauchy {
  double sigma = 1.1;
};
struct UnitLoss {};

inline constexpr double kWelschShapeCutoff = -1e6;

class LossSpec {
 public:
  using Variant = std::variant<GeneralRobust, Huber, Cauchy, UnitLoss>;

  LossSpec() : variant_(UnitLoss{}) {}
  /// Throws InputError if a scale parameter is not strictly positive.
  LossSpec(Variant variant);  // NOLINT(google-explicit-constructor)
  template <class Member>
    requires std::is_constructible_v<Variant, Member> && (!std::is_same_v<Member, Variant>)
  LossSpec(Member member) : LossSpec(Variant(std::move(member))) {}  // NOLINT

  const Variant& variant() const { return variant_; }
  bool is_unit() const { return std::holds_alternative<UnitLoss>(variant_); }
  std::string describe() const;

 private:
  Variant variant_;
};

/// phi(c). Throws InputError for non-finite c.
double loss_value(const LossSpec& spec, double c);

/// Raw IRLS weight phi'(c) / c, with its limit at c = 0.
double raw_weight(const LossSpec& spec, double c);

/// raw_weight(c) / raw_weight(0), so that weight(0) == 1 for every variant.
double weight(const LossSpec& spec, double c);

/// Diagonal IRLS weights for a stacked residual [state block; measurement block].
struct WeightMatrix {
  Eigen::VectorXd xi_x;
  Eigen::VectorXd xi_y;

  Eigen::MatrixXd dense() const;
};

/// Smallest entry build_weight_matrix emits; keeps the weight matrix invertible
/// when a weight underflows for an extreme residual.
inline constexpr double kMinWeight = 1e-12;

/// e must have even length 2n; throws ShapeError otherwise.
WeightMatrix build_weight_matrix(const LossSpec& spec, const Eigen::VectorXd& e);

}  // namespace graphukf
