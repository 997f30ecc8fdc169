#pragma once

#include <variant>
#include <vector>

#include "sadmm/types.hpp"

namespace sadmm {

/// Sigmoid loss 1 / (1 + exp(b <a, x>)) with label b in {-1, +1}.
struct SigmoidComponent {
  Vector features;
  double label = 1.0;
};

/// Squared residual (<r, x> - b)^2.
struct LeastSquaresComponent {
  Vector row;
  double target = 0.0;
};

using LossComponent = std::variant<SigmoidComponent, LeastSquaresComponent>;

/// Uniform bound on the gradient Lipschitz constant of every component.
struct LipschitzBound {
  double L = 0.0;
};

/// max over s of |d^2/ds^2 (1 / (1 + e^s))|, attained at g = (1 +- 1/sqrt(3)) / 2.
inline constexpr double kSigmoidCurvature = 0.0962250448649376;  // 1 / (6 sqrt 3)

/// Value and derivative of q(s) = 1 / (1 + e^s) without overflow for any s.
double sigmoid_loss(double s) noexcept;
/// q(s) (1 - q(s)); the derivative of q is its negation.
double sigmoid_slope(double s) noexcept;

/// H(x) = (1/n) sum_i H_i(x). Immutable after construction.
class FiniteSumLoss {
 public:
  explicit FiniteSumLoss(std::vector<LossComponent> components);

  Index size() const noexcept { return static_cast<Index>(components_.size()); }
  Index dim() const noexcept { return dim_; }
  const LossComponent& component(Index i) const;
  const std::vector<LossComponent>& components() const noexcept { return components_; }

  double component_value(Index i, const Vector& x) const;
  Vector component_gradient(Index i, const Vector& x) const;

  /// out += scale * grad H_i(x). No shape checks; hot path for estimators.
  void add_component_gradient(Index i, const Vector& x, double scale, Vector& out) const;

  double value(const Vector& x) const;
  /// Ascending-index sequential sum of component gradients, divided by n.
  Vector full_gradient(const Vector& x) const;

  LipschitzBound lipschitz_bound() const;

 private:
  void check_point(const Vector& x) const;
  void check_index(Index i) const;

  std::vector<LossComponent> components_;
  Index dim_ = 0;
};

}  // namespace sadmm
