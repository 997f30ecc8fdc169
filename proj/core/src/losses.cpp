#include "sadmm/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sadmm/errors.hpp"

namespace sadmm {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

const Vector& component_vector(const LossComponent& c) {
  return std::visit(Overloaded{[](const SigmoidComponent& s) -> const Vector& { return s.features; },
                               [](const LeastSquaresComponent& q) -> const Vector& { return q.row; }},
                    c);
}

// Scalar multiplier of the component vector in the gradient.
double gradient_coefficient(const LossComponent& c, const Vector& x) {
  return std::visit(Overloaded{[&x](const SigmoidComponent& s) {
                                 const double arg = s.label * s.features.dot(x);
                                 return -s.label * sigmoid_slope(arg);
                               },
                               [&x](const LeastSquaresComponent& q) {
                                 return 2.0 * (q.row.dot(x) - q.target);
                               }},
                    c);
}

}  // namespace

double sigmoid_loss(double s) noexcept {
  if (s > 0.0) {
    const double e = std::exp(-s);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(s));
}

double sigmoid_slope(double s) noexcept {
  const double e = std::exp(-std::abs(s));
  const double denom = 1.0 + e;
  return e / (denom * denom);
}

FiniteSumLoss::FiniteSumLoss(std::vector<LossComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw ShapeError("finite-sum loss needs at least one component");
  dim_ = component_vector(components_.front()).size();
  if (dim_ < 1) throw ShapeError("loss components must have dim >= 1");
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (component_vector(components_[i]).size() != dim_)
      throw ShapeError("loss component " + std::to_string(i) + " has dim " +
                       std::to_string(component_vector(components_[i]).size()) + ", expected " +
                       std::to_string(dim_));
    if (const auto* s = std::get_if<SigmoidComponent>(&components_[i]);
        s && s->label != 1.0 && s->label != -1.0)
      throw DataError("sigmoid component " + std::to_string(i) + " has label outside {-1,+1}");
  }
}

const LossComponent& FiniteSumLoss::component(Index i) const {
  check_index(i);
  return components_[static_cast<std::size_t>(i)];
}

void FiniteSumLoss::check_point(const Vector& x) const {
  if (x.size() != dim_)
    throw ShapeError("loss: expected point of length " + std::to_string(dim_) + ", got " +
                     std::to_string(x.size()));
}

void FiniteSumLoss::check_index(Index i) const {
  if (i < 0 || i >= size())
    throw IndexError("component index " + std::to_string(i) + " out of range [0, " +
                     std::to_string(size()) + ")");
}

double FiniteSumLoss::component_value(Index i, const Vector& x) const {
  check_index(i);
  check_point(x);
  return std::visit(Overloaded{[&x](const SigmoidComponent& s) {
                                 return sigmoid_loss(s.label * s.features.dot(x));
                               },
                               [&x](const LeastSquaresComponent& q) {
                                 const double r = q.row.dot(x) - q.target;
                                 return r * r;
                               }},
                    components_[static_cast<std::size_t>(i)]);
}

Vector FiniteSumLoss::component_gradient(Index i, const Vector& x) const {
  check_index(i);
  check_point(x);
  Vector g = Vector::Zero(dim_);
  add_component_gradient(i, x, 1.0, g);
  return g;
}

void FiniteSumLoss::add_component_gradient(Index i, const Vector& x, double scale,
                                           Vector& out) const {
  const auto& c = components_[static_cast<std::size_t>(i)];
  out += (scale * gradient_coefficient(c, x)) * component_vector(c);
}

double FiniteSumLoss::value(const Vector& x) const {
  check_point(x);
  double sum = 0.0;
  for (Index i = 0; i < size(); ++i) sum += component_value(i, x);
  return sum / static_cast<double>(size());
}

Vector FiniteSumLoss::full_gradient(const Vector& x) const {
  check_point(x);
  Vector sum = Vector::Zero(dim_);
  for (Index i = 0; i < size(); ++i) add_component_gradient(i, x, 1.0, sum);
  return sum / static_cast<double>(size());
}

LipschitzBound FiniteSumLoss::lipschitz_bound() const {
  double L = 0.0;
  for (const auto& c : components_) {
    const double li = std::visit(
        Overloaded{[](const SigmoidComponent& s) { return kSigmoidCurvature * s.features.squaredNorm(); },
                   [](const LeastSquaresComponent& q) { return 2.0 * q.row.squaredNorm(); }},
        c);
    L = std::max(L, li);
  }
  return {L};
}

}  // namespace sadmm
