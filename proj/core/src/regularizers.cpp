#include "sadmm/regularizers.hpp"

#include <cmath>
#include <sstream>

#include "sadmm/errors.hpp"

namespace sadmm {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void check_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw ParameterError("regularization weight must be finite and nonnegative");
}

double hard_threshold(double v, double lambda, double beta) {
  return v * v > 2.0 * lambda / beta ? v : 0.0;
}

}  // namespace

Regularizer Regularizer::l1(double lambda) {
  check_lambda(lambda);
  return Regularizer(L1Penalty{lambda});
}

Regularizer Regularizer::l0(double lambda) {
  check_lambda(lambda);
  return Regularizer(L0Penalty{lambda});
}

Regularizer Regularizer::weighted_l0(Vector lambdas) {
  for (Index i = 0; i < lambdas.size(); ++i) check_lambda(lambdas[i]);
  return Regularizer(WeightedL0Penalty{std::move(lambdas)});
}

std::string Regularizer::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{[&os](const L1Penalty& p) { os << "l1(" << p.lambda << ")"; },
                        [&os](const L0Penalty& p) { os << "l0(" << p.lambda << ")"; },
                        [&os](const WeightedL0Penalty& p) { os << "weighted_l0[" << p.lambdas.size() << "]"; }},
             kind_);
  return os.str();
}

bool Regularizer::compatible_with(Index dim) const noexcept {
  if (const auto* w = std::get_if<WeightedL0Penalty>(&kind_)) return w->lambdas.size() == dim;
  return true;
}

double Regularizer::value(const Vector& z) const {
  if (!compatible_with(z.size()))
    throw ShapeError("weighted L0: weight vector length does not match z");
  return std::visit(
      Overloaded{[&z](const L1Penalty& p) { return p.lambda * z.lpNorm<1>(); },
                 [&z](const L0Penalty& p) {
                   return p.lambda * static_cast<double>((z.array() != 0.0).count());
                 },
                 [&z](const WeightedL0Penalty& p) {
                   double sum = 0.0;
                   for (Index i = 0; i < z.size(); ++i)
                     if (z[i] != 0.0) sum += p.lambdas[i];
                   return sum;
                 }},
      kind_);
}

Vector Regularizer::prox(const Vector& v, double beta) const {
  if (!(beta > 0.0)) throw ParameterError("prox: beta must be positive");
  if (!compatible_with(v.size()))
    throw ShapeError("weighted L0: weight vector length does not match v");
  Vector z(v.size());
  std::visit(Overloaded{[&](const L1Penalty& p) {
                          const double t = p.lambda / beta;
                          for (Index i = 0; i < v.size(); ++i) {
                            const double mag = std::abs(v[i]) - t;
                            z[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
                          }
                        },
                        [&](const L0Penalty& p) {
                          for (Index i = 0; i < v.size(); ++i) z[i] = hard_threshold(v[i], p.lambda, beta);
                        },
                        [&](const WeightedL0Penalty& p) {
                          for (Index i = 0; i < v.size(); ++i)
                            z[i] = hard_threshold(v[i], p.lambdas[i], beta);
                        }},
             kind_);
  return z;
}

}  // namespace sadmm
