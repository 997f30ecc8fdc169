#include "sadmm/problem.hpp"

#include "sadmm/errors.hpp"

namespace sadmm {

Problem::Problem(FiniteSumLoss loss, Regularizer reg, LinearOperator op, std::string name,
                 Metadata metadata, std::optional<Vector> smooth_minimizer)
    : loss_(std::move(loss)),
      reg_(std::move(reg)),
      op_(std::move(op)),
      name_(std::move(name)),
      metadata_(std::move(metadata)),
      smooth_minimizer_(std::move(smooth_minimizer)) {
  if (op_.in_dim() != loss_.dim())
    throw ShapeError("problem: operator in_dim " + std::to_string(op_.in_dim()) +
                     " does not match loss dim " + std::to_string(loss_.dim()));
  if (!reg_.compatible_with(op_.out_dim()))
    throw ShapeError("problem: regularizer incompatible with operator out_dim " +
                     std::to_string(op_.out_dim()));
  if (smooth_minimizer_ && smooth_minimizer_->size() != loss_.dim())
    throw ShapeError("problem: smooth minimizer has wrong length");
}

double Problem::objective(const Vector& x, const Vector& z) const { return loss_.value(x) + reg_.value(z); }

double Problem::composite_objective(const Vector& x) const {
  return loss_.value(x) + reg_.value(op_.apply(x));
}

}  // namespace sadmm
