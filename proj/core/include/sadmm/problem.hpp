#pragma once

#include <map>
#include <optional>
#include <string>

#include "sadmm/linops.hpp"
#include "sadmm/losses.hpp"
#include "sadmm/regularizers.hpp"

namespace sadmm {

/// min_x H(x) + F(Ax) with finite-sum H. Immutable once built; the
/// constructor checks that op.in_dim == loss.dim and F accepts op.out_dim.
class Problem {
 public:
  using Metadata = std::map<std::string, std::string>;

  Problem(FiniteSumLoss loss, Regularizer reg, LinearOperator op, std::string name = {},
          Metadata metadata = {}, std::optional<Vector> smooth_minimizer = std::nullopt);

  const FiniteSumLoss& loss() const noexcept { return loss_; }
  const Regularizer& reg() const noexcept { return reg_; }
  const LinearOperator& op() const noexcept { return op_; }
  const std::string& name() const noexcept { return name_; }
  const Metadata& metadata() const noexcept { return metadata_; }
  /// argmin H for least-squares fixtures, when known in closed form.
  const std::optional<Vector>& smooth_minimizer() const noexcept { return smooth_minimizer_; }

  Index n() const noexcept { return loss_.size(); }
  Index dim() const noexcept { return loss_.dim(); }
  Index out_dim() const { return op_.out_dim(); }

  /// H(x) + F(z), the split objective tracked by the solver.
  double objective(const Vector& x, const Vector& z) const;
  /// H(x) + F(Ax).
  double composite_objective(const Vector& x) const;

 private:
  FiniteSumLoss loss_;
  Regularizer reg_;
  LinearOperator op_;
  std::string name_;
  Metadata metadata_;
  std::optional<Vector> smooth_minimizer_;
};

/// Iterates of the splitting scheme together with the lagged pair needed by
/// the stability function.
struct SolverState {
  Vector x;
  Vector z;
  Vector u;
  Vector x_prev;
  Vector u_prev;
  std::int64_t t = 0;
};

}  // namespace sadmm
