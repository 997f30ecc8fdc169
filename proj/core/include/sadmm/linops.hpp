#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sadmm/types.hpp"

namespace sadmm {

enum class OperatorKind { kDense, kFiniteDifference1D, kFiniteDifference2D, kIdentity, kVerticalStack };

/// Extreme spectral quantities of a linear map A.
///   op_norm_sq      ||A||^2 = lambda_max(A^T A)
///   lambda_min_aat  lambda_min(A A^T); zero when A is not surjective
///   condition_kappa lambda_max(AA^T) / lambda_min(AA^T), +inf when singular
struct SpectralEstimates {
  double op_norm_sq = 0.0;
  double lambda_min_aat = 0.0;
  double condition_kappa = 0.0;
};

struct SpectralOptions {
  double tol = 1e-10;
  int max_iter = 200000;
  std::uint64_t seed = 0;
};

/// Immutable linear map R^in_dim -> R^out_dim with an adjoint. Copies share
/// the underlying storage; apply/adjoint are pure and thread-safe.
class LinearOperator {
 public:
  class Impl;

  /// Row-major dense matrix, out_dim = rows, in_dim = cols.
  static LinearOperator dense(RowMajorMatrix matrix);
  static LinearOperator identity(Index dim);
  /// Forward differences x[i+1] - x[i]; out_dim = dim - 1.
  static LinearOperator finite_difference_1d(Index dim);
  /// Horizontal then vertical forward differences on a row-major
  /// height x width image. Boundary differences are dropped, so
  /// out_dim = height*(width-1) + (height-1)*width.
  static LinearOperator finite_difference_2d(Index height, Index width);
  /// [A_1; A_2; ...] for members sharing in_dim.
  static LinearOperator vertical_stack(std::vector<LinearOperator> members);

  Index in_dim() const;
  Index out_dim() const;
  OperatorKind kind() const;
  std::string describe() const;

  Vector apply(const Vector& x) const;
  Vector adjoint(const Vector& y) const;

  /// Materialises A as a dense out_dim x in_dim matrix.
  Matrix to_dense() const;

  /// Spectral estimates with default options, computed once and cached.
  const SpectralEstimates& spectral() const;

  /// Members of a vertical stack (empty for other kinds).
  const std::vector<LinearOperator>& members() const;

 private:
  explicit LinearOperator(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Power iteration on A^T A for ||A||^2, plus lambda_min(AA^T): exact dense
/// eigendecomposition when out_dim <= 2000, shifted power iteration on
/// (||A||^2 I - AA^T) otherwise. A tall operator (out_dim > in_dim) has
/// singular AA^T, so lambda_min is exactly 0 there.
///
/// Throws EstimationError when power iteration does not converge within
/// max_iter; ParameterError on tol <= 0 or max_iter < 1.
SpectralEstimates estimate_spectral(const LinearOperator& op, double tol, int max_iter,
                                    std::uint64_t seed);

inline SpectralEstimates estimate_spectral(const LinearOperator& op,
                                           const SpectralOptions& options = {}) {
  return estimate_spectral(op, options.tol, options.max_iter, options.seed);
}

/// Plain-text matrix: first line "m d", then m rows of d decimals.
RowMajorMatrix load_dense_matrix(const std::string& path);
RowMajorMatrix parse_dense_matrix(const std::string& text);

}  // namespace sadmm
