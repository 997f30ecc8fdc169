#pragma once

#include <string>
#include <variant>

#include "sadmm/types.hpp"

namespace sadmm {

struct L1Penalty {
  double lambda = 0.0;
};
struct L0Penalty {
  double lambda = 0.0;
};
struct WeightedL0Penalty {
  Vector lambdas;
};

/// Separable non-smooth term F(z) with a closed-form proximal map.
class Regularizer {
 public:
  using Kind = std::variant<L1Penalty, L0Penalty, WeightedL0Penalty>;

  static Regularizer l1(double lambda);
  static Regularizer l0(double lambda);
  static Regularizer weighted_l0(Vector lambdas);

  const Kind& kind() const noexcept { return kind_; }
  std::string describe() const;

  /// Whether this regularizer accepts vectors of the given length.
  bool compatible_with(Index dim) const noexcept;

  double value(const Vector& z) const;

  /// argmin_z F(z) + (beta/2) ||z - v||^2.
  ///   L1: soft threshold at lambda/beta.
  ///   L0: keep v_i iff v_i^2 > 2 lambda / beta; the tie goes to 0.
  Vector prox(const Vector& v, double beta) const;

 private:
  explicit Regularizer(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

}  // namespace sadmm
