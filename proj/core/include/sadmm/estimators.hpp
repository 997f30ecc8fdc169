#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "sadmm/losses.hpp"
#include "sadmm/random.hpp"
#include "sadmm/types.hpp"

namespace sadmm {

enum class EstimatorKind { kFull, kSgd, kSaga, kSvrg, kSarah };

std::string to_string(EstimatorKind kind);
/// Accepts "full", "sgd", "saga", "svrg", "sarah". Throws ParameterError.
EstimatorKind parse_estimator_kind(std::string_view name);

/// Switches that make the stochastic backends deterministic, for identity
/// checks in tests. Never set in production configurations.
struct EstimatorTestHooks {
  bool never_restart = false;     // SARAH: force p_t = 1
  bool full_sweep_batch = false;  // batch is {0, ..., n-1} without sampling
};

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::kFull;
  Index batch = 1;
  Index epoch_len = 0;     // SVRG re-anchor period; 0 means ceil(n / batch)
  double restart_p = 2.0;  // SARAH: P(full-gradient restart) = 1 / restart_p
  std::uint64_t seed = 0;
  EstimatorTestHooks hooks;
};

/// Batch size used for iteration accounting (n for the full gradient).
Index effective_batch(const EstimatorSpec& spec, Index n);

/// Throws ParameterError unless 1 <= batch <= n, restart_p > 1, epoch_len >= 0.
void validate_spec(const EstimatorSpec& spec, Index n);

/// Upsilon_t / Gamma_t bounding sequences and the realised squared error.
struct EstimatorDiagnostics {
  double upsilon = 0.0;
  double gamma = 0.0;
  double mse_exact = 0.0;
};

/// Constants of the variance-reduction contract: MSE bound coefficients
/// V1 and V2, decay coefficient V_upsilon and rate rho.
struct VarianceConstants {
  double v1 = 0.0;
  double v2 = 0.0;
  double v_upsilon = 0.0;
  double rho = 1.0;
  bool certified = false;
};

/// Proven constants for SAGA (rho = b/n, V_upsilon = n L^2 / (bn - 1)) and
/// SARAH (rho = 1/p, V_upsilon = L^2 / b, V2 = L / sqrt(b)). Other backends
/// throw UncertifiedConstantsError.
VarianceConstants theoretical_constants(const EstimatorSpec& spec, const LipschitzBound& lip, Index n);

/// Fallback for backends without proven constants:
/// (V1 = 0, V2 = 0, V_upsilon = L^2, rho = b/n), flagged uncertified.
VarianceConstants conservative_constants(const EstimatorSpec& spec, const LipschitzBound& lip, Index n);

/// theoretical_constants when available, conservative_constants otherwise.
VarianceConstants constants_or_default(const EstimatorSpec& spec, const LipschitzBound& lip, Index n);

/// Stateful stochastic gradient estimator. One instance belongs to one
/// solver run; estimate() mutates the state and is not reentrant.
///
/// Mini-batches are drawn uniformly with replacement; draw k of call t is
/// a pure function of (seed, t, k).
class GradientEstimator {
 public:
  virtual ~GradientEstimator() = default;

  const EstimatorSpec& spec() const noexcept { return spec_; }
  EstimatorKind kind() const noexcept { return spec_.kind; }
  /// Number of estimate() calls so far.
  std::int64_t iteration() const noexcept { return t_; }
  /// Component-gradient evaluations charged so far, including initialisation.
  std::int64_t gradient_evaluations() const noexcept { return evaluations_; }

  /// Replaces the seed of the random stream, keeping all other state.
  void reseed(std::uint64_t seed) noexcept {
    spec_.seed = seed;
    rng_ = CounterRng(seed);
  }

  Vector estimate(const FiniteSumLoss& loss, const Vector& x);

  /// Bounding sequences for the current state evaluated at x, i.e. the
  /// quantities governing the next estimate(x) call. When emitted is given,
  /// mse_exact = ||emitted - grad H(x)||^2. Costs O(n d).
  virtual EstimatorDiagnostics diagnostics(const FiniteSumLoss& loss, const Vector& x,
                                           const Vector* emitted = nullptr) const = 0;

  virtual std::unique_ptr<GradientEstimator> clone() const = 0;

 protected:
  GradientEstimator(const EstimatorSpec& spec, Index n)
      : spec_(spec), rng_(spec.seed), batch_(effective_batch(spec, n)) {}

  virtual Vector do_estimate(const FiniteSumLoss& loss, const Vector& x) = 0;

  /// Indices of the current call's mini-batch (with multiplicity).
  std::vector<Index> draw_batch(Index n) const;

  void charge(std::int64_t evaluations) noexcept { evaluations_ += evaluations; }
  double mse_of(const FiniteSumLoss& loss, const Vector& x, const Vector* emitted) const;

  EstimatorSpec spec_;
  CounterRng rng_;
  Index batch_;
  std::int64_t t_ = 0;
  std::int64_t evaluations_ = 0;
};

/// Initialises the backend state at x0: SAGA fills its table with
/// grad H_i(x0), SARAH stores grad H(x0), SVRG anchors at x0.
std::unique_ptr<GradientEstimator> make_estimator(const EstimatorSpec& spec, const FiniteSumLoss& loss,
                                                  const Vector& x0);

/// Read-only views into backend state, for tests and diagnostics.
class SagaEstimator;
class SarahEstimator;
const Vector& saga_table_mean(const GradientEstimator& est);
const Matrix& saga_table(const GradientEstimator& est);
const Vector& sarah_previous_estimate(const GradientEstimator& est);

}  // namespace sadmm
