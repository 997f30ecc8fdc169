#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sadmm/diagnostics.hpp"
#include "sadmm/estimators.hpp"
#include "sadmm/problem.hpp"

namespace sadmm {

enum class OutputRule { kFinal, kUniformRandom };

std::string to_string(OutputRule rule);
OutputRule parse_output_rule(std::string_view name);

struct SolverConfig {
  double beta = 1.0;   // penalty
  double tau = 1.0;    // proximal step weight; the x step length is 1/tau
  double sigma = 1.0;  // dual relaxation in (0, 1]
  EstimatorSpec estimator;
  int max_epochs = 1;
  /// Early stopping is active only for 0 < residual_tol < inf.
  double residual_tol = 0.0;
  /// Diagnostics every diag_every iterations; 0 disables them.
  int diag_every = 0;
  /// Objective evaluated (and a trace row kept) every trace_every iterations
  /// and at the last iteration.
  int trace_every = 1;
  std::uint64_t seed = 0;
  OutputRule output_rule = OutputRule::kFinal;
  /// Enables the Psi column of diagnostics.
  std::optional<StabilityConstants> stability;
};

/// One solver iteration t -> t+1. `iter` is t+1; objective and residual
/// refer to the new iterate. The step norms feed the z-residual chain check.
struct IterationRecord {
  std::int64_t iter = 0;
  double epoch = 0.0;
  std::optional<double> objective;
  double primal_residual = 0.0;
  double wall_ms = 0.0;
  double dx_norm = 0.0;       // ||x_{t+1} - x_t||
  double dz_norm = 0.0;       // ||z_{t+1} - z_t||
  double du_norm = 0.0;       // ||u_{t+1} - u_t||
  double du_prev_norm = 0.0;  // ||u_t - u_{t-1}||
  std::optional<DiagnosticsRecord> diagnostics;
};

struct RunResult {
  std::vector<IterationRecord> trace;
  Vector x_out;
  Vector z_out;
  std::int64_t output_iter = 0;
  SolverState final_state;
  std::int64_t iterations = 0;
  std::int64_t gradient_evaluations = 0;
  bool stopped_early = false;
};

/// prox_F(Ax + u/beta) under weight beta: the exact z-subproblem minimiser.
Vector z_update(const Vector& x, const Vector& u, const LinearOperator& op, const Regularizer& reg,
                double beta);

/// x - (1/tau)(g + A^T u + beta A^T (Ax - z_next)).
Vector x_update(const Vector& x, const Vector& z_next, const Vector& u, const Vector& g_tilde,
                const LinearOperator& op, double tau, double beta);

/// u + sigma beta (A x_next - z_next).
Vector u_update(const Vector& u, const Vector& x_next, const Vector& z_next, const LinearOperator& op,
                double sigma, double beta);

/// x_0 (zero when not given), z_0 = A x_0, u_0 = 0, lags equal to the start.
SolverState initial_state(const Problem& problem, const Vector* x0 = nullptr);

struct StepOptions {
  bool record_objective = true;
  bool diagnostics = false;
};

/// z update, estimate at x_t, x update, u update, then lag roll. Throws
/// DivergenceError when an iterate becomes non-finite.
IterationRecord step(SolverState& state, const Problem& problem, const SolverConfig& config,
                     GradientEstimator& estimator, const StepOptions& options = {});

/// max_epochs * ceil(n / b) iterations.
std::int64_t iteration_budget(const Problem& problem, const SolverConfig& config);

/// Called after every iteration with the record and the new state.
using IterationObserver = std::function<void(const IterationRecord&, const SolverState&)>;

/// Runs the scheme from initial_state. ParameterError on an invalid config;
/// DivergenceError on non-finite iterates.
RunResult run(const Problem& problem, const SolverConfig& config, const Vector* x0 = nullptr,
              const IterationObserver& observer = {});

/// ||z_{t+1} - z_t|| <= ||A|| ||dx|| + (||du|| + ||du_prev||) / (sigma beta), up to
/// tol * (1 + rhs). Always true when sigma * beta = 0.
bool residual_chain_holds(const IterationRecord& rec, double op_norm, double sigma, double beta,
                          double tol = 1e-9);

}  // namespace sadmm
