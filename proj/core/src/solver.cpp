#include "sadmm/solver.hpp"

#include <chrono>
#include <cmath>

#include "sadmm/errors.hpp"

namespace sadmm {

std::string to_string(OutputRule rule) {
  return rule == OutputRule::kFinal ? "final" : "uniform_random";
}

OutputRule parse_output_rule(std::string_view name) {
  if (name == "final") return OutputRule::kFinal;
  if (name == "uniform_random") return OutputRule::kUniformRandom;
  throw ParameterError("unknown output rule \"" + std::string(name) + "\"");
}

Vector z_update(const Vector& x, const Vector& u, const LinearOperator& op, const Regularizer& reg,
                double beta) {
  if (u.size() != op.out_dim()) throw ShapeError("z_update: multiplier has wrong length");
  return reg.prox(op.apply(x) + u / beta, beta);
}

Vector x_update(const Vector& x, const Vector& z_next, const Vector& u, const Vector& g_tilde,
                const LinearOperator& op, double tau, double beta) {
  if (!(tau > 0.0)) throw ParameterError("x_update: tau must be positive");
  if (g_tilde.size() != x.size() || z_next.size() != op.out_dim() || u.size() != op.out_dim())
    throw ShapeError("x_update: inconsistent vector lengths");
  const Vector dual = u + beta * (op.apply(x) - z_next);
  return x - (g_tilde + op.adjoint(dual)) / tau;
}

Vector u_update(const Vector& u, const Vector& x_next, const Vector& z_next, const LinearOperator& op,
                double sigma, double beta) {
  if (z_next.size() != op.out_dim() || u.size() != op.out_dim())
    throw ShapeError("u_update: inconsistent vector lengths");
  return u + (sigma * beta) * (op.apply(x_next) - z_next);
}

SolverState initial_state(const Problem& problem, const Vector* x0) {
  SolverState s;
  if (x0 != nullptr) {
    if (x0->size() != problem.dim()) throw ShapeError("initial point has wrong length");
    s.x = *x0;
  } else {
    s.x = Vector::Zero(problem.dim());
  }
  s.z = problem.op().apply(s.x);
  s.u = Vector::Zero(problem.out_dim());
  s.x_prev = s.x;
  s.u_prev = s.u;
  return s;
}

IterationRecord step(SolverState& state, const Problem& problem, const SolverConfig& config,
                     GradientEstimator& estimator, const StepOptions& options) {
  const LinearOperator& op = problem.op();
  const std::int64_t next = state.t + 1;

  Vector z_next = z_update(state.x, state.u, op, problem.reg(), config.beta);
  const Vector g = estimator.estimate(problem.loss(), state.x);
  Vector x_next = x_update(state.x, z_next, state.u, g, op, config.tau, config.beta);
  Vector u_next = u_update(state.u, x_next, z_next, op, config.sigma, config.beta);

  if (!x_next.allFinite()) throw DivergenceError(next, "x is not finite");
  if (!z_next.allFinite()) throw DivergenceError(next, "z is not finite");
  if (!u_next.allFinite()) throw DivergenceError(next, "u is not finite");

  IterationRecord rec;
  rec.iter = next;
  rec.epoch = static_cast<double>(estimator.gradient_evaluations()) / static_cast<double>(problem.n());
  rec.dx_norm = (x_next - state.x).norm();
  rec.dz_norm = (z_next - state.z).norm();
  rec.du_norm = (u_next - state.u).norm();
  rec.du_prev_norm = (state.u - state.u_prev).norm();

  const Vector x_old = state.x;
  state.x_prev = std::move(state.x);
  state.u_prev = std::move(state.u);
  state.x = std::move(x_next);
  state.z = std::move(z_next);
  state.u = std::move(u_next);
  state.t = next;

  rec.primal_residual = (op.apply(state.x) - state.z).norm();
  if (options.record_objective) rec.objective = problem.objective(state.x, state.z);

  if (options.diagnostics) {
    DiagnosticsRecord d;
    d.aug_lagrangian = augmented_lagrangian(problem, state.x, state.z, state.u, config.beta);
    d.primal_residual = rec.primal_residual;
    const EstimatorDiagnostics ed = estimator.diagnostics(problem.loss(), state.x);
    d.upsilon = ed.upsilon;
    d.gamma = ed.gamma;
    d.grad_err_sq_prev = (g - problem.loss().full_gradient(x_old)).squaredNorm();
    if (config.stability) d.psi = stability_psi(problem, state, *config.stability, d.upsilon, d.grad_err_sq_prev);
    rec.diagnostics = d;
  }
  return rec;
}

std::int64_t iteration_budget(const Problem& problem, const SolverConfig& config) {
  const Index b = effective_batch(config.estimator, problem.n());
  const std::int64_t per_epoch = (problem.n() + b - 1) / b;
  return static_cast<std::int64_t>(config.max_epochs) * per_epoch;
}

namespace {

void validate_config(const SolverConfig& c) {
  if (!(c.beta > 0.0) || !std::isfinite(c.beta)) throw ParameterError("beta must be positive");
  if (!(c.tau > 0.0) || !std::isfinite(c.tau)) throw ParameterError("tau must be positive");
  if (!(c.sigma > 0.0 && c.sigma <= 1.0)) throw ParameterError("sigma must lie in (0, 1]");
  if (c.max_epochs < 1) throw ParameterError("max_epochs must be >= 1");
  if (c.residual_tol < 0.0) throw ParameterError("residual_tol must be nonnegative");
  if (c.diag_every < 0) throw ParameterError("diag_every must be >= 0");
  if (c.trace_every < 1) throw ParameterError("trace_every must be >= 1");
}

}  // namespace

RunResult run(const Problem& problem, const SolverConfig& config, const Vector* x0,
              const IterationObserver& observer) {
  validate_config(config);
  EstimatorSpec spec = config.estimator;
  spec.seed = config.seed;

  SolverState state = initial_state(problem, x0);
  auto estimator = make_estimator(spec, problem.loss(), state.x);

  const std::int64_t budget = iteration_budget(problem, config);
  const bool early_stop = config.residual_tol > 0.0 && std::isfinite(config.residual_tol);
  const CounterRng output_rng(config.seed);
  const auto start = std::chrono::steady_clock::now();

  RunResult result;
  result.trace.reserve(static_cast<std::size_t>(budget / config.trace_every + 1));
  for (std::int64_t t = 0; t < budget; ++t) {
    const std::int64_t iter = t + 1;
    StepOptions opts;
    opts.diagnostics = config.diag_every > 0 && iter % config.diag_every == 0;
    opts.record_objective = iter % config.trace_every == 0 || iter == budget || opts.diagnostics;
    IterationRecord rec = step(state, problem, config, *estimator, opts);
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    if (config.output_rule == OutputRule::kUniformRandom) {
      // Reservoir of size one over iterates 1..iter.
      if (iter == 1 || output_rng.uniform(Stream::kOutput, static_cast<std::uint64_t>(iter), 0) <
                           1.0 / static_cast<double>(iter)) {
        result.x_out = state.x;
        result.z_out = state.z;
        result.output_iter = iter;
      }
    }
    if (observer) observer(rec, state);

    bool stop = false;
    if (early_stop && rec.primal_residual <= config.residual_tol &&
        rec.dx_norm <= config.residual_tol * (1.0 + state.x.norm())) {
      stop = true;
      result.stopped_early = true;
      if (!rec.objective) rec.objective = problem.objective(state.x, state.z);
    }
    if (rec.objective || rec.diagnostics) result.trace.push_back(std::move(rec));
    result.iterations = iter;
    if (stop) break;
  }

  if (config.output_rule == OutputRule::kFinal || result.output_iter == 0) {
    result.x_out = state.x;
    result.z_out = state.z;
    result.output_iter = state.t;
  }
  result.gradient_evaluations = estimator->gradient_evaluations();
  result.final_state = std::move(state);
  return result;
}

bool residual_chain_holds(const IterationRecord& rec, double op_norm, double sigma, double beta, double tol) {
  const double sb = sigma * beta;
  if (sb == 0.0) return true;
  const double rhs = op_norm * rec.dx_norm + (rec.du_norm + rec.du_prev_norm) / sb;
  return rec.dz_norm <= rhs + tol * (1.0 + rhs);
}

}  // namespace sadmm
