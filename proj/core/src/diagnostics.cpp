#include "sadmm/diagnostics.hpp"

#include <algorithm>

#include "sadmm/errors.hpp"

namespace sadmm {

StabilityConstants make_stability_constants(double sigma, double beta, double tau, double lipschitz,
                                            double lambda_m, double eta, double c2,
                                            const VarianceConstants& variance) {
  if (!(lambda_m > 0.0))
    throw UndefinedDiagnosticError("stability constants need lambda_min(AA^T) > 0");
  if (!(sigma > 0.0) || !(beta > 0.0) || !(eta > 0.0) || !(variance.rho > 0.0))
    throw ParameterError("stability constants need sigma, beta, eta, rho > 0");

  StabilityConstants k;
  k.lambda_m = lambda_m;
  k.eta = eta;
  k.sigma = sigma;
  k.beta = beta;
  k.tau = tau;
  k.lipschitz = lipschitz;
  k.variance = variance;
  k.c2 = c2;

  const double sbl = sigma * beta * lambda_m;
  k.c0 = 4.0 * (1.0 - sigma) / (sigma * sigma * beta * lambda_m);
  const double st_l = sigma * tau + lipschitz;
  k.c1 = 8.0 * st_l * st_l / sbl;
  k.c3 = (32.0 / sbl + eta / 2.0) * (variance.v1 + variance.v_upsilon / variance.rho) + c2 + k.c1;
  return k;
}

double augmented_lagrangian(const Problem& problem, const Vector& x, const Vector& z, const Vector& u,
                            double beta) {
  const Vector r = problem.op().apply(x) - z;
  if (u.size() != r.size()) throw ShapeError("augmented_lagrangian: multiplier has wrong length");
  return problem.reg().value(z) + problem.loss().value(x) + u.dot(r) + 0.5 * beta * r.squaredNorm();
}

Vector apply_B(const Vector& x, const LinearOperator& op, double tau, double beta) {
  return tau * x - beta * op.adjoint(op.apply(x));
}

double stability_psi(const Problem& problem, const SolverState& state, const StabilityConstants& k,
                     double upsilon, double grad_err_sq_prev) {
  if (!(k.lambda_m > 0.0)) throw UndefinedDiagnosticError("Psi is undefined when lambda_min(AA^T) = 0");
  const LinearOperator& op = problem.op();
  const Vector dx = state.x - state.x_prev;
  const Vector du = state.u - state.u_prev;
  const Vector coupled = op.adjoint(du) + k.sigma * apply_B(dx, op, k.tau, k.beta);
  const double sbl = k.sigma * k.beta * k.lambda_m;

  const double lag = augmented_lagrangian(problem, state.x, state.z, state.u, k.beta);
  const double lagged = k.c0 * coupled.squaredNorm();
  const double ups = (32.0 / sbl + k.eta / 2.0) * upsilon / k.variance.rho;
  const double err = 16.0 / sbl * grad_err_sq_prev;
  const double step = k.c3 * dx.squaredNorm();
  return lag + lagged + ups + err + step;
}

double subgradient_p_constant(double op_norm, double lipschitz, double tau, double beta, double sigma,
                              double c0, double c1, double v2) {
  const double st = sigma * tau;
  const double first = lipschitz + 4.0 * c1 + 4.0 * st * c0 * (st + op_norm) + tau + beta * op_norm + v2;
  const double second = 1.0 + 1.0 / (sigma * beta) + 4.0 * c0 * op_norm * (st + op_norm) +
                        (2.0 / sigma - 1.0) * op_norm;
  return std::max(first, second);
}

}  // namespace sadmm
