#pragma once

#include <optional>

#include "sadmm/estimators.hpp"
#include "sadmm/problem.hpp"

namespace sadmm {

/// Constants of the stability function
///   Psi_t = L_beta(x_t, z_t, u_t) + C0 ||A^T(u_t - u_{t-1}) + sigma B(x_t - x_{t-1})||^2
///         + (1/rho)(32/(sigma beta lambda_m) + eta/2) Upsilon_t
///         + 16/(sigma beta lambda_m) ||g_{t-1} - grad H(x_{t-1})||^2
///         + C3 ||x_t - x_{t-1}||^2
/// with B = tau I - beta A^T A and
///   C0 = 4(1 - sigma) / (sigma^2 beta lambda_m)
///   C1 = 8(sigma tau + L)^2 / (sigma beta lambda_m)
///   C3 = (32/(sigma beta lambda_m) + eta/2)(V1 + V_upsilon/rho) + C2 + C1.
/// The remaining fields record the inputs the constants were built from.
struct StabilityConstants {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double lambda_m = 0.0;
  double eta = 0.0;
  double sigma = 0.0;
  double beta = 0.0;
  double tau = 0.0;
  double lipschitz = 0.0;
  VarianceConstants variance;
};

/// Throws UndefinedDiagnosticError when lambda_m <= 0 and ParameterError
/// when sigma, beta, eta or rho is not positive.
StabilityConstants make_stability_constants(double sigma, double beta, double tau, double lipschitz,
                                            double lambda_m, double eta, double c2,
                                            const VarianceConstants& variance);

/// Per-iteration theory-facing quantities. psi is empty when lambda_m = 0.
struct DiagnosticsRecord {
  double aug_lagrangian = 0.0;
  std::optional<double> psi;
  double primal_residual = 0.0;
  double upsilon = 0.0;
  double gamma = 0.0;
  double grad_err_sq_prev = 0.0;
};

/// F(z) + H(x) + <u, Ax - z> + (beta/2) ||Ax - z||^2. beta = 0 is allowed.
double augmented_lagrangian(const Problem& problem, const Vector& x, const Vector& z, const Vector& u,
                            double beta);

/// (tau I - beta A^T A) x.
Vector apply_B(const Vector& x, const LinearOperator& op, double tau, double beta);

/// The five-term stability function at state (t >= 1).
double stability_psi(const Problem& problem, const SolverState& state, const StabilityConstants& consts,
                     double upsilon, double grad_err_sq_prev);

/// Bound constant p of the subgradient estimate:
/// max{L + 4C1 + 4 sigma tau C0 (sigma tau + ||A||) + tau + beta ||A|| + V2,
///     1 + 1/(sigma beta) + 4 C0 ||A|| (sigma tau + ||A||) + (2/sigma - 1) ||A||}.
double subgradient_p_constant(double op_norm, double lipschitz, double tau, double beta, double sigma,
                              double c0, double c1, double v2);

}  // namespace sadmm
