#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sadmm/estimators.hpp"
#include "sadmm/linops.hpp"
#include "sadmm/problem.hpp"
#include "sadmm/solver.hpp"

namespace sadmm {

enum class CheckStatus { kPass, kWarn, kFail };

std::string to_string(CheckStatus status);

struct ParamCheck {
  std::string name;
  CheckStatus status = CheckStatus::kPass;
  std::string detail;
};

/// Outcome of validate_params. eta_tilde is empty when lambda_m = 0.
struct ParamReport {
  std::optional<double> eta_tilde;
  double eta_used = 1.0;
  double c2_used = 0.0;
  std::vector<ParamCheck> checks;

  // Inputs the report was computed from.
  double beta = 0.0;
  double tau = 0.0;
  double sigma = 0.0;
  double lipschitz = 0.0;
  SpectralEstimates spectral;
  VarianceConstants variance;

  bool all_pass() const;
  const ParamCheck* find(const std::string& name) const;
};

// Check names, stable for tooling.
inline constexpr const char* kCheckTauDominates = "2tau >= beta*||A||^2";
inline constexpr const char* kCheckSigmaBound = "sigma < 1/(24 kappa)";
inline constexpr const char* kCheckSurjective = "lambda_m > 0";
inline constexpr const char* kCheckEtaTilde = "eta_tilde > 0";
inline constexpr const char* kCheckCertified = "certified constants";

/// Descent coefficient
///   tau - (L + beta ||A||^2)/2 - 4 sigma tau^2/(beta lm) - 8(sigma tau + L)^2/(sigma beta lm)
///   - 1/(2 eta) - (64/(sigma beta lm) + eta)(V1 + V_upsilon/rho) - C2.
double eta_tilde(double tau, double beta, double sigma, double lipschitz, double op_norm_sq, double lambda_m,
                 double eta, double c2, const VarianceConstants& variance);

/// Larger root of (1 - 24 sigma kappa) beta^2 - 2 c nu beta - e with nu = 4L/lm. Every beta above it
/// admits a tau with eta_tilde > 0 (given ||A||^2 = kappa lm). Empty when 24 sigma kappa >= 1.
std::optional<double> feasible_beta_root(double sigma, double kappa, double lipschitz, double lambda_m,
                                         double eta, double c2, const VarianceConstants& variance);

/// Roots of eta_tilde as a quadratic in tau:
/// beta lm / (24 sigma) (1 - 4 nu / beta -+ sqrt(Delta)). Empty when Delta < 0.
struct TauInterval {
  double lower = 0.0;
  double upper = 0.0;
};
std::optional<TauInterval> feasible_tau_interval(double beta, double sigma, double lipschitz, double op_norm_sq,
                                                 double lambda_m, double eta, double c2,
                                                 const VarianceConstants& variance);

/// The grid searched for eta: 2^k, k = -20..20.
std::vector<double> eta_grid();

/// Reports, never throws on parameter problems. Variance constants come from
/// theoretical_constants, or the conservative defaults (flagged) when the
/// backend has none. C2 = 1e-6 tau.
ParamReport validate_params(const Problem& problem, const SolverConfig& config, const SpectralEstimates& spectral,
                            const LipschitzBound& lipschitz);

/// Stability constants matching a report, for Psi diagnostics. Empty when
/// lambda_m = 0.
std::optional<StabilityConstants> stability_constants_for(const ParamReport& report);

}  // namespace sadmm
