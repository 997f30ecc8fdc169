#include "sadmm/validator.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "sadmm/errors.hpp"

namespace sadmm {

namespace {

double total_variance(const VarianceConstants& v) { return v.v1 + v.v_upsilon / v.rho; }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::string to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::kPass: return "pass";
    case CheckStatus::kWarn: return "warn";
    case CheckStatus::kFail: return "fail";
  }
  return "?";
}

bool ParamReport::all_pass() const {
  for (const auto& c : checks)
    if (c.status != CheckStatus::kPass) return false;
  return true;
}

const ParamCheck* ParamReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

double eta_tilde(double tau, double beta, double sigma, double lipschitz, double op_norm_sq, double lambda_m,
                 double eta, double c2, const VarianceConstants& variance) {
  const double L = lipschitz;
  const double sbl = sigma * beta * lambda_m;
  return tau - (L + beta * op_norm_sq) / 2.0 - 4.0 * sigma * tau * tau / (beta * lambda_m) -
         8.0 * (sigma * tau + L) * (sigma * tau + L) / sbl - 1.0 / (2.0 * eta) -
         (64.0 / sbl + eta) * total_variance(variance) - c2;
}

std::optional<double> feasible_beta_root(double sigma, double kappa, double lipschitz, double lambda_m,
                                         double eta, double c2, const VarianceConstants& variance) {
  const double a = 1.0 - 24.0 * sigma * kappa;
  if (!(a > 0.0)) return std::nullopt;
  const double L = lipschitz;
  const double V = total_variance(variance);
  const double nu = 4.0 * L / lambda_m;
  const double c = 4.0 + 3.0 * sigma + 3.0 * sigma / (eta * L) + 6.0 * sigma * eta * V / L + 6.0 * sigma * c2 / L;
  const double e = 8.0 * nu * nu + 192.0 * nu * nu * V / (L * L);
  return (c * nu + std::sqrt(c * c * nu * nu + a * e)) / a;
}

std::optional<TauInterval> feasible_tau_interval(double beta, double sigma, double lipschitz, double op_norm_sq,
                                                 double lambda_m, double eta, double c2,
                                                 const VarianceConstants& variance) {
  const double L = lipschitz;
  const double V = total_variance(variance);
  const double bl = beta * lambda_m;
  const double lead = 1.0 - 16.0 * L / bl;
  const double delta =
      lead * lead - (24.0 * sigma / bl) * (16.0 * L * L / (sigma * bl) + L + beta * op_norm_sq + 1.0 / eta +
                                           (128.0 / (sigma * bl) + 2.0 * eta) * V + 2.0 * c2);
  if (delta < 0.0) return std::nullopt;
  const double scale = bl / (24.0 * sigma);
  const double root = std::sqrt(delta);
  return TauInterval{scale * (lead - root), scale * (lead + root)};
}

std::vector<double> eta_grid() {
  std::vector<double> grid;
  for (int k = -20; k <= 20; ++k) grid.push_back(std::ldexp(1.0, k));
  return grid;
}

ParamReport validate_params(const Problem& problem, const SolverConfig& config, const SpectralEstimates& spectral,
                            const LipschitzBound& lipschitz) {
  ParamReport r;
  r.beta = config.beta;
  r.tau = config.tau;
  r.sigma = config.sigma;
  r.lipschitz = lipschitz.L;
  r.spectral = spectral;
  r.c2_used = 1e-6 * config.tau;

  bool certified = true;
  try {
    r.variance = theoretical_constants(config.estimator, lipschitz, problem.n());
  } catch (const Error&) {
    // Unknown constants or an invalid estimator spec both fall back.
    r.variance = conservative_constants(config.estimator, lipschitz, problem.n());
    certified = false;
  }

  const double rhs = config.beta * spectral.op_norm_sq;
  r.checks.push_back({kCheckTauDominates, 2.0 * config.tau >= rhs ? CheckStatus::kPass : CheckStatus::kFail,
                      "2tau = " + fmt(2.0 * config.tau) + ", beta*||A||^2 = " + fmt(rhs)});

  const double sigma_bound =
      std::isfinite(spectral.condition_kappa) ? 1.0 / (24.0 * spectral.condition_kappa) : 0.0;
  r.checks.push_back({kCheckSigmaBound, config.sigma < sigma_bound ? CheckStatus::kPass : CheckStatus::kFail,
                      "sigma = " + fmt(config.sigma) + ", bound = " + fmt(sigma_bound)});

  const double lm = spectral.lambda_min_aat;
  const bool surjective = lm > 0.0;
  r.checks.push_back({kCheckSurjective, surjective ? CheckStatus::kPass : CheckStatus::kWarn,
                      surjective ? "lambda_m = " + fmt(lm) : "A A^T is singular; Psi and eta_tilde are undefined"});

  if (surjective) {
    double best = -std::numeric_limits<double>::infinity();
    for (double eta : eta_grid()) {
      const double v = eta_tilde(config.tau, config.beta, config.sigma, lipschitz.L, spectral.op_norm_sq, lm, eta,
                                 r.c2_used, r.variance);
      if (v > best) {
        best = v;
        r.eta_used = eta;
      }
    }
    r.eta_tilde = best;
    r.checks.push_back({kCheckEtaTilde, best > 0.0 ? CheckStatus::kPass : CheckStatus::kFail,
                        "eta_tilde = " + fmt(best) + " at eta = " + fmt(r.eta_used)});
  } else {
    r.checks.push_back({kCheckEtaTilde, CheckStatus::kWarn, "undefined (division by lambda_m)"});
  }

  r.checks.push_back({kCheckCertified, certified ? CheckStatus::kPass : CheckStatus::kWarn,
                      certified ? "proven constants for " + to_string(config.estimator.kind)
                                : "conservative defaults for " + to_string(config.estimator.kind)});
  return r;
}

std::optional<StabilityConstants> stability_constants_for(const ParamReport& report) {
  if (!(report.spectral.lambda_min_aat > 0.0)) return std::nullopt;
  return make_stability_constants(report.sigma, report.beta, report.tau, report.lipschitz,
                                  report.spectral.lambda_min_aat, report.eta_used, report.c2_used, report.variance);
}

}  // namespace sadmm
