#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "sadmm/dataset.hpp"
#include "sadmm/errors.hpp"
#include "sadmm/problems.hpp"
#include "sadmm/solver.hpp"

namespace sadmm::app {

/// Malformed or out-of-schema run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct ProblemConfig {
  std::string builder;  // synthetic_quadratic | fused_lasso | toy_reconstruction

  // synthetic_quadratic
  Index n = 200;
  Index d = 20;
  double conditioning = 1.0;
  std::uint64_t data_seed = 0;

  // fused_lasso
  std::filesystem::path data;
  std::optional<Index> dim;
  double lambda1 = kDefaultFusedLambda;
  double rho_c = 0.5;
  double test_fraction = 0.0;
  std::uint64_t split_seed = 0;

  // toy_reconstruction
  ToyReconstructionSpec toy;
};

struct OutputConfig {
  std::filesystem::path trace;  // empty: no CSV written
  int diag_every = 0;
  bool plot_data = false;
  std::string label;  // method label for bench; defaults to the estimator name
};

/// INI file with sections [problem], [solver], [output]. Unknown sections
/// and keys are rejected; paths are resolved against the file's directory.
struct RunConfig {
  std::filesystem::path source;
  ProblemConfig problem;
  SolverConfig solver;
  OutputConfig output;

  std::string method_label() const;
};

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

struct BuiltProblem {
  Problem problem;
  std::optional<Dataset> test_set;  // fused_lasso with test_fraction > 0
  std::optional<Vector> truth;      // toy_reconstruction ground truth
};

BuiltProblem build_problem(const ProblemConfig& config);

}  // namespace sadmm::app
