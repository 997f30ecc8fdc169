#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sadmm/app/config.hpp"
#include "sadmm/validator.hpp"

namespace sadmm::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,      // config or data error
  kExitDivergence = 2,  // non-finite iterate
  kExitValidation = 3,  // validate: some check warned or failed
};

nlohmann::json report_to_json(const ParamReport& report);
void print_report(const ParamReport& report, std::ostream& out);

/// Builds the configured problem, validates the parameters and runs the
/// solver. Throws like the core library.
struct SolveOutcome {
  BuiltProblem built;
  ParamReport report;
  RunResult result;
};
SolveOutcome execute(const RunConfig& config);

/// sadmm solve <cfg>: report header, run, trace CSV plus a <trace>.json
/// sidecar with the run summary.
int cmd_solve(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);

/// sadmm validate <cfg>: aligned report and a JSON block.
int cmd_validate(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);

struct BenchRow {
  std::string method;
  std::uint64_t seed = 0;
  std::string config;
  std::int64_t iter = 0;
  double epoch = 0.0;
  double objective = 0.0;
  double primal_residual = 0.0;
  std::string status;  // "ok" or the error message (numeric fields unset)
};

struct SummaryRow {
  std::string method;
  int epoch = 0;
  double median_objective = 0.0;
  int runs = 0;
};

/// Per method and integer epoch checkpoint: the median over runs of each
/// run's last objective at epoch <= checkpoint, for checkpoints up to the
/// method's largest epoch. Runs are keyed by config.
std::vector<SummaryRow> bench_summary(const std::vector<BenchRow>& rows);

struct BenchOptions {
  bool summary = false;
  unsigned threads = 0;  // 0: SADMM_THREADS, else hardware concurrency
};

/// sadmm bench <dir> -o <csv>: every *.ini in dir (sorted), long-format CSV
/// method,seed,config,iter,epoch,objective,primal_residual,status. With
/// summary, also <csv stem>.summary.csv. Exit 0 unless every run failed.
int cmd_bench(const std::filesystem::path& dir, const std::filesystem::path& out_csv, const BenchOptions& options,
              std::ostream& out, std::ostream& err);

}  // namespace sadmm::app
