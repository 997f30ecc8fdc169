#include <iostream>

#include <CLI11.hpp>

#include "sadmm/app/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Stochastic linearized ADMM with variance-reduced gradients"};
  app.require_subcommand(1);

  std::string config;
  auto* solve = app.add_subcommand("solve", "run the solver on a config and write its trace");
  solve->add_option("config", config, "run config (INI)")->required();

  auto* validate = app.add_subcommand("validate", "check (beta, tau, sigma) against the convergence conditions");
  validate->add_option("config", config, "run config (INI)")->required();

  std::string dir, out_csv;
  bool summary = false;
  unsigned threads = 0;
  auto* bench = app.add_subcommand("bench", "run every *.ini in a directory and merge the traces");
  bench->add_option("dir", dir, "directory of run configs")->required();
  bench->add_option("-o,--output", out_csv, "combined long-format CSV")->required();
  bench->add_flag("--summary", summary, "also write per-method medians at integer epochs");
  bench->add_option("-j,--threads", threads, "worker count (default: SADMM_THREADS or all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage errors share the config-error exit code.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : sadmm::app::kExitConfig;
  }

  if (*solve) return sadmm::app::cmd_solve(config, std::cout, std::cerr);
  if (*validate) return sadmm::app::cmd_validate(config, std::cout, std::cerr);
  sadmm::app::BenchOptions opts;
  opts.summary = summary;
  opts.threads = threads;
  return sadmm::app::cmd_bench(dir, out_csv, opts, std::cout, std::cerr);
}
