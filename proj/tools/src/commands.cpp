#include "sadmm/app/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <thread>

#include "sadmm/app/trace.hpp"
#include "sadmm/dataset.hpp"

namespace sadmm::app {

namespace {

nlohmann::json nullable(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

// Infinity is not representable in JSON.
nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

template <typename Fn>
int guarded(std::ostream& err, Fn fn) {
  try {
    return fn();
  } catch (const DivergenceError& e) {
    err << "error: divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

std::filesystem::path with_suffix(const std::filesystem::path& p, const std::string& suffix) {
  return p.parent_path() / (p.stem().string() + suffix);
}

}  // namespace

nlohmann::json report_to_json(const ParamReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"status", to_string(c.status)}, {"detail", c.detail}});
  return {
      {"eta_tilde", nullable(r.eta_tilde)},
      {"eta_used", r.eta_used},
      {"c2_used", r.c2_used},
      {"beta", r.beta},
      {"tau", r.tau},
      {"sigma", r.sigma},
      {"lipschitz", r.lipschitz},
      {"op_norm_sq", r.spectral.op_norm_sq},
      {"lambda_min_aat", r.spectral.lambda_min_aat},
      {"kappa", finite_or_null(r.spectral.condition_kappa)},
      {"variance",
       {{"v1", r.variance.v1},
        {"v2", r.variance.v2},
        {"v_upsilon", r.variance.v_upsilon},
        {"rho", r.variance.rho},
        {"certified", r.variance.certified}}},
      {"checks", checks},
      {"all_pass", r.all_pass()},
  };
}

void print_report(const ParamReport& r, std::ostream& out) {
  std::size_t width = 0;
  for (const auto& c : r.checks) width = std::max(width, c.name.size());
  out << "parameter report\n";
  for (const auto& c : r.checks)
    out << "  " << std::left << std::setw(static_cast<int>(width)) << c.name << "  " << std::setw(4)
        << to_string(c.status) << "  " << c.detail << '\n';
  out << "  eta_tilde = " << (r.eta_tilde ? format_double(*r.eta_tilde) : std::string("undefined"))
      << ", eta = " << format_double(r.eta_used) << ", C2 = " << format_double(r.c2_used) << '\n';
}

SolveOutcome execute(const RunConfig& config) {
  BuiltProblem built = build_problem(config.problem);
  const Problem& problem = built.problem;
  const LipschitzBound lip = problem.loss().lipschitz_bound();
  ParamReport report = validate_params(problem, config.solver, problem.op().spectral(), lip);

  SolverConfig solver = config.solver;
  if (solver.diag_every > 0) solver.stability = stability_constants_for(report);
  RunResult result = run(problem, solver);
  return {std::move(built), std::move(report), std::move(result)};
}

int cmd_solve(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig config = load_run_config(config_path);
    SolveOutcome o = execute(config);
    const Problem& problem = o.built.problem;
    const RunResult& res = o.result;

    print_report(o.report, out);
    const double objective = problem.objective(res.x_out, res.z_out);
    out << "problem " << problem.name() << " n=" << problem.n() << " d=" << problem.dim() << " m=" << problem.out_dim()
        << '\n'
        << "estimator " << to_string(config.solver.estimator.kind) << " iterations " << res.iterations
        << " gradient_evaluations " << res.gradient_evaluations << (res.stopped_early ? " (stopped early)" : "") << '\n'
        << "output iterate " << res.output_iter << " (" << to_string(config.solver.output_rule) << ")\n"
        << "objective " << format_double(objective) << '\n';

    nlohmann::json summary = {
        {"config", config_path.string()},
        {"problem", {{"name", problem.name()}, {"n", problem.n()}, {"d", problem.dim()}, {"m", problem.out_dim()}}},
        {"metadata", problem.metadata()},
        {"solver",
         {{"beta", config.solver.beta},
          {"tau", config.solver.tau},
          {"sigma", config.solver.sigma},
          {"estimator", to_string(config.solver.estimator.kind)},
          {"batch", config.solver.estimator.batch},
          {"epoch_len", config.solver.estimator.epoch_len},
          {"p", config.solver.estimator.restart_p},
          {"max_epochs", config.solver.max_epochs},
          {"residual_tol", finite_or_null(config.solver.residual_tol)},
          {"seed", config.solver.seed},
          {"output_rule", to_string(config.solver.output_rule)},
          {"trace_every", config.solver.trace_every},
          {"diag_every", config.solver.diag_every}}},
        {"report", report_to_json(o.report)},
        {"iterations", res.iterations},
        {"gradient_evaluations", res.gradient_evaluations},
        {"stopped_early", res.stopped_early},
        {"output_iter", res.output_iter},
        {"objective", objective},
        {"primal_residual", (problem.op().apply(res.x_out) - res.z_out).norm()},
    };
    if (o.built.test_set) {
      const Dataset& test = *o.built.test_set;
      const double test_loss = mean_sigmoid_loss(test, res.x_out);
      const double test_objective = test_loss + problem.reg().value(problem.op().apply(res.x_out));
      summary["test"] = {{"samples", test.n()}, {"mean_sigmoid_loss", test_loss}, {"objective_with_regularizer", test_objective}};
      out << "test mean_sigmoid_loss " << format_double(test_loss) << " objective_with_regularizer "
          << format_double(test_objective) << '\n';
    }

    const auto& trace_path = config.output.trace;
    if (!trace_path.empty()) {
      if (trace_path.has_parent_path()) std::filesystem::create_directories(trace_path.parent_path());
      std::ofstream csv(trace_path);
      if (!csv) throw ConfigError("cannot write trace \"" + trace_path.string() + "\"");
      write_trace(csv, res.trace, config.solver.diag_every > 0);
      std::ofstream(with_suffix(trace_path, ".json")) << summary.dump(2) << '\n';
      out << "trace " << trace_path.string() << '\n';

      if (config.output.plot_data) {
        std::ofstream xs(with_suffix(trace_path, ".x.csv"));
        for (Index j = 0; j < res.x_out.size(); ++j) xs << format_double(res.x_out[j]) << '\n';
        if (o.built.truth) {
          const auto& toy = config.problem.toy;
          write_pgm(*o.built.truth, toy.height, toy.width, with_suffix(trace_path, ".truth.pgm").string());
          write_pgm(res.x_out, toy.height, toy.width, with_suffix(trace_path, ".recon.pgm").string());
        }
      }
    } else if (config.output.plot_data) {
      err << "note: plot_data needs an output trace path; skipped\n";
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_validate(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig config = load_run_config(config_path);
    const BuiltProblem built = build_problem(config.problem);
    const Problem& problem = built.problem;
    const ParamReport report =
        validate_params(problem, config.solver, problem.op().spectral(), problem.loss().lipschitz_bound());
    print_report(report, out);
    out << report_to_json(report).dump(2) << '\n';
    return static_cast<int>(report.all_pass() ? kExitOk : kExitValidation);
  });
}

std::vector<SummaryRow> bench_summary(const std::vector<BenchRow>& rows) {
  // method -> config -> rows in file order (epoch non-decreasing per run)
  std::map<std::string, std::map<std::string, std::vector<const BenchRow*>>> runs;
  std::map<std::string, double> max_epoch;
  for (const auto& r : rows) {
    if (r.status != "ok") continue;
    runs[r.method][r.config].push_back(&r);
    max_epoch[r.method] = std::max(max_epoch[r.method], r.epoch);
  }
  std::vector<SummaryRow> out;
  for (const auto& [method, by_config] : runs) {
    const int last_cp = static_cast<int>(std::floor(max_epoch[method] + 1e-9));
    for (int cp = 1; cp <= last_cp; ++cp) {
      std::vector<double> values;
      for (const auto& [cfg, run_rows] : by_config) {
        const BenchRow* last = nullptr;
        for (const BenchRow* r : run_rows)
          if (r->epoch <= cp + 1e-9) last = r;
        if (last != nullptr) values.push_back(last->objective);
      }
      if (values.empty()) continue;
      std::sort(values.begin(), values.end());
      const std::size_t m = values.size();
      const double median = m % 2 == 1 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
      out.push_back({method, cp, median, static_cast<int>(m)});
    }
  }
  return out;
}

int cmd_bench(const std::filesystem::path& dir, const std::filesystem::path& out_csv, const BenchOptions& options,
              std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    if (!std::filesystem::is_directory(dir)) throw ConfigError("not a directory: \"" + dir.string() + "\"");
    std::vector<std::filesystem::path> configs;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".ini") configs.push_back(entry.path());
    std::sort(configs.begin(), configs.end());
    if (configs.empty()) throw ConfigError("no *.ini configs in \"" + dir.string() + "\"");

    unsigned threads = options.threads;
    if (threads == 0) {
      if (const char* env = std::getenv("SADMM_THREADS")) threads = static_cast<unsigned>(std::max(1, std::atoi(env)));
      else threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(configs.size()));

    struct Slot {
      std::vector<BenchRow> rows;
      bool failed = false;
      bool diverged = false;
    };
    std::vector<Slot> slots(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t k = next++; k < configs.size(); k = next++) {
        Slot& slot = slots[k];
        const std::string name = configs[k].filename().string();
        std::string method = name;
        std::uint64_t seed = 0;
        try {
          const RunConfig config = load_run_config(configs[k]);
          method = config.method_label();
          seed = config.solver.seed;
          const SolveOutcome o = execute(config);
          for (const auto& rec : o.result.trace) {
            if (!rec.objective) continue;
            slot.rows.push_back({method, seed, name, rec.iter, rec.epoch, *rec.objective, rec.primal_residual, "ok"});
          }
        } catch (const std::exception& e) {
          slot.failed = true;
          slot.diverged = dynamic_cast<const DivergenceError*>(&e) != nullptr;
          std::string msg = e.what();
          std::replace(msg.begin(), msg.end(), ',', ';');
          std::replace(msg.begin(), msg.end(), '\n', ' ');
          slot.rows.push_back({method, seed, name, 0, 0.0, 0.0, 0.0, "error: " + msg});
        }
      }
    };
    {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    std::vector<BenchRow> all;
    std::size_t failures = 0;
    bool all_diverged = true;
    for (std::size_t k = 0; k < slots.size(); ++k) {
      if (slots[k].failed) {
        ++failures;
        all_diverged = all_diverged && slots[k].diverged;
        err << "run " << configs[k].filename().string() << " failed: " << slots[k].rows.back().status << '\n';
      }
      all.insert(all.end(), slots[k].rows.begin(), slots[k].rows.end());
    }

    if (out_csv.has_parent_path()) std::filesystem::create_directories(out_csv.parent_path());
    std::ofstream csv(out_csv);
    if (!csv) throw ConfigError("cannot write \"" + out_csv.string() + "\"");
    csv << "method,seed,config,iter,epoch,objective,primal_residual,status\n";
    for (const auto& r : all) {
      csv << r.method << ',' << r.seed << ',' << r.config << ',';
      if (r.status == "ok")
        csv << r.iter << ',' << format_double(r.epoch) << ',' << format_double(r.objective) << ','
            << format_double(r.primal_residual);
      else
        csv << ",,,";
      csv << ',' << r.status << '\n';
    }
    out << "bench: " << configs.size() << " runs, " << failures << " failed, wrote " << out_csv.string() << '\n';

    if (options.summary) {
      const auto path = with_suffix(out_csv, ".summary.csv");
      std::ofstream sum(path);
      if (!sum) throw ConfigError("cannot write \"" + path.string() + "\"");
      sum << "method,epoch,median_objective,runs\n";
      for (const auto& s : bench_summary(all))
        sum << s.method << ',' << s.epoch << ',' << format_double(s.median_objective) << ',' << s.runs << '\n';
      out << "summary " << path.string() << '\n';
    }
    if (failures == configs.size()) return all_diverged ? kExitDivergence : kExitConfig;
    return kExitOk;
  });
}

}  // namespace sadmm::app
