#include "sadmm/app/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace sadmm::app {

namespace {

struct Entry {
  std::string value;
  std::size_t line;
};
using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where(const Entry& e) { return "line " + std::to_string(e.line) + ": "; }

std::map<std::string, Section> parse_ini(const std::string& text) {
  static const std::set<std::string> kSections{"problem", "solver", "output"};
  std::map<std::string, Section> out;
  std::istringstream in(text);
  std::string raw;
  std::string current;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("line " + std::to_string(line) + ": malformed section header");
      current = trim(s.substr(1, s.size() - 2));
      if (!kSections.count(current))
        throw ConfigError("line " + std::to_string(line) + ": unknown section [" + current + "]");
      out[current];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line) + ": expected key = value");
    if (current.empty()) throw ConfigError("line " + std::to_string(line) + ": key outside any section");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line) + ": empty key");
    if (!out[current].emplace(key, Entry{value, line}).second)
      throw ConfigError("line " + std::to_string(line) + ": duplicate key \"" + key + "\"");
  }
  return out;
}

void reject_unknown(const Section& section, const std::string& name, const std::set<std::string>& allowed) {
  for (const auto& [key, entry] : section)
    if (!allowed.count(key)) throw ConfigError(where(entry) + "unknown key \"" + key + "\" in [" + name + "]");
}

double to_double(const std::string& key, const Entry& e) {
  const std::string& v = e.value;
  if (v == "inf" || v == "+inf" || v == "infinity") return std::numeric_limits<double>::infinity();
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || std::isnan(out))
    throw ConfigError(where(e) + "\"" + key + "\" expects a number, got \"" + v + "\"");
  return out;
}

long long to_int(const std::string& key, const Entry& e) {
  const std::string& v = e.value;
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(where(e) + "\"" + key + "\" expects an integer, got \"" + v + "\"");
  return out;
}

std::uint64_t to_seed(const std::string& key, const Entry& e) {
  const long long v = to_int(key, e);
  if (v < 0) throw ConfigError(where(e) + "\"" + key + "\" must be nonnegative");
  return static_cast<std::uint64_t>(v);
}

bool to_bool(const std::string& key, const Entry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  throw ConfigError(where(e) + "\"" + key + "\" expects true or false");
}

// Applies fn(key, entry) for every present key.
template <typename Fn>
void each(const Section& s, Fn fn) {
  for (const auto& [key, entry] : s) fn(key, entry);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

ProblemConfig parse_problem(const Section& s, const std::filesystem::path& base) {
  ProblemConfig pc;
  const auto b = s.find("builder");
  if (b == s.end()) throw ConfigError("[problem] needs a builder");
  pc.builder = b->second.value;

  std::set<std::string> allowed{"builder"};
  if (pc.builder == "synthetic_quadratic") {
    allowed.insert({"n", "d", "conditioning", "seed"});
  } else if (pc.builder == "fused_lasso") {
    allowed.insert({"data", "dim", "lambda1", "rho_c", "test_fraction", "split_seed"});
  } else if (pc.builder == "toy_reconstruction") {
    allowed.insert({"height", "width", "forward", "blur_radius", "keep", "noise_sigma", "lambda", "reg", "seed"});
  } else {
    throw ConfigError(where(b->second) + "unknown builder \"" + pc.builder + "\"");
  }
  reject_unknown(s, "problem", allowed);

  each(s, [&](const std::string& k, const Entry& e) {
    if (k == "n") pc.n = to_int(k, e);
    else if (k == "d") pc.d = to_int(k, e);
    else if (k == "conditioning") pc.conditioning = to_double(k, e);
    else if (k == "seed") pc.data_seed = pc.toy.seed = to_seed(k, e);
    else if (k == "data") pc.data = resolve(base, e.value);
    else if (k == "dim") pc.dim = to_int(k, e);
    else if (k == "lambda1") pc.lambda1 = to_double(k, e);
    else if (k == "rho_c") pc.rho_c = to_double(k, e);
    else if (k == "test_fraction") pc.test_fraction = to_double(k, e);
    else if (k == "split_seed") pc.split_seed = to_seed(k, e);
    else if (k == "height") pc.toy.height = to_int(k, e);
    else if (k == "width") pc.toy.width = to_int(k, e);
    else if (k == "blur_radius") pc.toy.blur_radius = to_int(k, e);
    else if (k == "keep") pc.toy.keep = to_double(k, e);
    else if (k == "noise_sigma") pc.toy.noise_sigma = to_double(k, e);
    else if (k == "lambda") pc.toy.lambda = to_double(k, e);
    else if (k == "forward") {
      if (e.value == "blur") pc.toy.forward = ForwardKind::kBlur;
      else if (e.value == "mask") pc.toy.forward = ForwardKind::kMask;
      else throw ConfigError(where(e) + "forward must be blur or mask");
    } else if (k == "reg") {
      if (e.value == "l0") pc.toy.reg = RegKind::kL0;
      else if (e.value == "l1") pc.toy.reg = RegKind::kL1;
      else throw ConfigError(where(e) + "reg must be l0 or l1");
    }
  });
  if (pc.builder == "fused_lasso" && pc.data.empty()) throw ConfigError("[problem] fused_lasso needs data");
  return pc;
}

SolverConfig parse_solver(const Section& s) {
  reject_unknown(s, "solver",
                 {"beta", "tau", "sigma", "estimator", "batch", "epoch_len", "p", "max_epochs", "residual_tol", "seed",
                  "output_rule", "trace_every"});
  SolverConfig c;
  each(s, [&](const std::string& k, const Entry& e) {
    try {
      if (k == "beta") c.beta = to_double(k, e);
      else if (k == "tau") c.tau = to_double(k, e);
      else if (k == "sigma") c.sigma = to_double(k, e);
      else if (k == "estimator") c.estimator.kind = parse_estimator_kind(e.value);
      else if (k == "batch") c.estimator.batch = to_int(k, e);
      else if (k == "epoch_len") c.estimator.epoch_len = to_int(k, e);
      else if (k == "p") c.estimator.restart_p = to_double(k, e);
      else if (k == "max_epochs") c.max_epochs = static_cast<int>(to_int(k, e));
      else if (k == "residual_tol") c.residual_tol = to_double(k, e);
      else if (k == "seed") c.seed = to_seed(k, e);
      else if (k == "output_rule") c.output_rule = parse_output_rule(e.value);
      else if (k == "trace_every") c.trace_every = static_cast<int>(to_int(k, e));
    } catch (const ParameterError& ex) {
      throw ConfigError(where(e) + ex.what());
    }
  });
  if (!(c.beta > 0.0)) throw ConfigError("[solver] beta must be positive");
  if (!(c.tau > 0.0)) throw ConfigError("[solver] tau must be positive");
  if (!(c.sigma > 0.0 && c.sigma <= 1.0)) throw ConfigError("[solver] sigma must lie in (0, 1]");
  if (c.max_epochs < 1) throw ConfigError("[solver] max_epochs must be >= 1");
  if (c.residual_tol < 0.0) throw ConfigError("[solver] residual_tol must be nonnegative");
  if (c.trace_every < 1) throw ConfigError("[solver] trace_every must be >= 1");
  return c;
}

OutputConfig parse_output(const Section& s, const std::filesystem::path& base) {
  reject_unknown(s, "output", {"trace", "diag_every", "plot_data", "label"});
  OutputConfig o;
  each(s, [&](const std::string& k, const Entry& e) {
    if (k == "trace") o.trace = resolve(base, e.value);
    else if (k == "diag_every") o.diag_every = static_cast<int>(to_int(k, e));
    else if (k == "plot_data") o.plot_data = to_bool(k, e);
    else if (k == "label") o.label = e.value;
  });
  if (o.diag_every < 0) throw ConfigError("[output] diag_every must be >= 0");
  return o;
}

}  // namespace

std::string RunConfig::method_label() const {
  return output.label.empty() ? to_string(solver.estimator.kind) : output.label;
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
  const auto sections = parse_ini(text);
  const auto p = sections.find("problem");
  if (p == sections.end()) throw ConfigError("missing [problem] section");
  static const Section kEmpty;
  const auto s = sections.find("solver");
  const auto o = sections.find("output");

  RunConfig rc;
  rc.problem = parse_problem(p->second, base_dir);
  rc.solver = parse_solver(s == sections.end() ? kEmpty : s->second);
  rc.output = parse_output(o == sections.end() ? kEmpty : o->second, base_dir);
  rc.solver.diag_every = rc.output.diag_every;
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config \"" + path.string() + "\"");
  std::ostringstream os;
  os << in.rdbuf();
  RunConfig rc = parse_run_config(os.str(), path.parent_path());
  rc.source = path;
  return rc;
}

BuiltProblem build_problem(const ProblemConfig& pc) {
  if (pc.builder == "synthetic_quadratic") {
    return {generate_synthetic_quadratic(pc.n, pc.d, pc.data_seed, pc.conditioning), std::nullopt, std::nullopt};
  }
  if (pc.builder == "fused_lasso") {
    LibsvmOptions opts;
    opts.dim = pc.dim;
    Dataset data = load_libsvm(pc.data.string(), opts);
    std::optional<Dataset> test;
    if (pc.test_fraction > 0.0) {
      auto [train, held] = train_test_split(data, pc.test_fraction, pc.split_seed);
      data = std::move(train);
      test = std::move(held);
    }
    const GraphSpec graph = build_graph(data, pc.rho_c);
    Problem problem = build_fused_lasso(data, pc.lambda1, graph);
    Problem::Metadata meta = problem.metadata();
    meta["dataset"] = pc.data.filename().string();
    return {Problem(problem.loss(), problem.reg(), problem.op(), problem.name(), std::move(meta)), std::move(test),
            std::nullopt};
  }
  if (pc.builder == "toy_reconstruction") {
    ToyReconstruction toy = build_toy_reconstruction(pc.toy);
    return {std::move(toy.problem), std::nullopt, std::move(toy.truth)};
  }
  throw ConfigError("unknown builder \"" + pc.builder + "\"");
}

}  // namespace sadmm::app
