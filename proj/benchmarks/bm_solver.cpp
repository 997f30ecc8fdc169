#include <benchmark/benchmark.h>

#include "sadmm/problems.hpp"
#include "sadmm/solver.hpp"

namespace {

using namespace sadmm;

void BM_SolverStep(benchmark::State& state) {
  ToyReconstructionSpec spec;
  spec.height = 32;
  spec.width = 32;
  const auto toy = build_toy_reconstruction(spec);
  SolverConfig config;
  config.tau = 20.0;
  config.estimator.kind = static_cast<EstimatorKind>(state.range(0));
  config.estimator.batch = 32;
  SolverState st = initial_state(toy.problem);
  auto est = make_estimator(config.estimator, toy.problem.loss(), st.x);
  StepOptions opts;
  opts.record_objective = false;
  for (auto _ : state) benchmark::DoNotOptimize(step(st, toy.problem, config, *est, opts));
}
BENCHMARK(BM_SolverStep)
    ->Arg(static_cast<int>(EstimatorKind::kSgd))
    ->Arg(static_cast<int>(EstimatorKind::kSaga))
    ->Arg(static_cast<int>(EstimatorKind::kSarah));

void BM_SyntheticRun(benchmark::State& state) {
  const Problem problem = generate_synthetic_quadratic(500, 20, 1, 10.0);
  SolverConfig config;
  config.tau = 400.0;
  config.estimator.kind = EstimatorKind::kSaga;
  config.estimator.batch = 10;
  config.max_epochs = 5;
  config.trace_every = 50;
  for (auto _ : state) benchmark::DoNotOptimize(run(problem, config));
}
BENCHMARK(BM_SyntheticRun)->Unit(benchmark::kMillisecond);

}  // namespace
