#include <benchmark/benchmark.h>

#include "sadmm/estimators.hpp"

namespace {

using namespace sadmm;

FiniteSumLoss sigmoid_loss_fixture(Index n, Index d) {
  std::vector<LossComponent> comps;
  for (Index i = 0; i < n; ++i) comps.emplace_back(SigmoidComponent{Vector::Random(d), i % 2 ? 1.0 : -1.0});
  return FiniteSumLoss(std::move(comps));
}

void estimate_loop(benchmark::State& state, EstimatorKind kind) {
  const Index n = 4000, d = 112;
  const auto loss = sigmoid_loss_fixture(n, d);
  EstimatorSpec spec;
  spec.kind = kind;
  spec.batch = state.range(0);
  spec.restart_p = static_cast<double>(n) / static_cast<double>(spec.batch);
  auto est = make_estimator(spec, loss, Vector::Zero(d));
  Vector x = Vector::Zero(d);
  for (auto _ : state) {
    x[0] += 1e-6;
    benchmark::DoNotOptimize(est->estimate(loss, x));
  }
  state.counters["grad_evals"] =
      benchmark::Counter(static_cast<double>(est->gradient_evaluations()), benchmark::Counter::kAvgIterations);
}

void BM_Sgd(benchmark::State& state) { estimate_loop(state, EstimatorKind::kSgd); }
void BM_Saga(benchmark::State& state) { estimate_loop(state, EstimatorKind::kSaga); }
void BM_Svrg(benchmark::State& state) { estimate_loop(state, EstimatorKind::kSvrg); }
void BM_Sarah(benchmark::State& state) { estimate_loop(state, EstimatorKind::kSarah); }
BENCHMARK(BM_Sgd)->Arg(10)->Arg(100);
BENCHMARK(BM_Saga)->Arg(10)->Arg(100);
BENCHMARK(BM_Svrg)->Arg(10)->Arg(100);
BENCHMARK(BM_Sarah)->Arg(10)->Arg(100);

void BM_FullGradient(benchmark::State& state) {
  const auto loss = sigmoid_loss_fixture(4000, 112);
  const Vector x = Vector::Zero(112);
  for (auto _ : state) benchmark::DoNotOptimize(loss.full_gradient(x));
}
BENCHMARK(BM_FullGradient)->Unit(benchmark::kMicrosecond);

}  // namespace
