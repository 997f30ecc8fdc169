#include <benchmark/benchmark.h>

#include "sadmm/linops.hpp"

namespace {

using namespace sadmm;

void BM_FiniteDifference2DApply(benchmark::State& state) {
  const Index side = state.range(0);
  const auto op = LinearOperator::finite_difference_2d(side, side);
  const Vector x = Vector::LinSpaced(side * side, -1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(op.apply(x));
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_FiniteDifference2DApply)->Arg(64)->Arg(256);

void BM_FiniteDifference2DAdjoint(benchmark::State& state) {
  const Index side = state.range(0);
  const auto op = LinearOperator::finite_difference_2d(side, side);
  const Vector y = Vector::LinSpaced(op.out_dim(), -1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(op.adjoint(y));
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_FiniteDifference2DAdjoint)->Arg(64)->Arg(256);

void BM_DenseApply(benchmark::State& state) {
  const Index m = state.range(0);
  const auto op = LinearOperator::dense(RowMajorMatrix::Random(m, 112));
  const Vector x = Vector::Random(112);
  for (auto _ : state) benchmark::DoNotOptimize(op.apply(x));
}
BENCHMARK(BM_DenseApply)->Arg(128)->Arg(1024);

void BM_SpectralEstimate(benchmark::State& state) {
  const auto op = LinearOperator::finite_difference_1d(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_spectral(op, 1e-8, 200000, 0));
}
BENCHMARK(BM_SpectralEstimate)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
