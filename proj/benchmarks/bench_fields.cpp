#include <benchmark/benchmark.h>

#include "twocharge/forces.hpp"
#include "twocharge/instantaneous.hpp"
#include "twocharge/iterated.hpp"

using namespace twocharge;

namespace {

StateVector start(const SystemParams& p, double r0) { return circular_initial_condition(p, r0); }

void BM_ForceKernel(benchmark::State& state) {
  const FieldEvalInput in{{1, 2, 0.5}, {0.1, 0.3, 0}, {-3, 0.5, 0}, {-0.2, 0.1, 0.05}, Branch::retarded};
  for (auto _ : state) benchmark::DoNotOptimize(force_kernel(in, -1));
}
BENCHMARK(BM_ForceKernel);

void BM_InstantaneousField(benchmark::State& state) {
  const SystemParams p = make_params(2.0, -1, 0.5);
  const StateVector x = start(p, 50.0);
  for (auto _ : state) benchmark::DoNotOptimize(h0_field(x, p));
}
BENCHMARK(BM_InstantaneousField);

void BM_IteratedField(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const double alpha = state.range(1) == 0 ? 0.0 : 0.5;
  const SystemParams p = make_params(1.0, -1, alpha);
  const StateVector x = start(p, 20.0);
  const LevelConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(h_field(n, x, p, cfg));
}
BENCHMARK(BM_IteratedField)->ArgsProduct({{1, 2}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_LevelZeroToThreshold(benchmark::State& state) {
  const SystemParams p = make_params(static_cast<double>(state.range(0)), -1, 0.5);
  const StateVector x = start(p, 50.0);
  for (auto _ : state) benchmark::DoNotOptimize(trajectory(0, x, p, LevelConfig{}, StopCondition{}));
}
BENCHMARK(BM_LevelZeroToThreshold)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_LevelOneSpan(benchmark::State& state) {
  const SystemParams p = make_params(1.0, -1, 0.5);
  const StateVector x = start(p, 50.0);
  StopCondition stop;
  stop.t_limit = 1000.0;
  for (auto _ : state) benchmark::DoNotOptimize(trajectory(1, x, p, LevelConfig{}, stop));
}
BENCHMARK(BM_LevelOneSpan)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
