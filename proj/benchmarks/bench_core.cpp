#include "eotbench/builder.hpp"
#include "eotbench/drift.hpp"
#include "eotbench/mala.hpp"
#include "eotbench/metrics.hpp"
#include "eotbench/plan.hpp"
#include "eotbench/sde.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace eotbench;

BenchmarkPair preset(Index dim, double eps) {
  MixturesPresetSpec spec;
  spec.dim = dim;
  spec.epsilon = eps;
  spec.seed = 1;
  return build_mixtures_preset(spec);
}

void BM_OptimalDrift(benchmark::State& state) {
  const auto pair = preset(state.range(0), 1.0);
  CounterRng rng(Seed{3, 0}, 0);
  const Point x = rng.normal_vector(pair.dim());
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimal_drift(pair, x, t));
    t = t < 0.99 ? t + 0.01 : 0.0;
  }
}
BENCHMARK(BM_OptimalDrift)->Arg(2)->Arg(16)->Arg(64)->Arg(128);

void BM_ConditionalPlan(benchmark::State& state) {
  const auto pair = preset(state.range(0), 1.0);
  CounterRng rng(Seed{3, 0}, 0);
  const Point x = rng.normal_vector(pair.dim());
  for (auto _ : state) benchmark::DoNotOptimize(conditional_plan(pair, x));
}
BENCHMARK(BM_ConditionalPlan)->Arg(2)->Arg(16)->Arg(64)->Arg(128);

void BM_SampleJoint(benchmark::State& state) {
  const auto pair = preset(state.range(0), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(sample_joint(pair, Seed{5, 0}, 1000));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SampleJoint)->Arg(2)->Arg(64);

void BM_SimulateEndpoints(benchmark::State& state) {
  const auto pair = preset(2, 1.0);
  const auto drift = DriftField::optimal(pair);
  const SampleMatrix x0 = sample_source(pair, Seed{7, 0}, 1000);
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_endpoints(drift, x0, pair.epsilon(), 200, Seed{8, 0}));
  }
  state.SetItemsProcessed(state.iterations() * 1000 * 200);
}
BENCHMARK(BM_SimulateEndpoints)->Unit(benchmark::kMillisecond);

void BM_ReverseDensity(benchmark::State& state) {
  const auto pair = preset(state.range(0), 1.0);
  CounterRng rng(Seed{3, 0}, 0);
  const Point x = rng.normal_vector(pair.dim());
  const Point y = rng.normal_vector(pair.dim());
  for (auto _ : state) benchmark::DoNotOptimize(log_reverse_density_unnormalized(pair, y, x));
}
BENCHMARK(BM_ReverseDensity)->Arg(2)->Arg(64);

void BM_MmdRbf(benchmark::State& state) {
  const auto pair = preset(2, 1.0);
  const SampleMatrix a = sample_target(pair, Seed{1, 0}, static_cast<std::size_t>(state.range(0)));
  const SampleMatrix b = sample_source(pair, Seed{2, 0}, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mmd_rbf(a, b));
}
BENCHMARK(BM_MmdRbf)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
