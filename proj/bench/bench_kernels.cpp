// Parallel kernels against their serial references. Thread count follows
// OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "satsched/generator.hpp"
#include "satsched/solver.hpp"
#include "satsched/windowing.hpp"

using namespace satsched;

namespace {

SchedulingInstance instance_of(benchmark::State& state, TargetStyle style) {
  return normalize_and_clip(generate({style, static_cast<std::size_t>(state.range(0)), 6, 86400, 11, std::nullopt}));
}

void stats_parallel(benchmark::State& state) {
  const auto inst = instance_of(state, TargetStyle::C);
  for (auto _ : state) benchmark::DoNotOptimize(resource_stats(inst));
}

void stats_serial(benchmark::State& state) {
  const auto inst = instance_of(state, TargetStyle::C);
  for (auto _ : state) benchmark::DoNotOptimize(resource_stats_serial(inst));
}

void subintervals_parallel(benchmark::State& state) {
  const auto inst = instance_of(state, TargetStyle::M);
  for (auto _ : state) benchmark::DoNotOptimize(generate_subintervals(inst));
}

void subintervals_serial(benchmark::State& state) {
  const auto inst = instance_of(state, TargetStyle::M);
  for (auto _ : state) benchmark::DoNotOptimize(generate_subintervals_serial(inst));
}

// Node-limited so every iteration does the same amount of search.
void solve_parallel(benchmark::State& state) {
  const auto inst = instance_of(state, TargetStyle::C);
  const auto prep = preprocess(inst);
  SolveLimits limits;
  limits.node_limit = 20000;
  for (auto _ : state) benchmark::DoNotOptimize(solve_exact(inst, prep, ObjectiveKind::Weight, limits));
}

void solve_serial(benchmark::State& state) {
  const auto inst = instance_of(state, TargetStyle::C);
  const auto prep = preprocess(inst);
  SolveLimits limits;
  limits.node_limit = 20000;
  for (auto _ : state) benchmark::DoNotOptimize(solve_exact_serial(inst, prep, ObjectiveKind::Weight, limits));
}

}  // namespace

BENCHMARK(stats_parallel)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(stats_serial)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(subintervals_parallel)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(subintervals_serial)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(solve_parallel)->Arg(60)->Unit(benchmark::kMillisecond);
BENCHMARK(solve_serial)->Arg(60)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
