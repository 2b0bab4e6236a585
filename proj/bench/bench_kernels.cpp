// Serial reference vs OpenMP kernel on the coastal40 fixture.

#include <benchmark/benchmark.h>

#include "floodsp/analysis.hpp"
#include "floodsp/fixtures.hpp"
#include "floodsp/heuristic.hpp"
#include "floodsp/recourse.hpp"

using namespace floodsp;

namespace {

const Fixture& coastal() {
  static const Fixture fx = make_fixture("coastal40");
  return fx;
}

MitigationPlan half_plan() {
  const auto& fx = coastal();
  std::vector<int> levels;
  for (int k = 0; k < fx.network.num_substations(); ++k) levels.push_back(k % 2);
  return MitigationPlan::from_levels(levels, fx.rhat);
}

void BM_EvaluatePlanSerial(benchmark::State& state) {
  const auto& fx = coastal();
  const auto plan = half_plan();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_plan_serial(fx.network, plan, fx.scenarios, LossWeights{}));
}

void BM_EvaluatePlanParallel(benchmark::State& state) {
  const auto& fx = coastal();
  const auto plan = half_plan();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_plan(fx.network, plan, fx.scenarios, LossWeights{}));
}

void BM_GreedySerial(benchmark::State& state) {
  const auto& fx = coastal();
  const auto schedule = CostSchedule::from_network(fx.network);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        greedy_serial(AttributeWeights{1.0, 0.0, 0.05}, Budget{static_cast<int>(state.range(0))}, fx.network, fx.scenarios, schedule, fx.rhat));
  }
}

void BM_GreedyParallel(benchmark::State& state) {
  const auto& fx = coastal();
  const auto schedule = CostSchedule::from_network(fx.network);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        greedy(AttributeWeights{1.0, 0.0, 0.05}, Budget{static_cast<int>(state.range(0))}, fx.network, fx.scenarios, schedule, fx.rhat));
  }
}

void BM_SparedCapacitySerial(benchmark::State& state) {
  const auto& fx = coastal();
  const auto plan = half_plan();
  for (auto _ : state) benchmark::DoNotOptimize(spared_capacity_serial(plan, fx.network, fx.scenarios));
}

void BM_SparedCapacityParallel(benchmark::State& state) {
  const auto& fx = coastal();
  const auto plan = half_plan();
  for (auto _ : state) benchmark::DoNotOptimize(spared_capacity(plan, fx.network, fx.scenarios));
}

}  // namespace

BENCHMARK(BM_EvaluatePlanSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluatePlanParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GreedySerial)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GreedyParallel)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SparedCapacitySerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SparedCapacityParallel)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
