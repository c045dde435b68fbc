// Solver and policy timings. The offline family runs algorithm1 on the
// Table 2 frame counts so its growth in N can be read off directly:
//   ehtx_benchmarks --benchmark_filter=Algorithm1

#include <benchmark/benchmark.h>

#include <vector>

#include "ehtx/experiment.hpp"
#include "ehtx/offline_opt.hpp"
#include "ehtx/online.hpp"
#include "ehtx/recipes.hpp"
#include "ehtx/rng.hpp"
#include "ehtx/single_frame.hpp"

using namespace ehtx;

namespace {

OfflineProblem random_problem(std::size_t N, std::uint64_t seed) {
  CounterStream rng(seed, 0, StreamId::Fitting);
  OfflineProblem prob;
  prob.battery = make_internal_resistance(0.1, 5.0);
  for (std::size_t i = 0; i < N; ++i) {
    FrameSpec f = results_frame(0.01);
    f.harvested_power_c = 0.05 + 0.15 * rng.uniform01();
    f.channel_gain_h = rng.exponential(1.0);
    prob.frames.push_back(f);
  }
  return prob;
}

void BM_SingleFrame(benchmark::State& state) {
  const BatteryModel m = make_internal_resistance(0.02, 5.0);
  FrameSpec f = results_frame(0.05);
  f.harvested_power_c = 0.1;
  SingleFrameOptions opt;
  opt.grid_check_points = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_single_frame(f, m, 0.005, opt).rate);
}
BENCHMARK(BM_SingleFrame)->Arg(0)->Arg(256)->Arg(10000);

void BM_Algorithm1(benchmark::State& state) {
  const OfflineProblem prob = random_problem(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(algorithm1(prob).rate_avg);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Algorithm1)->Arg(25)->Arg(50)->Arg(75)->Arg(100)->Unit(benchmark::kMillisecond)->Complexity();

void BM_SolveP2(benchmark::State& state) {
  OfflineProblem prob = random_problem(static_cast<std::size_t>(state.range(0)), 9);
  prob.battery.capacity_B = 1e6;
  prob.circuit_zero = true;
  for (auto _ : state) benchmark::DoNotOptimize(solve_p2(prob).rate_avg);
}
BENCHMARK(BM_SolveP2)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_DpBuild(benchmark::State& state) {
  const Scenario s = fig7_scenario(5.0);
  for (auto _ : state) {
    const DpPolicy dp = dp_build(s.harvest_distribution(), s.gain_distribution(), s.frame_template, s.battery,
                                 s.dp_grid_step, s.N);
    benchmark::DoNotOptimize(dp.expected_value(0, 0));
  }
}
BENCHMARK(BM_DpBuild)->Unit(benchmark::kMillisecond);

void BM_PolicyTrial(benchmark::State& state) {
  Scenario s = fig7_scenario(5.0);
  s.trials = 20;
  const PolicyId id = kFig7Policies[static_cast<std::size_t>(state.range(0))];
  state.SetLabel(to_string(id));
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(s, {id}).policies[0].mean_rate_bps);
}
BENCHMARK(BM_PolicyTrial)->DenseRange(0, 5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
