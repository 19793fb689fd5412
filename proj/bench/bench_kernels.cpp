// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS set to the
// thread count of interest; on a single core the parallel variants show
// their scheduling overhead only.
#include <benchmark/benchmark.h>

#include "risjam/config.hpp"
#include "risjam/harness.hpp"
#include "risjam/kernels.hpp"

using namespace risjam;

namespace {

ChannelSnapshot make_snapshot(int n, std::uint64_t seed) {
  RandomStream rng(seed, "bench");
  ChannelSnapshot s;
  s.h_bu = 0.3 * rng.complex_normal();
  s.h_ju = 0.3 * rng.complex_normal();
  s.h_ru.resize(n);
  s.h_br.resize(n);
  s.h_jr.resize(n);
  for (int i = 0; i < n; ++i) {
    s.h_ru[i] = rng.complex_normal();
    s.h_br[i] = rng.complex_normal();
    s.h_jr[i] = rng.complex_normal();
  }
  return s;
}

std::vector<ChannelSnapshot> make_batch(int count) {
  std::vector<ChannelSnapshot> out;
  for (int i = 0; i < count; ++i) out.push_back(make_snapshot(8, 100 + static_cast<std::uint64_t>(i)));
  return out;
}

void BM_GridSerial(benchmark::State& state) {
  const auto s = make_snapshot(3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::grid_search_serial(s, 1.0, 1.0, 0.1, state.range(0)));
}
void BM_GridParallel(benchmark::State& state) {
  const auto s = make_snapshot(3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::grid_search_parallel(s, 1.0, 1.0, 0.1, state.range(0)));
}
BENCHMARK(BM_GridSerial)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridParallel)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_DinkelbachSerial(benchmark::State& state) {
  const auto batch = make_batch(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::dinkelbach_batch_serial(batch, 1.0, 1.0, 0.1, {}));
}
void BM_DinkelbachParallel(benchmark::State& state) {
  const auto batch = make_batch(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::dinkelbach_batch_parallel(batch, 1.0, 1.0, 0.1, {}));
}
BENCHMARK(BM_DinkelbachSerial)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DinkelbachParallel)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_MonteCarloSerial(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::direct_power_mc_serial(80.0, 2.0, 3.5, 1e-3, 1, state.range(0), 16));
}
void BM_MonteCarloParallel(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::direct_power_mc_parallel(80.0, 2.0, 3.5, 1e-3, 1, state.range(0), 16));
}
BENCHMARK(BM_MonteCarloSerial)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloParallel)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

// Evaluation rollouts of an untrained agent on the desk-sized scenario.
struct EvalFixture {
  Scenario scenario;
  Agent agent;
  static EvalFixture make() {
    Scenario s = default_scenario();
    s.system.ris_rows = 2;
    s.system.ris_cols = 4;
    s = with_mission_time(s, 10.0);
    RandomStream init(0, "bench/init");
    return {s, Agent(Algorithm::td3, kObservationDim, 11, s.hyper, init)};
  }
};

void BM_EvaluateSerial(benchmark::State& state) {
  const auto f = EvalFixture::make();
  for (auto _ : state)
    benchmark::DoNotOptimize(evaluate(f.agent, f.scenario, TrainAlgorithm::td3, state.range(0), 0, false));
}
void BM_EvaluateParallel(benchmark::State& state) {
  const auto f = EvalFixture::make();
  for (auto _ : state)
    benchmark::DoNotOptimize(evaluate(f.agent, f.scenario, TrainAlgorithm::td3, state.range(0), 0, true));
}
BENCHMARK(BM_EvaluateSerial)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateParallel)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
