#include <benchmark/benchmark.h>

#include "dauction/sim.hpp"

namespace {

using namespace dauction;

const MarketSetup& flagship_setup() {
  static const MarketSetup setup = [] {
    ExperimentConfig c;
    auto inst = resolve_instance(c.instance);
    auto [ba, sa] = resolve_alphas(c, inst.profile);
    return make_setup(c, inst.profile, ba, sa);
  }();
  return setup;
}

void BM_PathsSerial(benchmark::State& state) {
  const auto& setup = flagship_setup();
  const auto paths = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_paths_serial(setup, 5000, 10, 1, paths));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(paths) * 5000);
}

void BM_PathsOpenMP(benchmark::State& state) {
  const auto& setup = flagship_setup();
  const auto paths = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_paths(setup, 5000, 10, 1, paths));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(paths) * 5000);
}

void BM_StepRound(benchmark::State& state) {
  const auto& setup = flagship_setup();
  PathState st = initial_state(setup, Rng(1));
  for (auto _ : state) benchmark::DoNotOptimize(step_round(st, setup).k);
}

}  // namespace

BENCHMARK(BM_PathsSerial)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PathsOpenMP)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StepRound);

BENCHMARK_MAIN();
