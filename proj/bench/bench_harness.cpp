#include <benchmark/benchmark.h>

#include "coinstream/game_of_coins.hpp"
#include "coinstream/harness.hpp"

using namespace coinstream;

namespace {

ExperimentConfig goc_config(std::size_t n, std::size_t trials) {
  ExperimentConfig c;
  c.name = "bench";
  c.algorithm = Algorithm::game_of_coins;
  c.instance.n = n;
  c.instance.top = 0.9;
  c.instance.gap = 0.3;
  c.instance.order = OrderPolicy::random;
  c.trials = trials;
  return c;
}

void BM_ExperimentSerial(benchmark::State& state) {
  const ExperimentConfig c = goc_config(static_cast<std::size_t>(state.range(0)), 64);
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment_serial(c));
  state.SetItemsProcessed(state.iterations() * 64);
}

void BM_ExperimentParallel(benchmark::State& state) {
  const ExperimentConfig c = goc_config(static_cast<std::size_t>(state.range(0)), 64);
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(c));
  state.SetItemsProcessed(state.iterations() * 64);
}

void BM_SingleRun(benchmark::State& state) {
  const ExperimentConfig c = goc_config(static_cast<std::size_t>(state.range(0)), 1);
  const CoinInstance inst =
      generate_instance(c.instance, InstanceKind::bernoulli_coin, 7);
  const ChallengeSchedule sch = schedule_for(c);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    StreamSession s(inst, seed++, 1);
    benchmark::DoNotOptimize(run_game_of_coins(s, sch));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_ExperimentSerial)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExperimentParallel)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SingleRun)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
