#include <benchmark/benchmark.h>

#include "freqbias/simulator.hpp"
#include "freqbias/stats.hpp"

using namespace freqbias;

static FrequencyTable simulated_table() {
  SimulationConfig config;
  config.population_size = 729;
  config.innovation_rate = 0.037;
  config.bias = 0;
  config.warmup_steps = 200;
  config.record_steps = 32;
  config.seed = 42;
  return run_simulation(config).table;
}

static void BM_Summarize(benchmark::State& state) {
  const FrequencyTable table = simulated_table();
  for (auto _ : state) {
    benchmark::DoNotOptimize(summarize(table, 142, 32));
  }
}
BENCHMARK(BM_Summarize);

static void BM_TurnoverRates(benchmark::State& state) {
  const FrequencyTable table = simulated_table();
  for (auto _ : state) {
    benchmark::DoNotOptimize(turnover_rates(table, 50, TopListPolicy::CapAtAvailable));
  }
}
BENCHMARK(BM_TurnoverRates);

static void BM_SimpsonDiversity(benchmark::State& state) {
  std::vector<std::int64_t> counts;
  Rng rng(5);
  for (int i = 0; i < 500; ++i) counts.push_back(static_cast<std::int64_t>(rng.below(40)));
  counts[0] = 1;  // guard against an all-zero draw
  for (auto _ : state) {
    benchmark::DoNotOptimize(simpson_diversity(counts));
  }
}
BENCHMARK(BM_SimpsonDiversity);

static void BM_KsTwoSample(benchmark::State& state) {
  Rng rng(11);
  std::vector<double> a, b;
  for (int i = 0; i < 1000; ++i) a.push_back(rng.next_double());
  for (int i = 0; i < 1000; ++i) b.push_back(rng.next_double() * 1.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ks_two_sample(a, b));
  }
}
BENCHMARK(BM_KsTwoSample);

BENCHMARK_MAIN();
