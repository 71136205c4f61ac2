#include <benchmark/benchmark.h>

#include "freqbias/simulator.hpp"

using namespace freqbias;

static SimulationConfig config_for(int population_size) {
  SimulationConfig config;
  config.population_size = population_size;
  config.innovation_rate = 0.037;
  config.bias = 0;
  config.warmup_steps = 200;
  config.record_steps = 32;
  config.seed = 42;
  return config;
}

static void BM_RunSimulation(benchmark::State& state) {
  const SimulationConfig config = config_for(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_simulation(config));
  }
}
BENCHMARK(BM_RunSimulation)->Arg(100)->Arg(729);

static void BM_NextGeneration(benchmark::State& state) {
  const int population_size = static_cast<int>(state.range(0));
  CountMap counts;
  for (int k = 0; k < population_size; ++k) counts[variant_name(k)] = 1;
  Rng rng(7);
  std::uint64_t fresh_serial = population_size;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        next_generation(counts, -0.05, 0.037, population_size, rng, fresh_serial));
  }
}
BENCHMARK(BM_NextGeneration)->Arg(100)->Arg(729);

static void BM_CopyProbabilities(benchmark::State& state) {
  CountMap counts;
  Rng rng(9);
  for (int k = 0; k < 200; ++k) counts[variant_name(k)] = 1 + static_cast<int>(rng.below(20));
  for (auto _ : state) {
    benchmark::DoNotOptimize(copy_probabilities(counts, -0.1));
  }
}
BENCHMARK(BM_CopyProbabilities);

BENCHMARK_MAIN();
