#include <benchmark/benchmark.h>

#include "freqbias/rf.hpp"
#include "freqbias/rng.hpp"

using namespace freqbias;

/// Synthetic labeled table: class means separated on a handful of
/// features so trees have real structure to find, without paying for
/// simulation in benchmark setup.
static ReferenceTable synthetic_table(int n_per_model, int n_features) {
  ReferenceTable table;
  Rng rng(17);
  for (int m = 0; m < kNumModels; ++m) {
    for (int i = 0; i < n_per_model; ++i) {
      table.labels.push_back(static_cast<Model>(m));
      table.b_values.push_back(m == 0 ? -0.1 : m == 1 ? 0.1 : 0.0);
      std::vector<double> row(n_features);
      for (int f = 0; f < n_features; ++f) {
        row[f] = rng.next_double() + (f < 5 ? 0.8 * m : 0.0);
      }
      table.features.push_back(std::move(row));
    }
  }
  return table;
}

static void BM_GrowForest(benchmark::State& state) {
  const ReferenceTable table = synthetic_table(static_cast<int>(state.range(0)), 178);
  ForestConfig config;
  config.n_trees = 50;
  config.seed = 42;
  for (auto _ : state) {
    benchmark::DoNotOptimize(grow_forest(table, config));
  }
}
BENCHMARK(BM_GrowForest)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_ClassifyObserved(benchmark::State& state) {
  const ReferenceTable table = synthetic_table(100, 178);
  ForestConfig config;
  config.n_trees = 100;
  config.seed = 42;
  const Forest forest = grow_forest(table, config);
  const std::vector<double> observed = table.features[0];
  for (auto _ : state) {
    benchmark::DoNotOptimize(classify_observed(forest, observed));
  }
}
BENCHMARK(BM_ClassifyObserved);

static void BM_OobErrorCurve(benchmark::State& state) {
  const ReferenceTable table = synthetic_table(100, 178);
  ForestConfig config;
  config.n_trees = 100;
  config.seed = 42;
  const Forest forest = grow_forest(table, config);
  for (auto _ : state) {
    benchmark::DoNotOptimize(oob_error_curve(forest, table));
  }
}
BENCHMARK(BM_OobErrorCurve)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
