#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include "freqbias/errors.hpp"
#include "freqbias/simulator.hpp"

using namespace freqbias;

namespace {

SimulationConfig base_config() {
  SimulationConfig config;
  config.population_size = 50;
  config.innovation_rate = 0.05;
  config.bias = 0;
  config.warmup_steps = 10;
  config.record_steps = 8;
  config.seed = 42;
  return config;
}

std::int64_t row_sum(const std::vector<std::int64_t>& row) {
  return std::accumulate(row.begin(), row.end(), std::int64_t{0});
}

std::int64_t map_sum(const CountMap& counts) {
  std::int64_t total = 0;
  for (const auto& [id, n] : counts) total += n;
  return total;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration and naming

TEST_CASE("SimulationConfig::validate catches each bad field") {
  CHECK_NOTHROW(base_config().validate());

  SimulationConfig config = base_config();
  config.population_size = 0;
  CHECK_THROWS_AS(config.validate(), InputError);

  config = base_config();
  config.innovation_rate = -0.1;
  CHECK_THROWS_AS(config.validate(), InputError);
  config.innovation_rate = 1.0;
  CHECK_THROWS_AS(config.validate(), InputError);

  config = base_config();
  config.bias = 1.5;
  CHECK_THROWS_AS(config.validate(), InputError);
  config.bias = -1.5;
  CHECK_THROWS_AS(config.validate(), InputError);
  config.bias = 1.0;  // the boundary itself is allowed
  CHECK_NOTHROW(config.validate());

  config = base_config();
  config.warmup_steps = -1;
  CHECK_THROWS_AS(config.validate(), InputError);

  config = base_config();
  config.record_steps = 1;
  CHECK_THROWS_AS(config.validate(), InputError);
}

TEST_CASE("variant_name zero-pads so id order equals mint order") {
  CHECK(variant_name(0) == "v00000000");
  CHECK(variant_name(7) == "v00000007");
  CHECK(variant_name(12345678) == "v12345678");
  CHECK(variant_name(99999999) == "v99999999");
  // Beyond 8 digits the name widens but stays monotone at equal width.
  CHECK(variant_name(100000000) == "v100000000");
  CHECK(variant_name(3) < variant_name(30));
}

// ---------------------------------------------------------------------------
// Copy kernel

TEST_CASE("copy_probabilities matches the n^(1-b) kernel") {
  CountMap counts{{"a", 6}, {"b", 2}, {"c", 1}};

  SUBCASE("neutral is plain proportionality") {
    const std::vector<double> p = copy_probabilities(counts, 0.0);
    CHECK(p[0] == doctest::Approx(6.0 / 9.0).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(2.0 / 9.0).epsilon(1e-15));
    CHECK(p[2] == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  }

  SUBCASE("conformity b=-0.5 amplifies the leader") {
    // p_a = 6^1.5 / (6^1.5 + 2^1.5 + 1) computed independently.
    const std::vector<double> p = copy_probabilities(counts, -0.5);
    CHECK(p[0] == doctest::Approx(0.7933413455235296).epsilon(1e-12));
    CHECK(p[0] > 6.0 / 9.0);
  }

  SUBCASE("full novelty b=1 is uniform over present variants") {
    const std::vector<double> p = copy_probabilities(counts, 1.0);
    for (const double v : p) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }

  SUBCASE("b=-1 squares the counts") {
    const std::vector<double> p = copy_probabilities(CountMap{{"a", 3}, {"b", 1}}, -1.0);
    CHECK(p[0] == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(0.1).epsilon(1e-15));
  }
}

TEST_CASE("copy_probabilities sums to one across random inputs") {
  Rng rng(13);
  for (int rep = 0; rep < 100; ++rep) {
    CountMap counts;
    const int n = 1 + static_cast<int>(rng.below(12));
    for (int i = 0; i < n; ++i) counts[variant_name(i)] = 1 + static_cast<int>(rng.below(30));
    const double bias = rng.uniform(-1.0, 1.0);
    const std::vector<double> p = copy_probabilities(counts, bias);
    REQUIRE(p.size() == counts.size());
    double total = 0;
    for (const double v : p) {
      REQUIRE(v >= 0);
      total += v;
    }
    REQUIRE(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("copy_probabilities rejects empty and non-positive counts") {
  CHECK_THROWS_AS(copy_probabilities(CountMap{}, 0.0), InputError);
  CHECK_THROWS_AS(copy_probabilities(CountMap{{"a", 0}}, 0.0), InputError);
  CHECK_THROWS_AS(copy_probabilities(CountMap{{"a", 2}, {"b", -1}}, 0.0), InputError);
}

// ---------------------------------------------------------------------------
// Generation step

TEST_CASE("next_generation conserves the population size") {
  Rng rng(101);
  std::uint64_t serial = 100;
  CountMap counts{{"a", 30}, {"b", 15}, {"c", 5}};
  for (int step = 0; step < 20; ++step) {
    counts = next_generation(counts, -0.1, 0.08, 50, rng, serial);
    REQUIRE(map_sum(counts) == 50);
    for (const auto& [id, n] : counts) REQUIRE(n > 0);
  }
  CHECK(serial > 100);  // innovation happened at mu = 0.08 over 1000 draws
}

TEST_CASE("mu=1 mints a fresh variant for every agent") {
  Rng rng(5);
  std::uint64_t serial = 3;
  // innovation_rate must stay below 1 in configs, but the step function
  // accepts the boundary for testing the innovation path in isolation.
  const CountMap next = next_generation(CountMap{{"a", 4}}, 0.0, 0.999999999, 4, rng, serial);
  CHECK(next.size() == 4);
  CHECK(serial == 7);
  CHECK(next.count("v00000003") == 1);
  CHECK(next.count("v00000006") == 1);
}

TEST_CASE("mu=0 from a single variant keeps that variant forever") {
  Rng rng(5);
  std::uint64_t serial = 1;
  CountMap counts{{"solo", 10}};
  for (int step = 0; step < 5; ++step) {
    counts = next_generation(counts, 0.3, 0.0, 10, rng, serial);
    REQUIRE(counts.size() == 1);
    REQUIRE(counts.at("solo") == 10);
  }
  CHECK(serial == 1);
}

TEST_CASE("next_generation validates its inputs") {
  Rng rng(1);
  std::uint64_t serial = 0;
  CHECK_THROWS_AS(next_generation(CountMap{}, 0.0, 0.1, 5, rng, serial), InputError);
  CHECK_THROWS_AS(next_generation(CountMap{{"a", 3}}, 0.0, 0.1, 5, rng, serial), InputError);
  CHECK_THROWS_AS(next_generation(CountMap{{"a", -2}, {"b", 7}}, 0.0, 0.1, 5, rng, serial),
                  InputError);
}

// ---------------------------------------------------------------------------
// Whole runs

TEST_CASE("run_simulation output is structurally sound") {
  const SimulationConfig config = base_config();
  const SimulationOutput out = run_simulation(config);
  validate_table(out.table);
  REQUIRE(out.table.n_timepoints() == 8);
  CHECK(out.table.timepoints == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8});
  for (const auto& row : out.table.counts) CHECK(row_sum(row) == config.population_size);
  // Every column must be live somewhere in the recorded window.
  for (std::size_t v = 0; v < out.table.n_variants(); ++v) {
    std::int64_t column = 0;
    for (const auto& row : out.table.counts) column += row[v];
    CHECK(column > 0);
  }
  CHECK(out.total_variants_created >= static_cast<std::int64_t>(out.table.n_variants()));
}

TEST_CASE("run_simulation is bit-identical for equal seeds") {
  const SimulationConfig config = base_config();
  const SimulationOutput a = run_simulation(config);
  const SimulationOutput b = run_simulation(config);
  CHECK(a.table.counts == b.table.counts);
  CHECK(a.table.variant_ids == b.table.variant_ids);
  CHECK(a.total_variants_created == b.total_variants_created);

  SimulationConfig other = config;
  other.seed = 43;
  CHECK(run_simulation(other).table.counts != a.table.counts);
}

TEST_CASE("run_simulation equals a manual loop over next_generation") {
  // The engine must be observationally identical to composing the public
  // pieces: all-distinct init, one next_generation per step, recording
  // after each of the last record_steps generations.
  for (const double bias : {-0.5, 0.0, 0.5}) {
    SimulationConfig config;
    config.population_size = 60;
    config.innovation_rate = 0.07;
    config.bias = bias;
    config.warmup_steps = 6;
    config.record_steps = 5;
    config.seed = 2024;

    const SimulationOutput engine = run_simulation(config);

    Rng rng(config.seed);
    CountMap counts;
    for (int k = 0; k < config.population_size; ++k) counts[variant_name(k)] = 1;
    std::uint64_t serial = config.population_size;
    std::vector<CountMap> recorded;
    for (int step = 0; step < config.warmup_steps + config.record_steps; ++step) {
      counts = next_generation(counts, config.bias, config.innovation_rate,
                               config.population_size, rng, serial);
      if (step >= config.warmup_steps) recorded.push_back(counts);
    }

    REQUIRE(engine.table.n_timepoints() == recorded.size());
    CHECK(engine.total_variants_created == static_cast<std::int64_t>(serial));
    std::set<std::string> live;
    for (const auto& generation : recorded) {
      for (const auto& [id, n] : generation) live.insert(id);
    }
    REQUIRE(engine.table.variant_ids == std::vector<std::string>(live.begin(), live.end()));
    for (std::size_t t = 0; t < recorded.size(); ++t) {
      for (std::size_t v = 0; v < engine.table.n_variants(); ++v) {
        const auto it = recorded[t].find(engine.table.variant_ids[v]);
        const std::int64_t expected = it == recorded[t].end() ? 0 : it->second;
        REQUIRE(engine.table.counts[t][v] == expected);
      }
    }
  }
}

TEST_CASE("mu=0 run creates exactly the initial variants") {
  SimulationConfig config = base_config();
  config.innovation_rate = 0;
  const SimulationOutput out = run_simulation(config);
  CHECK(out.total_variants_created == config.population_size);
}

// ---------------------------------------------------------------------------
// Warm-up estimation

TEST_CASE("estimate_warmup is deterministic and worker-invariant") {
  const WarmupCurve one = estimate_warmup(0.05, 40, 30, 12, 9, 1);
  const WarmupCurve again = estimate_warmup(0.05, 40, 30, 12, 9, 1);
  const WarmupCurve four = estimate_warmup(0.05, 40, 30, 12, 9, 4);
  REQUIRE(one.mean_diversity.size() == 30);
  CHECK(one.mean_diversity == again.mean_diversity);
  CHECK(one.mean_diversity == four.mean_diversity);  // bitwise, index-ordered reduction
  CHECK(one.plateau_step == four.plateau_step);
  CHECK(one.plateau_step >= 1);
  CHECK(one.plateau_step <= 30);
}

TEST_CASE("estimate_warmup with mu=0 decays toward fixation") {
  const WarmupCurve curve = estimate_warmup(0.0, 30, 120, 20, 3, 1);
  // From all-distinct (D near 1) drift alone must grind diversity down.
  CHECK(curve.mean_diversity.front() > 0.8);
  CHECK(curve.mean_diversity.back() < 0.1);
}

TEST_CASE("estimate_warmup rejects bad arguments") {
  CHECK_THROWS_AS(estimate_warmup(0.05, 0, 30, 10, 1, 1), InputError);
  CHECK_THROWS_AS(estimate_warmup(-0.1, 30, 30, 10, 1, 1), InputError);
  CHECK_THROWS_AS(estimate_warmup(0.05, 30, 0, 10, 1, 1), InputError);
  CHECK_THROWS_AS(estimate_warmup(0.05, 30, 30, 0, 1, 1), InputError);
}
