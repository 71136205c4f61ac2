#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "freqbias/errors.hpp"
#include "freqbias/simulator.hpp"
#include "freqbias/stats.hpp"

using namespace freqbias;

namespace {

/// Three-timepoint table with one rank shuffle then a frozen repeat:
/// every list size turns over once in two transitions.
FrequencyTable shuffle_table() {
  FrequencyTable table;
  table.timepoints = {1, 2, 3};
  table.variant_ids = {"a", "b", "c", "d"};
  table.counts = {{5, 3, 2, 0}, {1, 4, 0, 3}, {1, 4, 0, 3}};
  return table;
}

FrequencyTable simulated_table(double bias, std::uint64_t seed) {
  SimulationConfig config;
  config.population_size = 80;
  config.innovation_rate = 0.06;
  config.bias = bias;
  config.warmup_steps = 15;
  config.record_steps = 10;
  config.seed = seed;
  return run_simulation(config).table;
}

}  // namespace

// ---------------------------------------------------------------------------
// Simpson diversity

TEST_CASE("simpson_diversity exact values") {
  CHECK(simpson_diversity({7}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(simpson_diversity({1, 1, 1, 1}) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(simpson_diversity({3, 1}) == doctest::Approx(0.375).epsilon(1e-12));
}

TEST_CASE("simpson_diversity ignores zero-count columns") {
  CHECK(simpson_diversity({3, 0, 1, 0}) == simpson_diversity({3, 1}));
}

TEST_CASE("simpson_diversity rejects bad counts") {
  CHECK_THROWS_WITH_AS(simpson_diversity({2, -1}), "negative count", InputError);
  CHECK_THROWS_WITH_AS(simpson_diversity({0, 0}), "all-zero counts", InputError);
  CHECK_THROWS_WITH_AS(simpson_diversity({}), "all-zero counts", InputError);
}

// ---------------------------------------------------------------------------
// Top lists

TEST_CASE("top_list ranks by count then ascending id") {
  const std::map<std::string, std::int64_t> counts{{"a", 3}, {"b", 5}, {"c", 3}, {"d", 1}};
  CHECK(top_list(counts, 1) == std::vector<std::string>{"b"});
  CHECK(top_list(counts, 2) == std::vector<std::string>{"b", "a"});
  CHECK(top_list(counts, 3) == std::vector<std::string>{"b", "a", "c"});
  CHECK(top_list(counts, 4) == std::vector<std::string>{"b", "a", "c", "d"});
}

TEST_CASE("top_list excludes zero counts and checks its arguments") {
  const std::map<std::string, std::int64_t> counts{{"a", 2}, {"b", 0}};
  CHECK(top_list(counts, 1) == std::vector<std::string>{"a"});
  CHECK_THROWS_WITH_AS(top_list(counts, 2),
                       "insufficient variants: have 1 with positive counts, need 2", InputError);
  CHECK_THROWS_WITH_AS(top_list(counts, 0), "top list size must be >= 1, got 0", InputError);
  CHECK_THROWS_AS(top_list({{"a", -1}}, 1), InputError);
}

// ---------------------------------------------------------------------------
// Turn-over rates

TEST_CASE("turnover_rates on the shuffle table by hand") {
  // Transition 1: top lists {a}/{a,b}/{a,b,c} become {b}/{b,d}/{b,d,a},
  // so one newcomer at every size; transition 2 changes nothing.
  const std::vector<double> z = turnover_rates(shuffle_table(), 3);
  REQUIRE(z.size() == 3);
  CHECK(z[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(z[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(z[2] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("Strict rejects oversized lists naming the timepoint") {
  CHECK_THROWS_WITH_AS(turnover_rates(shuffle_table(), 4, TopListPolicy::Strict),
                       "only 3 positive-count variants at timepoint 1, need 4", InputError);
}

TEST_CASE("CapAtAvailable shrinks the list instead of failing") {
  const std::vector<double> z =
      turnover_rates(shuffle_table(), 4, TopListPolicy::CapAtAvailable);
  REQUIRE(z.size() == 4);
  // Size 4 caps to the full 3-variant lists, so it matches size 3.
  CHECK(z[3] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("turnover_rates argument checks") {
  CHECK_THROWS_WITH_AS(turnover_rates(shuffle_table(), 0),
                       "y_max must be >= 1, got 0", InputError);
  FrequencyTable one_row;
  one_row.timepoints = {1};
  one_row.variant_ids = {"a"};
  one_row.counts = {{3}};
  CHECK_THROWS_WITH_AS(turnover_rates(one_row, 1),
                       "turnover needs at least 2 timepoints, got 1", InputError);
}

TEST_CASE("turnover_rates matches a brute-force set difference") {
  // Independent re-derivation from top_list: z_y = |B \ A| with both
  // lists capped at the available variants.
  const FrequencyTable table = simulated_table(0.0, 77);
  const int y_max = 12;
  const std::vector<double> z = turnover_rates(table, y_max, TopListPolicy::CapAtAvailable);
  for (int y = 1; y <= y_max; ++y) {
    double total = 0;
    for (std::size_t t = 0; t + 1 < table.n_timepoints(); ++t) {
      std::map<std::string, std::int64_t> row_a;
      std::map<std::string, std::int64_t> row_b;
      int ka = 0;
      int kb = 0;
      for (std::size_t v = 0; v < table.n_variants(); ++v) {
        row_a[table.variant_ids[v]] = table.counts[t][v];
        row_b[table.variant_ids[v]] = table.counts[t + 1][v];
        ka += table.counts[t][v] > 0 ? 1 : 0;
        kb += table.counts[t + 1][v] > 0 ? 1 : 0;
      }
      const auto list_a = top_list(row_a, std::min(y, ka));
      const auto list_b = top_list(row_b, std::min(y, kb));
      int newcomers = 0;
      for (const auto& id : list_b) {
        bool seen = false;
        for (const auto& old : list_a) seen = seen || old == id;
        newcomers += seen ? 0 : 1;
      }
      total += newcomers;
    }
    REQUIRE(z[static_cast<std::size_t>(y - 1)] ==
            doctest::Approx(total / static_cast<double>(table.n_timepoints() - 1))
                .epsilon(1e-12));
  }
}

// ---------------------------------------------------------------------------
// Power-law fit

TEST_CASE("fit_turnover_profile recovers an exact power law") {
  std::vector<double> profile;
  for (int y = 1; y <= 20; ++y) profile.push_back(2.0 * std::pow(y, 0.86));
  const TurnoverProfile fit = fit_turnover_profile(profile);
  CHECK(fit.coefficient == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(fit.exponent == doctest::Approx(0.86).epsilon(1e-9));
  CHECK(fit.list_sizes.front() == 1);
  CHECK(fit.list_sizes.back() == 20);
  CHECK(fit.mean_turnover == profile);
}

TEST_CASE("zeros are dropped from the fit, not log-transformed") {
  std::vector<double> profile;
  for (int y = 1; y <= 20; ++y) profile.push_back(2.0 * std::pow(y, 0.86));
  profile[4] = 0;
  profile[11] = 0;
  const TurnoverProfile fit = fit_turnover_profile(profile);
  CHECK(fit.coefficient == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(fit.exponent == doctest::Approx(0.86).epsilon(1e-9));
}

TEST_CASE("fewer than three positive entries is degenerate") {
  CHECK_THROWS_WITH_AS(fit_turnover_profile({0.5, 0.6, 0.0, 0.0}),
                       "degenerate profile: fewer than 3 positive turnover entries (got 2)",
                       DegenerateError);
  CHECK_THROWS_AS(fit_turnover_profile({}), DegenerateError);
}

// ---------------------------------------------------------------------------
// Diversity series

TEST_CASE("diversity_series applies Simpson row by row") {
  FrequencyTable table;
  table.timepoints = {1, 2};
  table.variant_ids = {"a", "b"};
  table.counts = {{2, 0}, {1, 1}};
  const DiversitySeries series = diversity_series(table);
  REQUIRE(series.per_timepoint.size() == 2);
  CHECK(series.per_timepoint[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(series.per_timepoint[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(series.mean == doctest::Approx(0.25).epsilon(1e-12));
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

TEST_CASE("ks_two_sample exact statistics") {
  const KsResult plain = ks_two_sample({1, 2, 3, 4}, {3, 4, 5, 6});
  CHECK(plain.statistic == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(plain.p_value == doctest::Approx(0.6993741991310155).epsilon(1e-12));

  const KsResult same = ks_two_sample({1, 2, 3}, {1, 2, 3});
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == 1.0);

  const KsResult disjoint = ks_two_sample({1, 2}, {10, 11});
  CHECK(disjoint.statistic == doctest::Approx(1.0).epsilon(1e-12));

  // Ties advance both empirical CDFs together before the gap is read.
  const KsResult tied = ks_two_sample({1, 1, 2}, {1, 2, 2});
  CHECK(tied.statistic == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("ks_two_sample frozen unequal-size case") {
  const KsResult r =
      ks_two_sample({0.1, 0.4, 0.42, 0.8, 1.5}, {0.3, 0.41, 0.9, 1.4, 1.45, 2.2});
  CHECK(r.statistic == doctest::Approx(0.46666666666666673).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(0.5925028311389974).epsilon(1e-12));
}

TEST_CASE("ks_two_sample symmetry and bounds") {
  Rng rng(3);
  for (int rep = 0; rep < 40; ++rep) {
    std::vector<double> a;
    std::vector<double> b;
    const int na = 2 + static_cast<int>(rng.below(30));
    const int nb = 2 + static_cast<int>(rng.below(30));
    for (int i = 0; i < na; ++i) a.push_back(rng.uniform(0, 3));
    for (int i = 0; i < nb; ++i) b.push_back(rng.uniform(1, 4));
    const KsResult ab = ks_two_sample(a, b);
    const KsResult ba = ks_two_sample(b, a);
    REQUIRE(ab.statistic == ba.statistic);
    REQUIRE(ab.p_value == ba.p_value);
    REQUIRE(ab.statistic >= 0);
    REQUIRE(ab.statistic <= 1);
    REQUIRE(ab.p_value >= 0);
    REQUIRE(ab.p_value <= 1);
  }
  CHECK_THROWS_WITH_AS(ks_two_sample({}, {1.0}), "empty vector", InputError);
}

// ---------------------------------------------------------------------------
// Summary assembly

TEST_CASE("summarize composes the public pieces") {
  const FrequencyTable table = simulated_table(-0.1, 12);
  const int y_max = 25;
  const SummaryStats stats = summarize(table, y_max, 10);

  CHECK(stats.mean_turnover_by_size ==
        turnover_rates(table, y_max, TopListPolicy::CapAtAvailable));
  const DiversitySeries series = diversity_series(table);
  CHECK(stats.diversity_by_timepoint == series.per_timepoint);
  CHECK(stats.mean_diversity == series.mean);

  // The exponent must come from the fully supported head of the profile.
  int min_variants = std::numeric_limits<int>::max();
  for (const auto& row : table.counts) {
    int k = 0;
    for (const auto c : row) k += c > 0 ? 1 : 0;
    min_variants = std::min(min_variants, k);
  }
  const int y_fit = std::min(y_max, min_variants);
  REQUIRE(y_fit >= 3);
  const std::vector<double> head(stats.mean_turnover_by_size.begin(),
                                 stats.mean_turnover_by_size.begin() + y_fit);
  CHECK(stats.exponent_x == fit_turnover_profile(head).exponent);
}

TEST_CASE("summarize checks the timepoint count") {
  CHECK_THROWS_WITH_AS(summarize(shuffle_table(), 2, 5),
                       "table has 3 timepoints, expected 5", InputError);
}

TEST_CASE("flatten and feature names line up") {
  SummaryStats stats;
  stats.exponent_x = 1.5;
  stats.mean_diversity = 0.9;
  stats.mean_turnover_by_size = {0.1, 0.2, 0.3};
  stats.diversity_by_timepoint = {0.8, 0.7};

  const std::vector<double> flat = stats.flatten();
  CHECK(flat == std::vector<double>{1.5, 0.9, 0.1, 0.2, 0.3, 0.8, 0.7});

  const std::vector<std::string> names = summary_feature_names(3, 2);
  CHECK(names == std::vector<std::string>{"x", "mean_D", "z_1", "z_2", "z_3", "D_1", "D_2"});
  CHECK(names.size() == flat.size());

  CHECK(summary_csv_header(3, 2) == "x,mean_D,z_1,z_2,z_3,D_1,D_2");
  CHECK(summary_to_csv_row(stats) == "1.5,0.9,0.1,0.2,0.3,0.8,0.7");
}
