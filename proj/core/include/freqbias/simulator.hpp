#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "freqbias/frequency_table.hpp"
#include "freqbias/rng.hpp"

namespace freqbias {

/// Parameters for one transmission run.
///
/// `bias` follows the convention: negative ⇒ conformity (high-frequency
/// variants over-copied), positive ⇒ novelty (under-copied), zero ⇒
/// unbiased copying.
struct SimulationConfig {
  int population_size = 0;      // N
  double innovation_rate = 0;   // mu, in [0, 1)
  double bias = 0;              // b, |b| <= 1
  int warmup_steps = 0;         // generations discarded before recording
  int record_steps = 0;         // generations recorded, >= 2
  std::uint64_t seed = 0;

  /// Throws InputError if any field is out of range.
  void validate() const;
};

/// Result of run_simulation: a count table whose timepoints are labeled
/// 1..record_steps, plus the total number of distinct variants ever
/// minted during the run (initial population included).
struct SimulationOutput {
  FrequencyTable table;
  std::int64_t total_variants_created = 0;
};

/// Mean neutral diversity trajectory used to pick a warm-up length.
/// `plateau_step` is the first 1-based step from which the curve stays
/// within 1% of its final value.
struct WarmupCurve {
  std::vector<double> mean_diversity;
  int plateau_step = 0;
};

using CountMap = std::map<std::string, std::int64_t>;

/// Formats the canonical variant id for a mint serial ("v" + 8 decimal
/// digits, zero padded), so lexicographic id order equals mint order.
std::string variant_name(std::uint64_t serial);

/// Per-draw copy probabilities over the variants of `counts` in id order:
/// p_i ∝ n_i^(1−bias).  Throws InputError on empty or non-positive counts.
std::vector<double> copy_probabilities(const CountMap& counts, double bias);

/// Advances one non-overlapping generation.  Each of `population_size` new
/// agents independently innovates with probability `innovation_rate`
/// (minting variant_name(fresh_serial++)) and otherwise copies variant i
/// with probability proportional to n_i^(1−bias).
///
/// Draw order per agent is fixed: one uniform for the innovation test,
/// then (copiers only) one uniform for the parent pick.  Throws InputError
/// if counts are empty, negative, or do not sum to population_size.
CountMap next_generation(const CountMap& counts, double bias, double innovation_rate,
                         int population_size, Rng& rng, std::uint64_t& fresh_serial);

/// Runs warm-up plus recorded generations from an all-distinct initial
/// population (agent k holds variant_name(k)).  The run PRNG is
/// Rng(config.seed); identical configs give bit-identical output.
SimulationOutput run_simulation(const SimulationConfig& config);

/// Averages the Simpson diversity trajectory of `iterations` neutral runs
/// (b = 0, no warm-up) over `horizon` generations.  Replicate i uses
/// Rng(derive_seed(seed, i)); the mean is reduced in replicate-index
/// order, so the result is identical at any worker count.
WarmupCurve estimate_warmup(double innovation_rate, int population_size, int horizon,
                            int iterations, std::uint64_t seed, int workers = 1);

}  // namespace freqbias
