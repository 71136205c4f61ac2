#include "freqbias/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "freqbias/errors.hpp"
#include "freqbias/parallel.hpp"
#include "freqbias/stats.hpp"

namespace freqbias {

namespace {

// Weights below this clamp to 0; unreachable for counts >= 1 and |b| <= 1,
// kept as a safety net against pathological exponents.
constexpr double kWeightFloor = 1e-300;

/// Live variants of one generation, kept sorted by mint serial.
struct Population {
  std::vector<std::uint64_t> serials;
  std::vector<std::int64_t> counts;
};

struct StepScratch {
  std::vector<double> cum;
  std::vector<std::int64_t> copies;
  std::vector<std::uint64_t> fresh;
  // pow(c, 1−b) for c = 0..N, filled once per run: counts are integers, so
  // the kernel only ever needs these N+1 values.
  std::vector<double> pow_table;
};

/// First index with cum[idx] > target, clamped to v - 1 when target is at
/// or beyond the total (the u·total == total rounding edge).  Matches
/// std::upper_bound followed by that clamp, but compiles branch-free.
std::size_t search_cum(const double* cum, std::size_t v, double target) {
  std::size_t base = 0;
  std::size_t len = v;
  while (len > 1) {
    const std::size_t half = len / 2;
    if (cum[base + half - 1] <= target) base += half;
    len -= half;
  }
  return base;
}

/// One Wright-Fisher generation on the packed representation.  Each agent
/// draws one uniform for the innovation test and, when copying, a second
/// uniform for the parent pick; this draw order is part of the pinned
/// rng scheme (see rng.hpp).
void step_population(Population& pop, double bias, double innovation_rate, int N,
                     Rng& rng, std::uint64_t& fresh_serial, StepScratch& scratch) {
  const std::size_t V = pop.serials.size();
  scratch.cum.resize(V);
  double total = 0;
  if (bias == 0.0) {
    for (std::size_t i = 0; i < V; ++i) {
      total += static_cast<double>(pop.counts[i]);
      scratch.cum[i] = total;
    }
  } else {
    if (scratch.pow_table.size() < static_cast<std::size_t>(N) + 1) {
      const double exponent = 1.0 - bias;
      scratch.pow_table.resize(static_cast<std::size_t>(N) + 1);
      for (std::size_t c = 0; c <= static_cast<std::size_t>(N); ++c) {
        double w = std::pow(static_cast<double>(c), exponent);
        if (w < kWeightFloor) w = 0;
        scratch.pow_table[c] = w;
      }
    }
    for (std::size_t i = 0; i < V; ++i) {
      total += scratch.pow_table[static_cast<std::size_t>(pop.counts[i])];
      scratch.cum[i] = total;
    }
  }

  scratch.copies.assign(V, 0);
  scratch.fresh.clear();
  for (int agent = 0; agent < N; ++agent) {
    if (rng.next_double() < innovation_rate) {
      scratch.fresh.push_back(fresh_serial++);
      continue;
    }
    const double target = rng.next_double() * total;
    ++scratch.copies[search_cum(scratch.cum.data(), V, target)];
  }

  std::size_t out = 0;
  for (std::size_t i = 0; i < V; ++i) {
    if (scratch.copies[i] > 0) {
      pop.serials[out] = pop.serials[i];
      pop.counts[out] = scratch.copies[i];
      ++out;
    }
  }
  pop.serials.resize(out);
  pop.counts.resize(out);
  // Fresh serials all exceed every parent serial, so appending keeps order.
  for (const auto s : scratch.fresh) {
    pop.serials.push_back(s);
    pop.counts.push_back(1);
  }
}

Population initial_population(int N) {
  Population pop;
  pop.serials.resize(static_cast<std::size_t>(N));
  std::iota(pop.serials.begin(), pop.serials.end(), std::uint64_t{0});
  pop.counts.assign(static_cast<std::size_t>(N), 1);
  return pop;
}

void check_rate(double innovation_rate) {
  if (!(innovation_rate >= 0.0) || innovation_rate >= 1.0) {
    throw InputError("innovation_rate must lie in [0, 1), got " +
                     std::to_string(innovation_rate));
  }
}

}  // namespace

void SimulationConfig::validate() const {
  if (population_size < 2) {
    throw InputError("population_size must be >= 2, got " + std::to_string(population_size));
  }
  check_rate(innovation_rate);
  if (!(std::abs(bias) <= 1.0)) {
    throw InputError("bias must lie in [-1, 1], got " + std::to_string(bias));
  }
  if (warmup_steps < 0) {
    throw InputError("warmup_steps must be >= 0, got " + std::to_string(warmup_steps));
  }
  if (record_steps < 2) {
    throw InputError("record_steps must be >= 2, got " + std::to_string(record_steps));
  }
}

std::string variant_name(std::uint64_t serial) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "v%08llu", static_cast<unsigned long long>(serial));
  return buf;
}

std::vector<double> copy_probabilities(const CountMap& counts, double bias) {
  if (counts.empty()) throw InputError("copy_probabilities: empty counts");
  std::vector<double> weights;
  weights.reserve(counts.size());
  const double exponent = 1.0 - bias;
  double total = 0;
  for (const auto& [id, c] : counts) {
    if (c <= 0) throw InputError("non-positive count for variant '" + id + "'");
    double w = bias == 0.0 ? static_cast<double>(c)
                           : std::pow(static_cast<double>(c), exponent);
    if (w < kWeightFloor) w = 0;
    total += w;
    weights.push_back(w);
  }
  for (auto& w : weights) w /= total;
  return weights;
}

CountMap next_generation(const CountMap& counts, double bias, double innovation_rate,
                         int population_size, Rng& rng, std::uint64_t& fresh_serial) {
  if (counts.empty()) throw InputError("next_generation: empty counts");
  check_rate(innovation_rate);
  std::int64_t sum = 0;
  for (const auto& [id, c] : counts) {
    if (c <= 0) throw InputError("non-positive count for variant '" + id + "'");
    sum += c;
  }
  if (sum != population_size) {
    throw InputError("counts sum to " + std::to_string(sum) + ", expected population size " +
                     std::to_string(population_size));
  }

  const std::size_t V = counts.size();
  std::vector<const std::string*> ids;
  std::vector<double> cum(V);
  ids.reserve(V);
  double total = 0;
  const double exponent = 1.0 - bias;
  for (const auto& [id, c] : counts) {
    double w = bias == 0.0 ? static_cast<double>(c)
                           : std::pow(static_cast<double>(c), exponent);
    if (w < kWeightFloor) w = 0;
    total += w;
    cum[ids.size()] = total;
    ids.push_back(&id);
  }

  CountMap next;
  for (int agent = 0; agent < population_size; ++agent) {
    if (rng.next_double() < innovation_rate) {
      next.emplace(variant_name(fresh_serial++), 1);
      continue;
    }
    const double target = rng.next_double() * total;
    std::size_t idx =
        static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), target) - cum.begin());
    if (idx >= V) idx = V - 1;
    ++next[*ids[idx]];
  }
  return next;
}

SimulationOutput run_simulation(const SimulationConfig& config) {
  config.validate();
  const int N = config.population_size;
  Population pop = initial_population(N);
  std::uint64_t fresh_serial = static_cast<std::uint64_t>(N);
  Rng rng(config.seed);
  StepScratch scratch;

  for (int g = 0; g < config.warmup_steps; ++g) {
    step_population(pop, config.bias, config.innovation_rate, N, rng, fresh_serial, scratch);
  }
  std::vector<Population> rows;
  rows.reserve(static_cast<std::size_t>(config.record_steps));
  for (int g = 0; g < config.record_steps; ++g) {
    step_population(pop, config.bias, config.innovation_rate, N, rng, fresh_serial, scratch);
    rows.push_back(pop);
  }

  std::vector<std::uint64_t> all_serials;
  for (const auto& row : rows) {
    all_serials.insert(all_serials.end(), row.serials.begin(), row.serials.end());
  }
  std::sort(all_serials.begin(), all_serials.end());
  all_serials.erase(std::unique(all_serials.begin(), all_serials.end()), all_serials.end());

  SimulationOutput out;
  out.total_variants_created = static_cast<std::int64_t>(fresh_serial);
  out.table.timepoints.resize(rows.size());
  std::iota(out.table.timepoints.begin(), out.table.timepoints.end(), 1);
  out.table.variant_ids.reserve(all_serials.size());
  for (const auto s : all_serials) out.table.variant_ids.push_back(variant_name(s));
  out.table.counts.assign(rows.size(), std::vector<std::int64_t>(all_serials.size(), 0));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    for (std::size_t i = 0; i < row.serials.size(); ++i) {
      const auto col = static_cast<std::size_t>(
          std::lower_bound(all_serials.begin(), all_serials.end(), row.serials[i]) -
          all_serials.begin());
      out.table.counts[r][col] = row.counts[i];
    }
  }
  return out;
}

WarmupCurve estimate_warmup(double innovation_rate, int population_size, int horizon,
                            int iterations, std::uint64_t seed, int workers) {
  if (population_size < 2) {
    throw InputError("population_size must be >= 2, got " + std::to_string(population_size));
  }
  check_rate(innovation_rate);
  if (horizon < 2) throw InputError("horizon must be >= 2, got " + std::to_string(horizon));
  if (iterations < 1) {
    throw InputError("iterations must be >= 1, got " + std::to_string(iterations));
  }

  std::vector<std::vector<double>> curves(static_cast<std::size_t>(iterations));
  parallel_for(static_cast<std::size_t>(iterations), workers, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    Population pop = initial_population(population_size);
    std::uint64_t fresh_serial = static_cast<std::uint64_t>(population_size);
    StepScratch scratch;
    auto& curve = curves[i];
    curve.reserve(static_cast<std::size_t>(horizon));
    for (int g = 0; g < horizon; ++g) {
      step_population(pop, 0.0, innovation_rate, population_size, rng, fresh_serial, scratch);
      curve.push_back(simpson_diversity(pop.counts));
    }
  });

  WarmupCurve out;
  out.mean_diversity.assign(static_cast<std::size_t>(horizon), 0.0);
  // Replicate-index-order reduction: identical result at any worker count.
  for (const auto& curve : curves) {
    for (std::size_t t = 0; t < curve.size(); ++t) out.mean_diversity[t] += curve[t];
  }
  for (auto& d : out.mean_diversity) d /= static_cast<double>(iterations);

  const double final_value = out.mean_diversity.back();
  const double band = 0.01 * std::abs(final_value);
  int plateau = horizon;
  for (int t = horizon - 1; t >= 0; --t) {
    if (std::abs(out.mean_diversity[static_cast<std::size_t>(t)] - final_value) <= band) {
      plateau = t + 1;
    } else {
      break;
    }
  }
  out.plateau_step = plateau;
  return out;
}

}  // namespace freqbias
