#include "freqbias/abc.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "freqbias/errors.hpp"
#include "freqbias/format.hpp"
#include "freqbias/parallel.hpp"
#include "freqbias/stats.hpp"

namespace freqbias {

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

double mad_of(const std::vector<double>& v) {
  const double m = median_of(v);
  std::vector<double> dev;
  dev.reserve(v.size());
  for (const double x : v) dev.push_back(std::abs(x - m));
  return median_of(std::move(dev));
}

/// ⌈fraction·n⌉ with a guard against the product landing a hair above an
/// integer from binary rounding (e.g. 0.01·100000 must give 1000).
std::size_t ceil_count(double fraction, std::size_t n) {
  const double raw = fraction * static_cast<double>(n) - 1e-9;
  const auto k = static_cast<std::size_t>(std::ceil(std::max(raw, 0.0)));
  return std::clamp<std::size_t>(k, 1, n);
}

/// Shortest window of ⌈mass·n⌉ consecutive sorted samples, leftmost on
/// ties.  Callers guarantee `sorted` is non-empty and ascending.
std::pair<double, double> hdpi_window(const std::vector<double>& sorted, double mass) {
  const std::size_t n = sorted.size();
  const std::size_t k = ceil_count(mass, n);
  std::size_t best = 0;
  double best_width = sorted[k - 1] - sorted[0];
  for (std::size_t i = 1; i + k <= n; ++i) {
    const double width = sorted[i + k - 1] - sorted[i];
    if (width < best_width) {
      best_width = width;
      best = i;
    }
  }
  return {sorted[best], sorted[best + k - 1]};
}

void check_tolerance(double tolerance) {
  if (!(tolerance > 0.0) || tolerance > 1.0) {
    throw InputError("tolerance must lie in (0, 1], got " + std::to_string(tolerance));
  }
}

/// Standardization scales for the two statistics, from the reference.
struct MadScales {
  double x = 0;
  double mean_D = 0;
};

MadScales reference_scales(const std::vector<ReferenceRow>& reference) {
  std::vector<double> xs;
  std::vector<double> ds;
  xs.reserve(reference.size());
  ds.reserve(reference.size());
  for (const auto& row : reference) {
    xs.push_back(row.x);
    ds.push_back(row.mean_D);
  }
  MadScales scales{mad_of(xs), mad_of(ds)};
  if (scales.x == 0) {
    throw DegenerateError("zero median absolute deviation for statistic 'x' across the reference");
  }
  if (scales.mean_D == 0) {
    throw DegenerateError(
        "zero median absolute deviation for statistic 'mean_D' across the reference");
  }
  return scales;
}

double scaled_distance(const ObservedStats& target, const ReferenceRow& row,
                       const MadScales& scales) {
  const double dx = (row.x - target.x) / scales.x;
  const double dd = (row.mean_D - target.mean_D) / scales.mean_D;
  return std::sqrt(dx * dx + dd * dd);
}

/// Median of the k smallest entries of dist (dist is scratch).
double median_of_smallest(std::vector<double>& dist, std::size_t k) {
  if (k % 2 == 1) {
    const std::size_t mid = k / 2;
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid), dist.end());
    return dist[mid];
  }
  const std::size_t hi = k / 2;
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(hi), dist.end());
  const double upper = dist[hi];
  const double lower = *std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(hi));
  return (lower + upper) / 2.0;
}

/// First-n partial Fisher-Yates: n distinct indices out of [0, total).
std::vector<std::size_t> draw_indices(std::size_t total, std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(total - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  return idx;
}

double parse_double_field(const std::string& field, std::size_t line_no) {
  double value = 0;
  const char* first = field.data();
  const char* last = first + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw InputError("non-numeric field '" + field + "', line " + std::to_string(line_no));
  }
  return value;
}

}  // namespace

void RejectionConfig::validate() const {
  if (iterations < 1) {
    throw InputError("iterations must be >= 1, got " + std::to_string(iterations));
  }
  check_tolerance(tolerance);
  if (!(prior_low <= prior_high)) {
    throw InputError("prior_low must not exceed prior_high");
  }
  if (tolerance * static_cast<double>(iterations) + 1e-9 < 10.0) {
    throw InputError("tolerance * iterations must be >= 10 so the accepted set is meaningful");
  }
  if (stat_selector != std::vector<std::string>{"x", "mean_D"}) {
    throw InputError("unsupported stat_selector; only {x, mean_D} is implemented");
  }
}

std::vector<ReferenceRow> generate_reference(const RejectionConfig& config,
                                             const SimulationConfig& sim_template, int y_max,
                                             std::uint64_t seed, int workers) {
  config.validate();
  sim_template.validate();
  if (y_max < 1) throw InputError("y_max must be >= 1, got " + std::to_string(y_max));

  std::vector<ReferenceRow> rows(static_cast<std::size_t>(config.iterations));
  parallel_for(rows.size(), workers, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    const double b = rng.uniform(config.prior_low, config.prior_high);
    SimulationConfig sim = sim_template;
    sim.bias = b;
    sim.seed = rng.next_u64();
    try {
      const SimulationOutput out = run_simulation(sim);
      const SummaryStats stats = summarize(out.table, y_max, sim.record_steps);
      rows[i] = ReferenceRow{b, stats.exponent_x, stats.mean_diversity};
    } catch (const DegenerateError& e) {
      throw DegenerateError("iteration " + std::to_string(i) + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError("iteration " + std::to_string(i) + ": " + e.what());
    }
  });
  return rows;
}

Posterior rejection_abc(const ObservedStats& observed,
                        const std::vector<ReferenceRow>& reference, double tolerance) {
  if (reference.empty()) throw InputError("empty reference");
  check_tolerance(tolerance);
  if (!std::isfinite(observed.x) || !std::isfinite(observed.mean_D)) {
    throw InputError("observed statistics must be finite");
  }

  const MadScales scales = reference_scales(reference);
  std::vector<std::size_t> order(reference.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> dist(reference.size());
  for (std::size_t i = 0; i < reference.size(); ++i) {
    dist[i] = scaled_distance(observed, reference[i], scales);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    return a < b;
  });

  const std::size_t k = ceil_count(tolerance, reference.size());
  Posterior posterior;
  posterior.accepted_b.reserve(k);
  for (std::size_t i = 0; i < k; ++i) posterior.accepted_b.push_back(reference[order[i]].b);
  posterior.median = median_of(posterior.accepted_b);

  std::vector<double> sorted_b = posterior.accepted_b;
  std::sort(sorted_b.begin(), sorted_b.end());
  const auto interval = hdpi_window(sorted_b, 0.95);
  posterior.hdpi_low = interval.first;
  posterior.hdpi_high = interval.second;
  return posterior;
}

std::pair<double, double> hdpi(const std::vector<double>& samples, double mass) {
  if (samples.size() < 10) {
    throw InputError("too few samples for an HDPI: " + std::to_string(samples.size()) +
                     ", need 10");
  }
  if (!(mass > 0.0) || mass > 1.0) {
    throw InputError("mass must lie in (0, 1], got " + std::to_string(mass));
  }
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  return hdpi_window(sorted, mass);
}

double goodness_of_fit(const ObservedStats& observed,
                       const std::vector<ReferenceRow>& reference, double tolerance,
                       int n_pseudo, std::uint64_t seed) {
  if (n_pseudo < 100) {
    throw InputError("n_pseudo must be >= 100, got " + std::to_string(n_pseudo));
  }
  check_tolerance(tolerance);
  const std::size_t R = reference.size();
  if (R < 2 || static_cast<std::size_t>(n_pseudo) > R) {
    throw InputError("reference too small for the exclusion scheme: " + std::to_string(R) +
                     " rows, " + std::to_string(n_pseudo) + " pseudo-observations");
  }

  const MadScales scales = reference_scales(reference);
  std::vector<double> dist;
  dist.reserve(R);
  for (const auto& row : reference) dist.push_back(scaled_distance(observed, row, scales));
  const double observed_stat = median_of_smallest(dist, ceil_count(tolerance, R));

  Rng rng(seed);
  const auto pseudo = draw_indices(R, static_cast<std::size_t>(n_pseudo), rng);
  const std::size_t k_null = ceil_count(tolerance, R - 1);
  std::size_t at_least = 0;
  std::vector<double> null_dist;
  null_dist.reserve(R - 1);
  for (const auto p : pseudo) {
    const ObservedStats target{reference[p].x, reference[p].mean_D};
    null_dist.clear();
    for (std::size_t i = 0; i < R; ++i) {
      if (i == p) continue;  // a pseudo-observation never matches itself
      null_dist.push_back(scaled_distance(target, reference[i], scales));
    }
    if (median_of_smallest(null_dist, k_null) >= observed_stat) ++at_least;
  }
  return static_cast<double>(at_least) / static_cast<double>(n_pseudo);
}

std::vector<double> cross_validate(const std::vector<ReferenceRow>& reference,
                                   const std::vector<double>& tolerances, int n_folds,
                                   std::uint64_t seed) {
  if (n_folds < 2) throw InputError("n_folds must be >= 2, got " + std::to_string(n_folds));
  if (tolerances.empty()) throw InputError("no tolerances given");
  for (const double t : tolerances) check_tolerance(t);
  const std::size_t R = reference.size();
  if (R < static_cast<std::size_t>(n_folds) + 1) {
    throw InputError("reference too small: " + std::to_string(R) + " rows for " +
                     std::to_string(n_folds) + " folds");
  }

  double mean_b = 0;
  for (const auto& row : reference) mean_b += row.b;
  mean_b /= static_cast<double>(R);
  double var_b = 0;
  for (const auto& row : reference) var_b += (row.b - mean_b) * (row.b - mean_b);
  var_b /= static_cast<double>(R - 1);
  if (var_b == 0) {
    throw DegenerateError("zero variance of b across the reference; prediction error undefined");
  }

  Rng rng(seed);
  const auto folds = draw_indices(R, static_cast<std::size_t>(n_folds), rng);

  std::vector<double> errors(tolerances.size(), 0.0);
  std::vector<ReferenceRow> pool;
  pool.reserve(R - 1);
  for (const auto h : folds) {
    pool.clear();
    for (std::size_t i = 0; i < R; ++i) {
      if (i != h) pool.push_back(reference[i]);
    }
    const ObservedStats target{reference[h].x, reference[h].mean_D};
    for (std::size_t j = 0; j < tolerances.size(); ++j) {
      const Posterior posterior = rejection_abc(target, pool, tolerances[j]);
      const double err = posterior.median - reference[h].b;
      errors[j] += err * err;
    }
  }
  const double denom = static_cast<double>(n_folds) * var_b;
  for (auto& e : errors) e /= denom;
  return errors;
}

std::string reference_to_csv(const std::vector<ReferenceRow>& reference) {
  std::string out = "b,x,mean_D\n";
  for (const auto& row : reference) {
    out += format_double(row.b);
    out += ',';
    out += format_double(row.x);
    out += ',';
    out += format_double(row.mean_D);
    out += '\n';
  }
  return out;
}

std::vector<ReferenceRow> reference_from_csv(const std::string& text) {
  std::vector<ReferenceRow> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != "b,x,mean_D") {
        throw InputError("expected header 'b,x,mean_D', line " + std::to_string(line_no));
      }
      saw_header = true;
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
      throw InputError("expected 3 fields, line " + std::to_string(line_no));
    }
    ReferenceRow row;
    row.b = parse_double_field(line.substr(0, c1), line_no);
    row.x = parse_double_field(line.substr(c1 + 1, c2 - c1 - 1), line_no);
    row.mean_D = parse_double_field(line.substr(c2 + 1), line_no);
    rows.push_back(row);
  }
  if (rows.empty()) throw InputError("empty reference CSV");
  return rows;
}

}  // namespace freqbias
