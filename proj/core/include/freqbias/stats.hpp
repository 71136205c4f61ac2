#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "freqbias/frequency_table.hpp"

namespace freqbias {

/// Fitted turn-over function z̄_y = A · y^x together with the profile it
/// was fitted to.
struct TurnoverProfile {
  std::vector<int> list_sizes;        // 1..y_max
  std::vector<double> mean_turnover;  // z̄_y per list size
  double coefficient = 0;             // A
  double exponent = 0;                // x
};

/// Simpson diversity per timepoint plus its mean.
struct DiversitySeries {
  std::vector<double> per_timepoint;
  double mean = 0;
};

/// Two-sample Kolmogorov-Smirnov outcome.
struct KsResult {
  double statistic = 0;
  double p_value = 0;
};

/// The summary-statistic vector shared by observed and simulated tables:
/// turn-over exponent, mean diversity, the per-size turn-over profile and
/// the per-timepoint diversity series.
struct SummaryStats {
  double exponent_x = 0;
  double mean_diversity = 0;
  std::vector<double> mean_turnover_by_size;  // length y_max
  std::vector<double> diversity_by_timepoint;  // length T

  /// Flat vector in the documented column order: x, D̄, z̄_1.., D_1...
  std::vector<double> flatten() const;
};

/// Column names matching SummaryStats::flatten():
/// x, mean_D, z_1..z_{y_max}, D_1..D_{T}.
std::vector<std::string> summary_feature_names(int y_max, int n_timepoints);

/// How turnover_rates treats a timepoint with fewer than y positive-count
/// variants: Strict rejects the table (the contract for observed data);
/// CapAtAvailable shrinks the top list to every present variant, which the
/// summary pipeline uses because simulated tables routinely carry fewer
/// live variants than y_max.
enum class TopListPolicy { Strict, CapAtAvailable };

/// 1 − Σ p_i² with p_i = count_i / total.  Throws InputError when all
/// counts are zero (or any is negative).
double simpson_diversity(const std::vector<std::int64_t>& counts);

/// The y variants with highest counts, ties broken by ascending variant
/// id.  Throws InputError ("insufficient variants") when fewer than y
/// variants have positive counts.
std::vector<std::string> top_list(const std::map<std::string, std::int64_t>& counts, int y);

/// Mean turn-over z̄_y for y = 1..y_max: for each consecutive timepoint
/// pair, z_y = |top_y(t+1) \ top_y(t)|, averaged over pairs.  Under
/// Strict, throws InputError naming the first timepoint whose
/// positive-variant count falls below y_max.
std::vector<double> turnover_rates(const FrequencyTable& table, int y_max,
                                   TopListPolicy policy = TopListPolicy::Strict);

/// OLS of log z̄_y on log y over strictly positive entries (zeros
/// dropped); coefficient = exp(intercept), exponent = slope.  Throws
/// DegenerateError ("degenerate turnover profile") with fewer than 3
/// positive entries.
TurnoverProfile fit_turnover_profile(const std::vector<double>& mean_turnover_by_size);

/// Simpson diversity for every row of the table plus the mean.
DiversitySeries diversity_series(const FrequencyTable& table);

/// Two-sample KS test with tie handling; p-value from the asymptotic
/// Kolmogorov distribution at effective size n_a·n_b/(n_a+n_b).
KsResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b);

/// Assembles SummaryStats for a table with exactly `n_timepoints` rows.
/// Turn-over uses CapAtAvailable; the exponent is fitted over list sizes
/// y ≤ min(y_max, smallest per-timepoint variant count), where every top
/// list is fully supported, so exponents stay comparable between sparse
/// simulated tables and dense observed ones.
SummaryStats summarize(const FrequencyTable& table, int y_max, int n_timepoints);

/// SummaryStats as a flat JSON object keyed by summary_feature_names().
std::string summary_to_json_text(const SummaryStats& stats);

/// Header line matching summary_to_csv_row.
std::string summary_csv_header(int y_max, int n_timepoints);

/// SummaryStats as one CSV row in flatten() order.
std::string summary_to_csv_row(const SummaryStats& stats);

}  // namespace freqbias
