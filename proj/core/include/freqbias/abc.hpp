#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "freqbias/simulator.hpp"

namespace freqbias {

/// Rejection-sampling setup: how many simulations to run, the acceptance
/// fraction, and the uniform prior on the bias parameter.  `stat_selector`
/// names the summary-statistic subset used for distances; only the
/// two-statistic subset {x, mean_D} is supported.
struct RejectionConfig {
  int iterations = 0;
  double tolerance = 0;  // epsilon, in (0, 1]
  double prior_low = 0;
  double prior_high = 0;
  std::vector<std::string> stat_selector = {"x", "mean_D"};

  /// Throws InputError unless iterations >= 1, tolerance ∈ (0, 1],
  /// prior_low <= prior_high, tolerance·iterations >= 10, and the
  /// selector is exactly {x, mean_D}.  A point prior (low == high) is
  /// allowed for degenerate-prior checks.
  void validate() const;
};

/// The two observed summary statistics entering the distance.
struct ObservedStats {
  double x = 0;
  double mean_D = 0;
};

/// One reference-table row: the drawn bias and its simulated statistics.
struct ReferenceRow {
  double b = 0;
  double x = 0;
  double mean_D = 0;
};

/// Accepted posterior draws with point and interval summaries.
struct Posterior {
  std::vector<double> accepted_b;  // ascending-distance order
  double median = 0;
  double hdpi_low = 0;
  double hdpi_high = 0;
};

/// Runs one simulation per iteration with b ~ Uniform(prior_low,
/// prior_high) and summarizes it to (x, mean_D).  Iteration i draws from
/// Rng(derive_seed(seed, i)) — first the bias, then the simulation seed —
/// so rows are identical at any worker count and errors can name their
/// iteration.  `sim_template` supplies N, μ, warm-up and record length;
/// its bias and seed fields are overwritten per iteration.
std::vector<ReferenceRow> generate_reference(const RejectionConfig& config,
                                             const SimulationConfig& sim_template, int y_max,
                                             std::uint64_t seed, int workers = 1);

/// Rejection step: standardizes both statistics by their median absolute
/// deviation across the reference, ranks rows by Euclidean distance to
/// `observed` (ties by row index), accepts the ⌈tolerance·|reference|⌉
/// closest, and summarizes accepted b by median and 95% HDPI.  Throws
/// DegenerateError when a statistic's MAD is zero.
Posterior rejection_abc(const ObservedStats& observed,
                        const std::vector<ReferenceRow>& reference, double tolerance);

/// Shortest contiguous interval over the sorted samples containing
/// ⌈mass·n⌉ of them; among equal-width windows the leftmost wins.
/// Requires at least 10 samples and mass ∈ (0, 1].
std::pair<double, double> hdpi(const std::vector<double>& samples, double mass);

/// Goodness-of-fit p-value.  Test statistic: median distance of the
/// accepted rows to the target, with MAD scales fixed from the full
/// reference.  Null: the same statistic for n_pseudo distinct reference
/// rows (drawn via Rng(seed)), each excluded from its own acceptance
/// pool.  Returns the fraction of null statistics >= the observed one.
double goodness_of_fit(const ObservedStats& observed,
                       const std::vector<ReferenceRow>& reference, double tolerance,
                       int n_pseudo, std::uint64_t seed);

/// Leave-one-out cross-validation: holds out n_folds rows (drawn via
/// Rng(seed)), re-runs rejection_abc for each at every tolerance, and
/// returns per-tolerance Σ(b̂ − b_true)² / (n_folds · Var(b over the
/// reference)), with b̂ the posterior median.
std::vector<double> cross_validate(const std::vector<ReferenceRow>& reference,
                                   const std::vector<double>& tolerances, int n_folds,
                                   std::uint64_t seed);

/// Reference rows as CSV with header `b,x,mean_D` (shortest round-trip
/// doubles), and the inverse parser.
std::string reference_to_csv(const std::vector<ReferenceRow>& reference);
std::vector<ReferenceRow> reference_from_csv(const std::string& text);

}  // namespace freqbias
