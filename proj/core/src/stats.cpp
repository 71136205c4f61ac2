#include "freqbias/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "freqbias/errors.hpp"
#include "freqbias/format.hpp"

namespace freqbias {

namespace {

/// Descending-count ranking of one table row; ties resolved by ascending
/// variant id.  `order` lists positive-count columns best-first; `rank`
/// maps a column to its position or -1.
struct RowRanking {
  std::vector<int> order;
  std::vector<int> rank;
};

RowRanking rank_row(const FrequencyTable& table, std::size_t row, bool ids_sorted) {
  const auto& counts = table.counts[row];
  RowRanking r;
  r.rank.assign(counts.size(), -1);
  for (std::size_t v = 0; v < counts.size(); ++v) {
    if (counts[v] > 0) r.order.push_back(static_cast<int>(v));
  }
  std::sort(r.order.begin(), r.order.end(), [&](int a, int b) {
    if (counts[static_cast<std::size_t>(a)] != counts[static_cast<std::size_t>(b)]) {
      return counts[static_cast<std::size_t>(a)] > counts[static_cast<std::size_t>(b)];
    }
    if (ids_sorted) return a < b;
    return table.variant_ids[static_cast<std::size_t>(a)] <
           table.variant_ids[static_cast<std::size_t>(b)];
  });
  for (std::size_t i = 0; i < r.order.size(); ++i) {
    r.rank[static_cast<std::size_t>(r.order[i])] = static_cast<int>(i);
  }
  return r;
}

/// Survival function of the Kolmogorov distribution, Q(λ) = 2 Σ (−1)^{k−1}
/// e^{−2k²λ²}.  Below λ = 0.1 the true tail mass is under 1e-50, so 1 is
/// returned directly rather than summing the slowly-alternating series.
double kolmogorov_q(double lambda) {
  if (lambda < 0.1) return 1.0;
  double sum = 0;
  double sign = 1;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-12) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

std::vector<double> SummaryStats::flatten() const {
  std::vector<double> flat;
  flat.reserve(2 + mean_turnover_by_size.size() + diversity_by_timepoint.size());
  flat.push_back(exponent_x);
  flat.push_back(mean_diversity);
  flat.insert(flat.end(), mean_turnover_by_size.begin(), mean_turnover_by_size.end());
  flat.insert(flat.end(), diversity_by_timepoint.begin(), diversity_by_timepoint.end());
  return flat;
}

std::vector<std::string> summary_feature_names(int y_max, int n_timepoints) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(2 + y_max + n_timepoints));
  names.emplace_back("x");
  names.emplace_back("mean_D");
  for (int y = 1; y <= y_max; ++y) names.push_back("z_" + std::to_string(y));
  for (int t = 1; t <= n_timepoints; ++t) names.push_back("D_" + std::to_string(t));
  return names;
}

double simpson_diversity(const std::vector<std::int64_t>& counts) {
  std::int64_t total = 0;
  double sum_sq = 0;
  for (const auto c : counts) {
    if (c < 0) throw InputError("negative count");
    total += c;
    sum_sq += static_cast<double>(c) * static_cast<double>(c);
  }
  if (total == 0) throw InputError("all-zero counts");
  const double t = static_cast<double>(total);
  return 1.0 - sum_sq / (t * t);
}

std::vector<std::string> top_list(const std::map<std::string, std::int64_t>& counts, int y) {
  if (y < 1) throw InputError("top list size must be >= 1, got " + std::to_string(y));
  std::vector<std::pair<const std::string*, std::int64_t>> positive;
  for (const auto& [id, c] : counts) {
    if (c < 0) throw InputError("negative count for variant '" + id + "'");
    if (c > 0) positive.emplace_back(&id, c);
  }
  if (positive.size() < static_cast<std::size_t>(y)) {
    throw InputError("insufficient variants: have " + std::to_string(positive.size()) +
                     " with positive counts, need " + std::to_string(y));
  }
  // Map order is id-ascending; a stable sort on count keeps that for ties.
  std::stable_sort(positive.begin(), positive.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> result;
  result.reserve(static_cast<std::size_t>(y));
  for (int i = 0; i < y; ++i) result.push_back(*positive[static_cast<std::size_t>(i)].first);
  return result;
}

std::vector<double> turnover_rates(const FrequencyTable& table, int y_max,
                                   TopListPolicy policy) {
  validate_table(table);
  if (y_max < 1) throw InputError("y_max must be >= 1, got " + std::to_string(y_max));
  const std::size_t T = table.n_timepoints();
  if (T < 2) throw InputError("turnover needs at least 2 timepoints, got " + std::to_string(T));

  const bool ids_sorted = std::is_sorted(table.variant_ids.begin(), table.variant_ids.end());
  std::vector<RowRanking> rankings;
  rankings.reserve(T);
  for (std::size_t t = 0; t < T; ++t) {
    rankings.push_back(rank_row(table, t, ids_sorted));
    if (policy == TopListPolicy::Strict &&
        rankings.back().order.size() < static_cast<std::size_t>(y_max)) {
      throw InputError("only " + std::to_string(rankings.back().order.size()) +
                       " positive-count variants at timepoint " +
                       std::to_string(table.timepoints[t]) + ", need " + std::to_string(y_max));
    }
  }

  std::vector<double> sums(static_cast<std::size_t>(y_max), 0.0);
  for (std::size_t t = 0; t + 1 < T; ++t) {
    const RowRanking& a = rankings[t];
    const RowRanking& b = rankings[t + 1];
    const int ka = static_cast<int>(a.order.size());
    const int kb = static_cast<int>(b.order.size());
    // Walk y upward keeping the intersection size of the two top lists.
    int common = 0;
    for (int y = 1; y <= y_max; ++y) {
      if (y <= ka) {
        const int a_new = a.order[static_cast<std::size_t>(y - 1)];
        const int rb = b.rank[static_cast<std::size_t>(a_new)];
        if (rb >= 0 && rb < std::min(y - 1, kb)) ++common;
      }
      if (y <= kb) {
        const int b_new = b.order[static_cast<std::size_t>(y - 1)];
        const int ra = a.rank[static_cast<std::size_t>(b_new)];
        if (ra >= 0 && ra < std::min(y, ka)) ++common;
      }
      sums[static_cast<std::size_t>(y - 1)] +=
          static_cast<double>(std::min(y, kb) - common);
    }
  }
  const double pairs = static_cast<double>(T - 1);
  for (auto& s : sums) s /= pairs;
  return sums;
}

TurnoverProfile fit_turnover_profile(const std::vector<double>& mean_turnover_by_size) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < mean_turnover_by_size.size(); ++i) {
    const double z = mean_turnover_by_size[i];
    if (z > 0) {
      lx.push_back(std::log(static_cast<double>(i + 1)));
      ly.push_back(std::log(z));
    }
  }
  if (lx.size() < 3) {
    throw DegenerateError("degenerate profile: fewer than 3 positive turnover entries (got " +
                          std::to_string(lx.size()) + ")");
  }
  double mx = 0;
  double my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(lx.size());
  double sxx = 0;
  double sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double dx = lx[i] - mx;
    sxx += dx * dx;
    sxy += dx * (ly[i] - my);
  }
  TurnoverProfile profile;
  profile.mean_turnover = mean_turnover_by_size;
  profile.list_sizes.resize(mean_turnover_by_size.size());
  for (std::size_t i = 0; i < profile.list_sizes.size(); ++i) {
    profile.list_sizes[i] = static_cast<int>(i + 1);
  }
  profile.exponent = sxy / sxx;
  profile.coefficient = std::exp(my - profile.exponent * mx);
  return profile;
}

DiversitySeries diversity_series(const FrequencyTable& table) {
  validate_table(table);
  DiversitySeries series;
  series.per_timepoint.reserve(table.n_timepoints());
  double sum = 0;
  for (const auto& row : table.counts) {
    const double d = simpson_diversity(row);
    series.per_timepoint.push_back(d);
    sum += d;
  }
  series.mean = sum / static_cast<double>(series.per_timepoint.size());
  return series;
}

KsResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw InputError("empty vector");
  std::vector<double> sa = a;
  std::vector<double> sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const auto na = sa.size();
  const auto nb = sb.size();
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0;
  while (i < na && j < nb) {
    const double v = std::min(sa[i], sb[j]);
    while (i < na && sa[i] == v) ++i;
    while (j < nb && sb[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / static_cast<double>(na) -
                             static_cast<double>(j) / static_cast<double>(nb)));
  }
  KsResult result;
  result.statistic = d;
  const double ne = static_cast<double>(na) * static_cast<double>(nb) /
                    static_cast<double>(na + nb);
  result.p_value = kolmogorov_q(std::sqrt(ne) * d);
  return result;
}

SummaryStats summarize(const FrequencyTable& table, int y_max, int n_timepoints) {
  validate_table(table);
  if (static_cast<int>(table.n_timepoints()) != n_timepoints) {
    throw InputError("table has " + std::to_string(table.n_timepoints()) +
                     " timepoints, expected " + std::to_string(n_timepoints));
  }
  SummaryStats stats;
  stats.mean_turnover_by_size = turnover_rates(table, y_max, TopListPolicy::CapAtAvailable);
  DiversitySeries ds = diversity_series(table);
  stats.diversity_by_timepoint = std::move(ds.per_timepoint);
  stats.mean_diversity = ds.mean;

  // Fit the exponent only over list sizes supported at every timepoint, so
  // the capped tail (z̄ flat once lists saturate) cannot bend the slope.
  int min_variants = std::numeric_limits<int>::max();
  for (const auto& row : table.counts) {
    int k = 0;
    for (const auto c : row) {
      if (c > 0) ++k;
    }
    min_variants = std::min(min_variants, k);
  }
  const int y_fit = std::min(y_max, min_variants);
  const std::vector<double> head(stats.mean_turnover_by_size.begin(),
                                 stats.mean_turnover_by_size.begin() + y_fit);
  stats.exponent_x = fit_turnover_profile(head).exponent;
  return stats;
}

std::string summary_to_json_text(const SummaryStats& stats) {
  const auto names = summary_feature_names(
      static_cast<int>(stats.mean_turnover_by_size.size()),
      static_cast<int>(stats.diversity_by_timepoint.size()));
  const auto flat = stats.flatten();
  nlohmann::ordered_json j;
  for (std::size_t i = 0; i < names.size(); ++i) j[names[i]] = flat[i];
  return j.dump(2) + "\n";
}

std::string summary_csv_header(int y_max, int n_timepoints) {
  const auto names = summary_feature_names(y_max, n_timepoints);
  std::string line;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) line += ',';
    line += names[i];
  }
  return line;
}

std::string summary_to_csv_row(const SummaryStats& stats) {
  const auto flat = stats.flatten();
  std::string line;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    if (i) line += ',';
    line += format_double(flat[i]);
  }
  return line;
}

}  // namespace freqbias
