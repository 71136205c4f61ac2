#include "freqbias/rf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "freqbias/errors.hpp"
#include "freqbias/format.hpp"
#include "freqbias/parallel.hpp"

namespace freqbias {

namespace {

/// Row-major view of the training matrix.
struct DataView {
  const double* x = nullptr;
  std::size_t n = 0;
  std::size_t f = 0;
  const double* row(std::size_t r) const { return x + r * f; }
};

struct Job {
  std::uint32_t lo;
  std::uint32_t hi;
  std::int32_t node;
};

/// Midpoint between two adjacent sorted values, nudged down to `lo` when
/// rounding would land on `hi` (a threshold must keep `hi` on the right
/// under the value <= threshold convention).
double split_threshold(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  if (!(mid < hi)) return lo;
  return mid;
}

/// Grows one tree over the bootstrap multiset `idx` (partitioned in
/// place).  Exactly one of `classes` / `targets` is non-null.  Splits
/// maximize Σ_side (class-count² sums)/size for classification and
/// Σ_side (target sum)²/size for regression — both equivalent to maximal
/// impurity decrease.  `importance`, when given, accumulates the
/// count-weighted Gini decrease per feature.
std::vector<TreeNode> grow_tree(const DataView& data, const std::uint8_t* classes,
                                const double* targets, int n_classes, int mtry,
                                int min_node_size, Rng& rng, std::vector<std::uint32_t>& idx,
                                std::vector<int>& feat_order, std::vector<double>* importance) {
  const int n_feat = static_cast<int>(data.f);
  std::vector<TreeNode> nodes;
  std::vector<Job> stack;
  std::vector<std::int64_t> cnt(static_cast<std::size_t>(std::max(n_classes, 1)));
  std::vector<std::int64_t> lcnt(cnt.size());
  std::vector<std::pair<double, std::uint8_t>> cvals;
  std::vector<std::pair<double, double>> rvals;

  nodes.emplace_back();
  stack.push_back({0, static_cast<std::uint32_t>(idx.size()), 0});
  while (!stack.empty()) {
    const Job job = stack.back();
    stack.pop_back();
    const std::uint32_t lo = job.lo;
    const std::uint32_t hi = job.hi;
    const std::int64_t m = static_cast<std::int64_t>(hi) - lo;

    int best_feature = -1;
    double best_threshold = 0;
    double best_score = 0;
    double base_score = 0;
    double leaf_value = 0;

    if (classes != nullptr) {
      std::fill(cnt.begin(), cnt.end(), 0);
      for (std::uint32_t i = lo; i < hi; ++i) ++cnt[classes[idx[i]]];
      std::int64_t top = -1;
      int top_class = 0;
      std::int64_t base_sumsq = 0;
      for (int k = 0; k < n_classes; ++k) {
        base_sumsq += cnt[static_cast<std::size_t>(k)] * cnt[static_cast<std::size_t>(k)];
        if (cnt[static_cast<std::size_t>(k)] > top) {
          top = cnt[static_cast<std::size_t>(k)];
          top_class = k;
        }
      }
      leaf_value = static_cast<double>(top_class);
      base_score = static_cast<double>(base_sumsq) / static_cast<double>(m);
      const bool pure = top == m;
      if (m > min_node_size && !pure) {
        best_score = base_score;
        for (int t = 0; t < mtry; ++t) {
          const int swap_with = t + static_cast<int>(rng.below(
                                        static_cast<std::uint64_t>(n_feat - t)));
          std::swap(feat_order[static_cast<std::size_t>(t)],
                    feat_order[static_cast<std::size_t>(swap_with)]);
          const int f = feat_order[static_cast<std::size_t>(t)];
          cvals.clear();
          for (std::uint32_t i = lo; i < hi; ++i) {
            cvals.emplace_back(data.row(idx[i])[f], classes[idx[i]]);
          }
          std::sort(cvals.begin(), cvals.end());
          if (cvals.front().first == cvals.back().first) continue;
          std::fill(lcnt.begin(), lcnt.end(), 0);
          std::int64_t lsumsq = 0;
          std::int64_t rsumsq = base_sumsq;
          std::int64_t nl = 0;
          for (std::int64_t i = 0; i + 1 < m; ++i) {
            const auto c = cvals[static_cast<std::size_t>(i)].second;
            lsumsq += 2 * lcnt[c] + 1;
            rsumsq -= 2 * (cnt[c] - lcnt[c]) - 1;
            ++lcnt[c];
            ++nl;
            if (cvals[static_cast<std::size_t>(i + 1)].first !=
                cvals[static_cast<std::size_t>(i)].first) {
              const double score = static_cast<double>(lsumsq) / static_cast<double>(nl) +
                                   static_cast<double>(rsumsq) / static_cast<double>(m - nl);
              if (score > best_score) {
                best_score = score;
                best_feature = f;
                best_threshold = split_threshold(cvals[static_cast<std::size_t>(i)].first,
                                                 cvals[static_cast<std::size_t>(i + 1)].first);
              }
            }
          }
        }
      }
      if (best_feature >= 0 && importance != nullptr) {
        (*importance)[static_cast<std::size_t>(best_feature)] += best_score - base_score;
      }
    } else {
      double sum = 0;
      double sumsq = 0;
      for (std::uint32_t i = lo; i < hi; ++i) {
        const double y = targets[idx[i]];
        sum += y;
        sumsq += y * y;
      }
      leaf_value = sum / static_cast<double>(m);
      base_score = sum * sum / static_cast<double>(m);
      const bool constant = sumsq - base_score <= 0;
      if (m > min_node_size && !constant) {
        best_score = base_score;
        for (int t = 0; t < mtry; ++t) {
          const int swap_with = t + static_cast<int>(rng.below(
                                        static_cast<std::uint64_t>(n_feat - t)));
          std::swap(feat_order[static_cast<std::size_t>(t)],
                    feat_order[static_cast<std::size_t>(swap_with)]);
          const int f = feat_order[static_cast<std::size_t>(t)];
          rvals.clear();
          for (std::uint32_t i = lo; i < hi; ++i) {
            rvals.emplace_back(data.row(idx[i])[f], targets[idx[i]]);
          }
          std::sort(rvals.begin(), rvals.end());
          if (rvals.front().first == rvals.back().first) continue;
          double lsum = 0;
          std::int64_t nl = 0;
          for (std::int64_t i = 0; i + 1 < m; ++i) {
            lsum += rvals[static_cast<std::size_t>(i)].second;
            ++nl;
            if (rvals[static_cast<std::size_t>(i + 1)].first !=
                rvals[static_cast<std::size_t>(i)].first) {
              const double rsum = sum - lsum;
              const double score = lsum * lsum / static_cast<double>(nl) +
                                   rsum * rsum / static_cast<double>(m - nl);
              if (score > best_score) {
                best_score = score;
                best_feature = f;
                best_threshold = split_threshold(rvals[static_cast<std::size_t>(i)].first,
                                                 rvals[static_cast<std::size_t>(i + 1)].first);
              }
            }
          }
        }
      }
    }

    if (best_feature < 0) {
      nodes[static_cast<std::size_t>(job.node)].feature = -1;
      nodes[static_cast<std::size_t>(job.node)].value = leaf_value;
      continue;
    }

    const auto split_point = std::partition(
        idx.begin() + lo, idx.begin() + hi, [&](std::uint32_t r) {
          return data.row(r)[best_feature] <= best_threshold;
        });
    const auto mid = static_cast<std::uint32_t>(split_point - idx.begin());
    const auto left_id = static_cast<std::int32_t>(nodes.size());
    nodes.emplace_back();
    const auto right_id = static_cast<std::int32_t>(nodes.size());
    nodes.emplace_back();
    TreeNode& parent = nodes[static_cast<std::size_t>(job.node)];
    parent.feature = best_feature;
    parent.threshold = best_threshold;
    parent.left = left_id;
    parent.right = right_id;
    stack.push_back({mid, hi, right_id});
    stack.push_back({lo, mid, left_id});
  }
  return nodes;
}

double predict_tree(const Tree& tree, const double* row) {
  int cur = 0;
  while (tree.nodes[static_cast<std::size_t>(cur)].feature >= 0) {
    const TreeNode& nd = tree.nodes[static_cast<std::size_t>(cur)];
    cur = row[nd.feature] <= nd.threshold ? nd.left : nd.right;
  }
  return tree.nodes[static_cast<std::size_t>(cur)].value;
}

/// Trains `n_trees` trees over `data`; tree t draws everything (bootstrap
/// first, then split candidates) from Rng(derive_seed(seed, stream_offset
/// + t)), letting a follow-up forest share the seed without stream reuse.
Forest train_forest(const DataView& data, const std::uint8_t* classes, const double* targets,
                    int n_classes, int n_trees, std::int64_t bootstrap_rows, int mtry,
                    int min_node_size, std::uint64_t seed, std::uint64_t stream_offset,
                    int workers) {
  Forest forest;
  forest.n_features = data.f;
  forest.n_rows = data.n;
  forest.bootstrap_rows = bootstrap_rows;
  forest.mtry = mtry;
  forest.min_node_size = min_node_size;
  forest.seed = seed;
  forest.regression = classes == nullptr;
  forest.trees.resize(static_cast<std::size_t>(n_trees));

  std::vector<std::vector<double>> tree_importance;
  if (!forest.regression) tree_importance.resize(static_cast<std::size_t>(n_trees));

  parallel_for(static_cast<std::size_t>(n_trees), workers, [&](std::size_t t) {
    Rng rng(derive_seed(seed, stream_offset + t));
    std::vector<std::uint32_t> idx;
    idx.reserve(static_cast<std::size_t>(bootstrap_rows));
    std::vector<std::uint8_t> seen(data.n, 0);
    for (std::int64_t i = 0; i < bootstrap_rows; ++i) {
      const auto r = static_cast<std::uint32_t>(rng.below(data.n));
      idx.push_back(r);
      seen[r] = 1;
    }
    Tree& tree = forest.trees[t];
    tree.oob.clear();
    for (std::uint32_t r = 0; r < data.n; ++r) {
      if (!seen[r]) tree.oob.push_back(r);
    }
    std::vector<int> feat_order(data.f);
    std::iota(feat_order.begin(), feat_order.end(), 0);
    std::vector<double>* imp = nullptr;
    if (!forest.regression) {
      tree_importance[t].assign(data.f, 0.0);
      imp = &tree_importance[t];
    }
    tree.nodes = grow_tree(data, classes, targets, n_classes, mtry, min_node_size, rng, idx,
                           feat_order, imp);
  });

  if (!forest.regression) {
    forest.importance.assign(data.f, 0.0);
    for (const auto& imp : tree_importance) {  // tree-index order
      for (std::size_t j = 0; j < imp.size(); ++j) forest.importance[j] += imp[j];
    }
    for (auto& v : forest.importance) v /= static_cast<double>(n_trees);
  }
  return forest;
}

void check_table(const ReferenceTable& table) {
  const std::size_t n = table.n_rows();
  if (n == 0) throw InputError("empty reference table");
  if (table.b_values.size() != n || table.features.size() != n) {
    throw InputError("reference table field lengths disagree");
  }
  const std::size_t F = table.features[0].size();
  if (F == 0) throw InputError("reference table has no features");
  for (const auto& row : table.features) {
    if (row.size() != F) throw InputError("reference table feature rows differ in length");
  }
}

void check_forest_matches(const Forest& forest, const ReferenceTable& table) {
  if (forest.trees.empty()) throw InputError("empty forest");
  if (forest.regression) throw InputError("classification forest required");
  if (forest.n_rows != table.n_rows()) {
    throw InputError("forest was trained on " + std::to_string(forest.n_rows) +
                     " rows, table has " + std::to_string(table.n_rows()));
  }
  if (forest.n_features != table.n_features()) {
    throw InputError("forest expects " + std::to_string(forest.n_features) +
                     " features, table has " + std::to_string(table.n_features()));
  }
}

/// Full-forest OOB votes per row, in fixed tree order.
std::vector<std::array<std::int64_t, kNumModels>> oob_votes(const Forest& forest,
                                                            const ReferenceTable& table) {
  std::vector<std::array<std::int64_t, kNumModels>> votes(
      table.n_rows(), std::array<std::int64_t, kNumModels>{});
  for (const auto& tree : forest.trees) {
    for (const auto r : tree.oob) {
      const auto pred = static_cast<std::size_t>(predict_tree(tree, table.features[r].data()));
      ++votes[r][pred];
    }
  }
  return votes;
}

int plurality(const std::array<std::int64_t, kNumModels>& votes, bool* tie = nullptr) {
  int best = 0;
  for (int k = 1; k < kNumModels; ++k) {
    if (votes[static_cast<std::size_t>(k)] > votes[static_cast<std::size_t>(best)]) best = k;
  }
  if (tie != nullptr) {
    *tie = false;
    for (int k = 0; k < kNumModels; ++k) {
      if (k != best && votes[static_cast<std::size_t>(k)] == votes[static_cast<std::size_t>(best)]) {
        *tie = true;
      }
    }
  }
  return best;
}

}  // namespace

const char* model_name(Model m) {
  switch (m) {
    case Model::conformity: return "conformity";
    case Model::novelty: return "novelty";
    case Model::neutrality: return "neutrality";
  }
  throw InputError("invalid model value");
}

Model model_from_name(const std::string& name) {
  if (name == "conformity") return Model::conformity;
  if (name == "novelty") return Model::novelty;
  if (name == "neutrality") return Model::neutrality;
  throw InputError("unknown model '" + name + "'");
}

ReferenceTable build_reference_table(int n_per_model, const SimulationConfig& sim_template,
                                     int y_max, double bias_bound, std::uint64_t seed,
                                     int workers) {
  if (n_per_model < 10) {
    throw InputError("n_per_model must be >= 10, got " + std::to_string(n_per_model));
  }
  sim_template.validate();
  if (y_max < 1) throw InputError("y_max must be >= 1, got " + std::to_string(y_max));
  if (!(bias_bound > 0.0) || bias_bound > 1.0) {
    throw InputError("bias_bound must lie in (0, 1], got " + std::to_string(bias_bound));
  }

  const std::size_t n = static_cast<std::size_t>(n_per_model) * kNumModels;
  ReferenceTable table;
  table.labels.resize(n);
  table.b_values.resize(n);
  std::vector<std::vector<double>> base(n);

  parallel_for(n, workers, [&](std::size_t i) {
    const auto model = static_cast<Model>(i / static_cast<std::size_t>(n_per_model));
    Rng rng(derive_seed(seed, i));
    double b = 0;
    if (model == Model::conformity) {
      b = rng.uniform(-bias_bound, 0.0);
    } else if (model == Model::novelty) {
      b = rng.uniform(0.0, bias_bound);
    }
    SimulationConfig sim = sim_template;
    sim.bias = b;
    sim.seed = rng.next_u64();
    try {
      const SimulationOutput out = run_simulation(sim);
      base[i] = summarize(out.table, y_max, sim.record_steps).flatten();
    } catch (const DegenerateError& e) {
      throw DegenerateError("row " + std::to_string(i) + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError("row " + std::to_string(i) + ": " + e.what());
    }
    table.labels[i] = model;
    table.b_values[i] = b;
  });

  std::vector<int> label_ints(n);
  for (std::size_t i = 0; i < n; ++i) label_ints[i] = static_cast<int>(table.labels[i]);
  table.lda = fit_lda(base, label_ints);

  table.features.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = table.features[i];
    row = std::move(base[i]);
    const auto axes = table.lda.project(row);
    row.push_back(axes.first);
    row.push_back(axes.second);
  }
  table.feature_names = summary_feature_names(y_max, sim_template.record_steps);
  table.feature_names.emplace_back("LD1");
  table.feature_names.emplace_back("LD2");
  return table;
}

Forest grow_forest(const ReferenceTable& table, const ForestConfig& config) {
  check_table(table);
  const std::size_t n = table.n_rows();
  const std::size_t F = table.n_features();
  if (config.n_trees < 1) {
    throw InputError("n_trees must be >= 1, got " + std::to_string(config.n_trees));
  }
  const std::int64_t bootstrap_rows =
      config.bootstrap_rows == 0 ? static_cast<std::int64_t>(n) : config.bootstrap_rows;
  if (bootstrap_rows < 1) {
    throw InputError("bootstrap_rows must be >= 1, got " + std::to_string(config.bootstrap_rows));
  }
  int mtry = config.mtry == 0
                 ? static_cast<int>(std::floor(std::sqrt(static_cast<double>(F))))
                 : config.mtry;
  mtry = std::clamp(mtry, 1, static_cast<int>(F));
  if (config.min_node_size < 1) {
    throw InputError("min_node_size must be >= 1, got " + std::to_string(config.min_node_size));
  }

  std::vector<double> flat(n * F);
  std::vector<std::uint8_t> classes(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(table.features[i].begin(), table.features[i].end(), flat.begin() + static_cast<std::ptrdiff_t>(i * F));
    classes[i] = static_cast<std::uint8_t>(table.labels[i]);
  }
  const DataView data{flat.data(), n, F};
  return train_forest(data, classes.data(), nullptr, kNumModels, config.n_trees, bootstrap_rows,
                      mtry, config.min_node_size, config.seed, 0, config.workers);
}

ModelChoiceResult classify_observed(const Forest& forest, const std::vector<double>& observed) {
  if (forest.trees.empty()) throw InputError("empty forest");
  if (forest.regression) throw InputError("classification forest required");
  if (observed.size() != forest.n_features) {
    throw InputError("observed vector has " + std::to_string(observed.size()) +
                     " features, forest expects " + std::to_string(forest.n_features));
  }
  for (const double v : observed) {
    if (!std::isfinite(v)) throw InputError("observed features must be finite");
  }
  ModelChoiceResult result;
  for (const auto& tree : forest.trees) {
    ++result.votes[static_cast<std::size_t>(predict_tree(tree, observed.data()))];
  }
  result.selected = static_cast<Model>(plurality(result.votes, &result.tie));
  return result;
}

std::vector<double> oob_error_curve(const Forest& forest, const ReferenceTable& table) {
  check_forest_matches(forest, table);
  const std::size_t n = table.n_rows();
  std::vector<std::array<std::int64_t, kNumModels>> votes(
      n, std::array<std::int64_t, kNumModels>{});
  std::vector<double> curve;
  curve.reserve(forest.trees.size());
  for (const auto& tree : forest.trees) {
    for (const auto r : tree.oob) {
      const auto pred = static_cast<std::size_t>(predict_tree(tree, table.features[r].data()));
      ++votes[r][pred];
    }
    std::size_t covered = 0;
    std::size_t wrong = 0;
    for (std::size_t r = 0; r < n; ++r) {
      const auto& v = votes[r];
      if (v[0] + v[1] + v[2] == 0) continue;
      ++covered;
      if (plurality(v) != static_cast<int>(table.labels[r])) ++wrong;
    }
    curve.push_back(covered == 0 ? 0.0
                                 : static_cast<double>(wrong) / static_cast<double>(covered));
  }
  return curve;
}

std::vector<std::pair<int, double>> gini_importance(const Forest& forest) {
  if (forest.trees.empty()) throw InputError("empty forest");
  if (forest.regression || forest.importance.size() != forest.n_features) {
    throw InputError("Gini importance requires a classification forest");
  }
  std::vector<std::pair<int, double>> ranked;
  ranked.reserve(forest.importance.size());
  for (std::size_t j = 0; j < forest.importance.size(); ++j) {
    ranked.emplace_back(static_cast<int>(j), forest.importance[j]);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return ranked;
}

double posterior_probability(const Forest& forest, const ReferenceTable& table,
                             const std::vector<double>& observed, int workers) {
  check_forest_matches(forest, table);
  if (observed.size() != forest.n_features) {
    throw InputError("observed vector has " + std::to_string(observed.size()) +
                     " features, forest expects " + std::to_string(forest.n_features));
  }
  const std::size_t n = table.n_rows();
  const std::size_t F = table.n_features();
  const auto votes = oob_votes(forest, table);

  std::vector<std::uint32_t> covered;
  covered.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (votes[r][0] + votes[r][1] + votes[r][2] > 0) {
      covered.push_back(static_cast<std::uint32_t>(r));
    }
  }
  if (covered.size() * 2 < n) {
    throw DegenerateError("only " + std::to_string(covered.size()) + " of " + std::to_string(n) +
                          " rows have out-of-bag coverage; posterior probability undefined");
  }

  std::vector<double> flat(covered.size() * F);
  std::vector<double> miss(covered.size());
  for (std::size_t i = 0; i < covered.size(); ++i) {
    const auto r = covered[i];
    std::copy(table.features[r].begin(), table.features[r].end(),
              flat.begin() + static_cast<std::ptrdiff_t>(i * F));
    miss[i] = plurality(votes[r]) == static_cast<int>(table.labels[r]) ? 0.0 : 1.0;
  }

  const DataView data{flat.data(), covered.size(), F};
  const int reg_mtry = std::max(1, static_cast<int>(F) / 3);
  const Forest reg =
      train_forest(data, nullptr, miss.data(), 0, static_cast<int>(forest.trees.size()),
                   static_cast<std::int64_t>(covered.size()), reg_mtry, 5, forest.seed,
                   forest.trees.size(), workers);

  double predicted_error = 0;
  for (const auto& tree : reg.trees) predicted_error += predict_tree(tree, observed.data());
  predicted_error /= static_cast<double>(reg.trees.size());
  return std::clamp(1.0 - predicted_error, 0.0, 1.0);
}

std::vector<double> observed_features(const SummaryStats& stats, const LdaProjection& lda) {
  std::vector<double> features = stats.flatten();
  const auto axes = lda.project(features);
  features.push_back(axes.first);
  features.push_back(axes.second);
  return features;
}

std::string reference_table_to_csv(const ReferenceTable& table) {
  check_table(table);
  const std::size_t F = table.n_features();
  std::string out = "model,b";
  for (std::size_t j = 1; j <= F; ++j) out += ",f" + std::to_string(j);
  out += '\n';
  for (std::size_t i = 0; i < table.n_rows(); ++i) {
    out += model_name(table.labels[i]);
    out += ',';
    out += format_double(table.b_values[i]);
    for (const double v : table.features[i]) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::string forest_to_json(const Forest& forest) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["type"] = forest.regression ? "regression" : "classification";
  j["n_features"] = forest.n_features;
  j["n_rows"] = forest.n_rows;
  j["bootstrap_rows"] = forest.bootstrap_rows;
  j["mtry"] = forest.mtry;
  j["min_node_size"] = forest.min_node_size;
  j["seed"] = forest.seed;
  j["importance"] = forest.importance;
  auto& trees = j["trees"];
  trees = nlohmann::ordered_json::array();
  for (const auto& tree : forest.trees) {
    nlohmann::ordered_json jt;
    auto& nodes = jt["nodes"];
    nodes = nlohmann::ordered_json::array();
    for (const auto& nd : tree.nodes) {
      nodes.push_back({nd.feature, nd.threshold, nd.left, nd.right, nd.value});
    }
    jt["oob"] = tree.oob;
    trees.push_back(std::move(jt));
  }
  return j.dump() + "\n";
}

Forest forest_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("invalid forest JSON: ") + e.what());
  }
  Forest forest;
  try {
    if (j.at("schema_version").get<int>() != 1) {
      throw InputError("unsupported forest schema version");
    }
    forest.regression = j.at("type").get<std::string>() == "regression";
    forest.n_features = j.at("n_features").get<std::size_t>();
    forest.n_rows = j.at("n_rows").get<std::size_t>();
    forest.bootstrap_rows = j.at("bootstrap_rows").get<std::int64_t>();
    forest.mtry = j.at("mtry").get<int>();
    forest.min_node_size = j.at("min_node_size").get<int>();
    forest.seed = j.at("seed").get<std::uint64_t>();
    j.at("importance").get_to(forest.importance);
    for (const auto& jt : j.at("trees")) {
      Tree tree;
      for (const auto& jn : jt.at("nodes")) {
        if (jn.size() != 5) throw InputError("invalid forest JSON: bad node arity");
        TreeNode nd;
        nd.feature = jn[0].get<int>();
        nd.threshold = jn[1].get<double>();
        nd.left = jn[2].get<int>();
        nd.right = jn[3].get<int>();
        nd.value = jn[4].get<double>();
        if (nd.feature >= static_cast<int>(forest.n_features)) {
          throw InputError("invalid forest JSON: split feature out of range");
        }
        tree.nodes.push_back(nd);
      }
      jt.at("oob").get_to(tree.oob);
      forest.trees.push_back(std::move(tree));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid forest JSON: ") + e.what());
  }
  return forest;
}

}  // namespace freqbias
