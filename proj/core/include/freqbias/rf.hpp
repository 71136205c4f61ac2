#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "freqbias/lda.hpp"
#include "freqbias/simulator.hpp"
#include "freqbias/stats.hpp"

namespace freqbias {

/// The three candidate transmission models, in fixed tie-break order.
enum class Model { conformity = 0, novelty = 1, neutrality = 2 };
inline constexpr int kNumModels = 3;

const char* model_name(Model m);
Model model_from_name(const std::string& name);

/// Labeled training rows for model choice.  Rows are model-major
/// (all conformity rows, then novelty, then neutrality); every feature
/// vector carries the base summary statistics plus the two LDA axes
/// projected with `lda`, in `feature_names` order.
struct ReferenceTable {
  std::vector<Model> labels;
  std::vector<double> b_values;
  std::vector<std::vector<double>> features;
  LdaProjection lda;
  std::vector<std::string> feature_names;

  std::size_t n_rows() const { return labels.size(); }
  std::size_t n_features() const { return features.empty() ? 0 : features[0].size(); }
};

/// Forest training knobs.  Zeros mean "use the default": bootstrap_rows
/// defaults to the table row count, mtry to ⌊√F⌋ for classification.
struct ForestConfig {
  int n_trees = 500;
  std::int64_t bootstrap_rows = 0;
  int mtry = 0;
  int min_node_size = 1;
  std::uint64_t seed = 0;
  int workers = 1;
};

/// One binary split node; feature == -1 marks a leaf, whose `value` holds
/// the class index (classification) or the mean target (regression).
/// Rows with feature value <= threshold go left.
struct TreeNode {
  int feature = -1;
  double threshold = 0;
  int left = -1;
  int right = -1;
  double value = 0;
};

struct Tree {
  std::vector<TreeNode> nodes;       // node 0 is the root
  std::vector<std::uint32_t> oob;    // training rows absent from the bootstrap
};

/// Trained forest.  Bootstrap row multisets are not stored: tree t's
/// bootstrap is fully determined by Rng(derive_seed(seed, t)), and the
/// complementary OOB indices are kept explicitly.
struct Forest {
  std::vector<Tree> trees;
  std::size_t n_features = 0;
  std::size_t n_rows = 0;
  std::int64_t bootstrap_rows = 0;
  int mtry = 0;
  int min_node_size = 1;
  std::uint64_t seed = 0;
  bool regression = false;
  std::vector<double> importance;  // per-feature mean Gini decrease (classification)
};

/// Vote tally for one observed vector.  classify_observed fills votes,
/// selected and tie; oob_error, posterior_probability and importances are
/// produced by their own operations and filled in by the caller when a
/// combined record is wanted.
struct ModelChoiceResult {
  std::array<std::int64_t, kNumModels> votes{};
  Model selected = Model::conformity;
  bool tie = false;
  double oob_error = -1;
  double posterior_probability = -1;
  std::vector<double> importances;
};

/// Simulates n_per_model runs per model — b ~ U(−bias_bound, 0) for
/// conformity, U(0, bias_bound) for novelty, exactly 0 for neutrality —
/// summarizes each, fits the LDA on the labeled base statistics and
/// appends both projected axes to every row.  Row i draws from
/// Rng(derive_seed(seed, i)); errors are reported with their row index.
ReferenceTable build_reference_table(int n_per_model, const SimulationConfig& sim_template,
                                     int y_max, double bias_bound, std::uint64_t seed,
                                     int workers = 1);

/// Trains a classification forest: per tree, `bootstrap_rows` rows drawn
/// with replacement, nodes split on the best of mtry randomly drawn
/// features by Gini impurity decrease (midpoint thresholds; ties keep the
/// first candidate), grown until pure, single-row, or no split helps.
/// Tree t draws all randomness from Rng(derive_seed(config.seed, t)), so
/// the forest is identical at any worker count.
Forest grow_forest(const ReferenceTable& table, const ForestConfig& config);

/// Runs the observed 178-feature vector down every tree and tallies
/// votes; plurality ties pick the first model in enum order and set the
/// tie flag.
ModelChoiceResult classify_observed(const Forest& forest, const std::vector<double>& observed);

/// error(k) = misclassification fraction of rows voted on only by their
/// OOB trees among the first k, over rows with at least one such tree.
std::vector<double> oob_error_curve(const Forest& forest, const ReferenceTable& table);

/// (feature index, importance) sorted by descending importance, ties by
/// ascending index; importance is the count-weighted Gini decrease summed
/// per tree and averaged over trees.
std::vector<std::pair<int, double>> gini_importance(const Forest& forest);

/// Posterior probability of the selected model: a regression forest is
/// trained on each covered row's OOB-misclassification indicator (rows
/// with no OOB tree are dropped; more than half missing is an error), and
/// the probability is 1 minus its prediction at the observed features.
/// Its trees use seed streams derive_seed(forest.seed, n_trees + t).
double posterior_probability(const Forest& forest, const ReferenceTable& table,
                             const std::vector<double>& observed, int workers = 1);

/// Base statistics flattened plus the two LDA axes — the feature vector
/// classify_observed expects.
std::vector<double> observed_features(const SummaryStats& stats, const LdaProjection& lda);

/// CSV with header `model,b,f1..fF`; the feature-name sidecar is written
/// by the CLI from feature_names.
std::string reference_table_to_csv(const ReferenceTable& table);

/// Versioned JSON round-trip for forests.
std::string forest_to_json(const Forest& forest);
Forest forest_from_json(const std::string& text);

}  // namespace freqbias
