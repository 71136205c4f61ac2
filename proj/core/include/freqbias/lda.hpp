#pragma once

#include <string>
#include <utility>
#include <vector>

namespace freqbias {

/// Two-axis linear discriminant projection fitted on standardized
/// features.  `mean` and `scale` hold the per-feature standardization;
/// features with zero variance keep scale 1 and weight 0 on both axes.
struct LdaProjection {
  std::vector<double> mean;
  std::vector<double> scale;
  std::vector<double> axis1;  // LD1 weights over standardized features
  std::vector<double> axis2;  // LD2 weights
  std::vector<double> eigenvalues;  // top-2 discriminant eigenvalues

  /// Projects a raw feature vector onto (LD1, LD2).
  std::pair<double, double> project(const std::vector<double>& features) const;
};

/// Fits the projection: standardizes each feature (sample sd), forms
/// between-class scatter / (K−1) and within-class scatter / (n−K) with a
/// ridge of 1e-8 on the latter, and solves the generalized symmetric
/// eigenproblem, keeping the two leading axes.  Axis signs are fixed by
/// making each axis's largest-magnitude weight positive.  Labels are
/// arbitrary integers; throws InputError for fewer than 2 classes or a
/// class with fewer than 2 rows, DegenerateError when every feature has
/// zero variance.
LdaProjection fit_lda(const std::vector<std::vector<double>>& features,
                      const std::vector<int>& labels);

/// Versioned JSON round-trip for reusing a projection outside the
/// training process.
std::string lda_to_json(const LdaProjection& projection);
LdaProjection lda_from_json(const std::string& text);

}  // namespace freqbias
