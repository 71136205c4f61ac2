#include "freqbias/lda.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Dense>
#include <json.hpp>

#include "freqbias/errors.hpp"

namespace freqbias {

namespace {

constexpr double kRidge = 1e-8;

/// Makes the largest-magnitude weight positive (first such index on
/// ties), so eigenvector sign is reproducible.
void fix_sign(std::vector<double>& axis) {
  std::size_t arg = 0;
  double best = 0;
  for (std::size_t j = 0; j < axis.size(); ++j) {
    if (std::abs(axis[j]) > best) {
      best = std::abs(axis[j]);
      arg = j;
    }
  }
  if (best > 0 && axis[arg] < 0) {
    for (auto& w : axis) w = -w;
  }
}

}  // namespace

std::pair<double, double> LdaProjection::project(const std::vector<double>& features) const {
  if (features.size() != mean.size()) {
    throw InputError("feature vector has " + std::to_string(features.size()) +
                     " entries, projection expects " + std::to_string(mean.size()));
  }
  double p1 = 0;
  double p2 = 0;
  for (std::size_t j = 0; j < features.size(); ++j) {
    const double z = (features[j] - mean[j]) / scale[j];
    p1 += axis1[j] * z;
    p2 += axis2[j] * z;
  }
  return {p1, p2};
}

LdaProjection fit_lda(const std::vector<std::vector<double>>& features,
                      const std::vector<int>& labels) {
  const std::size_t n = features.size();
  if (n == 0) throw InputError("no feature rows");
  if (labels.size() != n) {
    throw InputError("label count " + std::to_string(labels.size()) +
                     " does not match row count " + std::to_string(n));
  }
  const std::size_t F = features[0].size();
  if (F == 0) throw InputError("feature rows are empty");
  for (const auto& row : features) {
    if (row.size() != F) throw InputError("feature rows have inconsistent lengths");
  }

  std::map<int, std::size_t> class_index;
  for (const int l : labels) class_index.emplace(l, class_index.size());
  const std::size_t K = class_index.size();
  if (K < 2) throw InputError("need at least 2 classes, got " + std::to_string(K));
  std::vector<std::size_t> class_count(K, 0);
  std::vector<std::size_t> row_class(n);
  for (std::size_t i = 0; i < n; ++i) {
    row_class[i] = class_index.at(labels[i]);
    ++class_count[row_class[i]];
  }
  for (const auto& [label, k] : class_index) {
    if (class_count[k] < 2) {
      throw InputError("class " + std::to_string(label) + " has " +
                       std::to_string(class_count[k]) + " rows, need at least 2");
    }
  }

  LdaProjection proj;
  proj.mean.assign(F, 0.0);
  proj.scale.assign(F, 1.0);
  proj.axis1.assign(F, 0.0);
  proj.axis2.assign(F, 0.0);

  for (std::size_t j = 0; j < F; ++j) {
    double m = 0;
    for (std::size_t i = 0; i < n; ++i) m += features[i][j];
    proj.mean[j] = m / static_cast<double>(n);
  }
  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < F; ++j) {
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = features[i][j] - proj.mean[j];
      ss += d * d;
    }
    const double var = ss / static_cast<double>(n - 1);
    if (var > 0) {
      proj.scale[j] = std::sqrt(var);
      kept.push_back(j);
    }
  }
  if (kept.empty()) throw DegenerateError("all features have zero variance");
  const std::size_t Fk = kept.size();

  Eigen::MatrixXd Z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(Fk));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < Fk; ++c) {
      const std::size_t j = kept[c];
      Z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          (features[i][j] - proj.mean[j]) / proj.scale[j];
    }
  }

  const Eigen::RowVectorXd grand = Z.colwise().mean();
  Eigen::MatrixXd class_means(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(Fk));
  class_means.setZero();
  for (std::size_t i = 0; i < n; ++i) {
    class_means.row(static_cast<Eigen::Index>(row_class[i])) +=
        Z.row(static_cast<Eigen::Index>(i));
  }
  for (std::size_t k = 0; k < K; ++k) {
    class_means.row(static_cast<Eigen::Index>(k)) /= static_cast<double>(class_count[k]);
  }

  Eigen::MatrixXd centered = Z;
  for (std::size_t i = 0; i < n; ++i) {
    centered.row(static_cast<Eigen::Index>(i)) -=
        class_means.row(static_cast<Eigen::Index>(row_class[i]));
  }
  const Eigen::MatrixXd within = centered.transpose() * centered;

  Eigen::MatrixXd between(static_cast<Eigen::Index>(Fk), static_cast<Eigen::Index>(Fk));
  between.setZero();
  for (std::size_t k = 0; k < K; ++k) {
    const Eigen::RowVectorXd d = class_means.row(static_cast<Eigen::Index>(k)) - grand;
    between += static_cast<double>(class_count[k]) * d.transpose() * d;
  }

  const Eigen::MatrixXd a = between / static_cast<double>(K - 1);
  Eigen::MatrixXd b = within / static_cast<double>(n - K);
  b += kRidge * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(Fk),
                                          static_cast<Eigen::Index>(Fk));

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, b);
  if (solver.info() != Eigen::Success) {
    throw DegenerateError("LDA eigenproblem failed to converge");
  }

  const auto& values = solver.eigenvalues();    // ascending
  const auto& vectors = solver.eigenvectors();  // column per eigenvalue
  const auto top = static_cast<Eigen::Index>(Fk) - 1;
  proj.eigenvalues = {values(top), Fk >= 2 ? values(top - 1) : 0.0};
  for (std::size_t c = 0; c < Fk; ++c) {
    proj.axis1[kept[c]] = vectors(static_cast<Eigen::Index>(c), top);
    if (Fk >= 2) proj.axis2[kept[c]] = vectors(static_cast<Eigen::Index>(c), top - 1);
  }
  fix_sign(proj.axis1);
  fix_sign(proj.axis2);
  return proj;
}

std::string lda_to_json(const LdaProjection& projection) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["mean"] = projection.mean;
  j["scale"] = projection.scale;
  j["axis1"] = projection.axis1;
  j["axis2"] = projection.axis2;
  j["eigenvalues"] = projection.eigenvalues;
  return j.dump(2) + "\n";
}

LdaProjection lda_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("invalid LDA JSON: ") + e.what());
  }
  LdaProjection proj;
  try {
    if (j.at("schema_version").get<int>() != 1) {
      throw InputError("unsupported LDA schema version");
    }
    j.at("mean").get_to(proj.mean);
    j.at("scale").get_to(proj.scale);
    j.at("axis1").get_to(proj.axis1);
    j.at("axis2").get_to(proj.axis2);
    j.at("eigenvalues").get_to(proj.eigenvalues);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid LDA JSON: ") + e.what());
  }
  if (proj.scale.size() != proj.mean.size() || proj.axis1.size() != proj.mean.size() ||
      proj.axis2.size() != proj.mean.size()) {
    throw InputError("invalid LDA JSON: vector lengths differ");
  }
  return proj;
}

}  // namespace freqbias
