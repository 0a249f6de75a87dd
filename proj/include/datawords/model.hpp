#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "datawords/pipeline.hpp"
#include "datawords/tfidf.hpp"

namespace datawords {

/// Threshold of a label that is never predicted.
inline constexpr double kNeverPredict = std::numeric_limits<double>::infinity();

struct LabelModel {
  std::string label;
  SparseVector weights;
  double bias = 0.0;
  double threshold = kNeverPredict;

  double score(const SparseVector& x) const { return weights.dot(x) + bias; }
  bool never_predicted() const { return threshold == kNeverPredict; }
};

inline constexpr std::string_view kBundleFormatVersion = "1";

struct ModelBundle {
  std::string format_version{kBundleFormatVersion};
  FrozenFeatures features;
  TfIdfModel tfidf;
  std::vector<LabelModel> labels;  // sorted by label

  const LabelModel* find(std::string_view label) const;
};

struct LabelScore {
  std::string label;
  double score = 0.0;
  bool predicted = false;
};

struct PredictionSet {
  std::string encounter_id;
  std::size_t doc_index = 0;
  std::vector<LabelScore> scores;  // descending score, ties by label

  std::vector<std::string> predicted_labels() const;
};

struct RidgeFit {
  Eigen::VectorXd weights;
  double bias = 0.0;
};

/// Ridge regression of 0/1 targets on document vectors of equal dimension.
RidgeFit fit_label(std::span<const SparseVector> X, std::span<const int> y, double lambda,
                   bool fit_intercept = true);

/// F1-maximizing cutoff for "predict iff score >= threshold" over the midpoints of
/// adjacent distinct scores plus min-1 and max+1; ties go to the lowest threshold.
/// Returns kNeverPredict when no target is positive. Throws InputError on empty input.
double fit_threshold(std::span<const double> scores, std::span<const int> y);

/// Late fusion baseline: w1 * p1 + w2 * p2.
constexpr double combine_linear(double p1, double p2, double w1, double w2) {
  return w1 * p1 + w2 * p2;
}

struct TrainConfig {
  FeatureConfig features;
  double lambda = 1.0;
  std::size_t min_positive = 1;
  VocabularyOptions vocabulary;
  bool l2_normalize = true;
  std::size_t threads = 1;
};

/// Full training run: features, vocabulary, one ridge model and threshold per label.
/// Throws ConfigError when no label reaches `min_positive`.
ModelBundle train_all(std::span<const Encounter> encounters, const TrainConfig& config);

PredictionSet predict_document(const ModelBundle& bundle, const AugmentedDocument& document);

/// Applies a bundle to new encounters; compiles the bundle's feature state once.
class Predictor {
 public:
  explicit Predictor(const ModelBundle& bundle);

  /// One PredictionSet per classification instance of the encounter.
  std::vector<PredictionSet> predict(const Encounter& encounter) const;
  std::vector<AugmentedDocument> augment(const Encounter& encounter) const { return featurizer_.augment(encounter); }

  const ModelBundle& bundle() const noexcept { return *bundle_; }

 private:
  const ModelBundle* bundle_;
  Featurizer featurizer_;
};

std::vector<PredictionSet> predict(const ModelBundle& bundle, const Encounter& encounter);

std::string serialize_bundle(const ModelBundle& bundle);
ModelBundle parse_bundle(std::string_view text);
void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load_bundle(const std::filesystem::path& path);

}  // namespace datawords
