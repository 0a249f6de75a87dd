#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "datawords/corpus.hpp"
#include "datawords/encoding.hpp"
#include "datawords/extraction.hpp"

namespace datawords {

/// Whether each document or each whole encounter is one classification instance.
enum class ClassificationUnit { document, encounter };

std::string_view to_string(ClassificationUnit unit);
ClassificationUnit parse_classification_unit(std::string_view name);

/// Everything that turns an encounter into augmented text, before any training.
struct FeatureConfig {
  std::optional<PatternConfig> patterns;
  MeasurementFilter filter;
  std::optional<RollupPolicy> rollup;
  ThresholdSpec thresholds;
  AblationMode mode = AblationMode::text_plus_datawords;
  ClassificationUnit unit = ClassificationUnit::document;
};

/// Training-derived state: the variables surviving the filter and their statistics.
struct FrozenFeatures {
  FeatureConfig config;
  std::optional<std::set<std::string>> selected_variables;  // nullopt keeps all
  StatsMap stats;
};

/// One classification instance after extraction, encoding and augmentation.
struct AugmentedDocument {
  std::string encounter_id;
  std::size_t doc_index = 0;
  std::string text;
  std::vector<Sentence> sentences;
  /// DataWords sentences kept by the ablation mode; sentence i of kind dataword
  /// refers to datawords[dataword_of[i]].
  std::vector<DataWordSentence> datawords;
  std::vector<std::optional<std::size_t>> dataword_of;
  std::vector<std::string> codes;
};

/// Applies frozen feature state to encounters. Training and prediction share this path.
class Featurizer {
 public:
  explicit Featurizer(FrozenFeatures state);

  /// Selects variables and computes statistics on training encounters only.
  static Featurizer fit(std::span<const Encounter> training, FeatureConfig config);

  /// Attached plus extracted records, filtered and rolled up.
  std::vector<StructuredRecord> records(const Encounter& encounter) const;
  std::vector<AugmentedDocument> augment(const Encounter& encounter) const;

  const FrozenFeatures& state() const noexcept { return state_; }

 private:
  std::vector<StructuredRecord> raw_records(const Encounter& encounter) const;

  FrozenFeatures state_;
  std::optional<PatternExtractor> extractor_;
};

/// Attaches records from an external file to encounters by encounter_id (records for
/// unknown encounters are dropped). Throws ValidationError for spans out of bounds.
void attach_records(std::span<Encounter> encounters, std::span<const StructuredRecord> records);

}  // namespace datawords
