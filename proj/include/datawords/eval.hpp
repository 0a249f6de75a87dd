#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "datawords/corpus.hpp"
#include "datawords/model.hpp"

namespace datawords {

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  Counts& operator+=(const Counts& other) {
    tp += other.tp;
    fp += other.fp;
    fn += other.fn;
    return *this;
  }
  friend bool operator==(const Counts&, const Counts&) = default;
};

using ConfusionTable = std::map<std::string, Counts>;
using LabelSet = std::vector<std::string>;

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// 2PR/(P+R) evaluated as 2*hi*(lo/(lo+hi)); never above max(P, R). 0 when both are 0.
double harmonic_mean(double p, double r);

/// P = tp/(tp+fp), R = tp/(tp+fn), F1 = 2PR/(P+R); every 0/0 is 0.
Prf prf(const Counts& counts);

/// Per-label counts over all (document, label) pairs. Throws InputError when misaligned.
ConfusionTable confusion_counts(std::span<const LabelSet> predicted, std::span<const LabelSet> gold);
ConfusionTable confusion_counts(std::span<const PredictionSet> predictions, std::span<const LabelSet> gold);

Counts total_counts(const ConfusionTable& table);
Prf micro_metrics(const ConfusionTable& table);

/// Arithmetic mean over documents of each document's own P, R and F1.
Prf per_document_metrics(std::span<const LabelSet> predicted, std::span<const LabelSet> gold);

struct LabelRow {
  std::string label;
  Counts counts;
  Prf metrics;
};

struct FoldReport {
  std::size_t fold = 0;
  std::size_t train_encounters = 0;
  std::size_t test_encounters = 0;
  std::size_t test_documents = 0;
  std::size_t label_models = 0;
  std::size_t vocabulary_size = 0;
  Counts totals;
  Prf micro;
  std::optional<double> seconds;
};

struct MetricsReport {
  AblationMode mode = AblationMode::text_plus_datawords;
  std::size_t fold_count = 0;
  std::uint64_t seed = 0;
  std::string config_digest;
  std::size_t documents = 0;
  Counts totals;
  Prf micro;
  Prf per_document;
  std::vector<LabelRow> labels;
  std::vector<FoldReport> folds;
};

struct CvConfig {
  TrainConfig train;
  std::size_t folds = 4;
  std::uint64_t seed = 42;
  std::size_t threads = 1;
  bool record_timing = false;
};

/// Everything a cross-validation run produced, fold by fold.
struct CvRun {
  MetricsReport report;
  FoldSplit split;
  std::vector<ModelBundle> models;
  std::vector<std::vector<AugmentedDocument>> test_documents;
  std::vector<std::vector<PredictionSet>> predictions;
};

/// Digest of every setting that influences report content (threads excluded).
std::string config_digest(const CvConfig& config);

/// Seeded k-fold cross-validation; all training-derived state comes from the training folds.
MetricsReport run_cv(std::span<const Encounter> encounters, const CvConfig& config);
CvRun run_cv_detailed(std::span<const Encounter> encounters, const CvConfig& config);

std::string report_to_json(const MetricsReport& report);
/// One row per label: label,tp,fp,fn,precision,recall,f1
std::string report_to_csv(const MetricsReport& report);

}  // namespace datawords
