#include "datawords/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <set>
#include <sstream>

#include "datawords/errors.hpp"
#include "internal.hpp"

namespace datawords {

using detail::json;

double harmonic_mean(double p, double r) {
  const double hi = std::max(p, r), lo = std::min(p, r);
  if (!(hi > 0.0)) return 0.0;
  // lo / (lo + hi) rounds to at most 0.5, so the result never exceeds hi.
  return 2.0 * hi * (lo / (lo + hi));
}

Prf prf(const Counts& c) {
  Prf out;
  out.precision = c.tp + c.fp ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
  out.recall = c.tp + c.fn ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
  out.f1 = harmonic_mean(out.precision, out.recall);
  return out;
}

ConfusionTable confusion_counts(std::span<const LabelSet> predicted, std::span<const LabelSet> gold) {
  if (predicted.size() != gold.size())
    throw InputError("confusion_counts: " + std::to_string(predicted.size()) + " predictions for " +
                     std::to_string(gold.size()) + " documents");
  ConfusionTable table;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const std::set<std::string> p(predicted[i].begin(), predicted[i].end());
    const std::set<std::string> g(gold[i].begin(), gold[i].end());
    for (const auto& label : p) (g.count(label) ? table[label].tp : table[label].fp) += 1;
    for (const auto& label : g)
      if (!p.count(label)) table[label].fn += 1;
  }
  return table;
}

ConfusionTable confusion_counts(std::span<const PredictionSet> predictions, std::span<const LabelSet> gold) {
  std::vector<LabelSet> predicted;
  predicted.reserve(predictions.size());
  for (const auto& p : predictions) predicted.push_back(p.predicted_labels());
  return confusion_counts(predicted, gold);
}

Counts total_counts(const ConfusionTable& table) {
  Counts total;
  for (const auto& [label, c] : table) total += c;
  return total;
}

Prf micro_metrics(const ConfusionTable& table) { return prf(total_counts(table)); }

Prf per_document_metrics(std::span<const LabelSet> predicted, std::span<const LabelSet> gold) {
  if (predicted.size() != gold.size()) throw InputError("per_document_metrics: misaligned lists");
  Prf mean;
  if (gold.empty()) return mean;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto c = total_counts(confusion_counts(std::span(&predicted[i], 1), std::span(&gold[i], 1)));
    const Prf doc = prf(c);
    mean.precision += doc.precision;
    mean.recall += doc.recall;
    mean.f1 += doc.f1;
  }
  const double n = static_cast<double>(gold.size());
  mean.precision /= n;
  mean.recall /= n;
  mean.f1 /= n;
  return mean;
}

namespace {

json config_json(const CvConfig& config) {
  const auto& t = config.train;
  const auto& f = t.features;
  json j = json::object();
  j["folds"] = config.folds;
  j["seed"] = config.seed;
  j["lambda"] = t.lambda;
  j["min_positive"] = t.min_positive;
  j["min_df"] = t.vocabulary.min_df;
  j["hash_bits"] = t.vocabulary.hash_bits ? json(*t.vocabulary.hash_bits) : json(nullptr);
  j["l2_normalize"] = t.l2_normalize;
  j["mode"] = to_string(f.mode);
  j["unit"] = to_string(f.unit);
  j["patterns"] = f.patterns ? json::parse(pattern_config_to_json(*f.patterns)) : json(nullptr);
  j["filter"] = {{"mode", static_cast<int>(f.filter.mode)}, {"min", f.filter.min_count},
                 {"max", f.filter.max_count}, {"n", f.filter.n}, {"m", f.filter.m}};
  if (f.rollup) {
    json a = json::array();
    for (auto x : f.rollup->aggregates) a.push_back(to_string(x));
    j["rollup"] = std::move(a);
  }
  j["thresholds"] = json::parse(threshold_spec_to_json(f.thresholds));
  return j;
}

json prf_json(const Prf& p) { return {{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}}; }
json counts_json(const Counts& c) { return {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}}; }

}  // namespace

std::string config_digest(const CvConfig& config) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx",
                static_cast<unsigned long long>(detail::fnv1a(config_json(config).dump())));
  return buffer;
}

CvRun run_cv_detailed(std::span<const Encounter> encounters, const CvConfig& config) {
  using Clock = std::chrono::steady_clock;
  CvRun run;
  run.split = kfold_split(encounters, config.folds, config.seed);
  const std::size_t k = config.folds;

  run.models.resize(k);
  run.test_documents.resize(k);
  run.predictions.resize(k);
  std::vector<FoldReport> folds(k);

  const std::size_t threads = std::max<std::size_t>(1, config.threads);
  TrainConfig train_config = config.train;
  train_config.threads = std::max<std::size_t>(1, threads / std::min(threads, k));

  detail::parallel_for(k, threads, [&](std::size_t f) {
    const auto start = Clock::now();
    std::vector<Encounter> train, test;
    for (const auto& enc : encounters) (run.split.fold_of(enc.encounter_id) == f ? test : train).push_back(enc);

    run.models[f] = train_all(train, train_config);
    const Predictor predictor(run.models[f]);
    for (const auto& enc : test) {
      for (auto& doc : predictor.augment(enc)) {
        run.predictions[f].push_back(predict_document(run.models[f], doc));
        run.test_documents[f].push_back(std::move(doc));
      }
    }

    FoldReport& fold = folds[f];
    fold.fold = f;
    fold.train_encounters = train.size();
    fold.test_encounters = test.size();
    fold.test_documents = run.test_documents[f].size();
    fold.label_models = run.models[f].labels.size();
    fold.vocabulary_size = run.models[f].tfidf.vocabulary.size();
    std::vector<LabelSet> gold;
    for (const auto& d : run.test_documents[f]) gold.push_back(d.codes);
    fold.totals = total_counts(confusion_counts(run.predictions[f], gold));
    fold.micro = prf(fold.totals);
    if (config.record_timing) fold.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  });

  MetricsReport& report = run.report;
  report.mode = config.train.features.mode;
  report.fold_count = k;
  report.seed = config.seed;
  report.config_digest = config_digest(config);
  report.folds = std::move(folds);

  std::vector<LabelSet> predicted, gold;
  for (std::size_t f = 0; f < k; ++f) {
    for (std::size_t i = 0; i < run.test_documents[f].size(); ++i) {
      predicted.push_back(run.predictions[f][i].predicted_labels());
      gold.push_back(run.test_documents[f][i].codes);
    }
  }
  const ConfusionTable table = confusion_counts(predicted, gold);
  report.documents = gold.size();
  report.totals = total_counts(table);
  report.micro = prf(report.totals);
  report.per_document = per_document_metrics(predicted, gold);
  for (const auto& [label, counts] : table) report.labels.push_back({label, counts, prf(counts)});
  return run;
}

MetricsReport run_cv(std::span<const Encounter> encounters, const CvConfig& config) {
  return run_cv_detailed(encounters, config).report;
}

std::string report_to_json(const MetricsReport& report) {
  json root = json::object();
  root["ablation_mode"] = to_string(report.mode);
  root["fold_count"] = report.fold_count;
  root["seed"] = report.seed;
  root["config_digest"] = report.config_digest;
  root["documents"] = report.documents;
  root["totals"] = counts_json(report.totals);
  root["micro"] = prf_json(report.micro);
  root["per_document"] = prf_json(report.per_document);
  json labels = json::array();
  for (const auto& row : report.labels) {
    json item = counts_json(row.counts);
    item["label"] = row.label;
    item.update(prf_json(row.metrics));
    labels.push_back(std::move(item));
  }
  root["labels"] = std::move(labels);
  json folds = json::array();
  for (const auto& f : report.folds) {
    json item = {{"fold", f.fold},
                 {"train_encounters", f.train_encounters},
                 {"test_encounters", f.test_encounters},
                 {"test_documents", f.test_documents},
                 {"label_models", f.label_models},
                 {"vocabulary_size", f.vocabulary_size},
                 {"totals", counts_json(f.totals)},
                 {"micro", prf_json(f.micro)}};
    if (f.seconds) item["seconds"] = *f.seconds;
    folds.push_back(std::move(item));
  }
  root["folds"] = std::move(folds);
  return root.dump(2) + "\n";
}

std::string report_to_csv(const MetricsReport& report) {
  std::ostringstream out;
  out << "label,tp,fp,fn,precision,recall,f1\n";
  for (const auto& row : report.labels) {
    std::string label = row.label;
    if (label.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char c : label) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
      label = quoted + "\"";
    }
    out << label << ',' << row.counts.tp << ',' << row.counts.fp << ',' << row.counts.fn << ','
        << format_number(row.metrics.precision) << ',' << format_number(row.metrics.recall) << ','
        << format_number(row.metrics.f1) << '\n';
  }
  return out.str();
}

}  // namespace datawords
