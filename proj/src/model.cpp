#include "datawords/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/SparseCore>

#include "datawords/errors.hpp"
#include "datawords/ridge.hpp"
#include "internal.hpp"

namespace datawords {

namespace {

using RowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

RowMatrix stack_rows(std::span<const SparseVector> rows, Eigen::Index dimension) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != dimension) throw InputError("fit_label: vectors have different dimensions");
    for (SparseVector::InnerIterator it(rows[r]); it; ++it)
      triplets.emplace_back(static_cast<Eigen::Index>(r), it.index(), it.value());
  }
  RowMatrix X(static_cast<Eigen::Index>(rows.size()), dimension);
  X.setFromTriplets(triplets.begin(), triplets.end());
  return X;
}

SparseVector to_sparse(const Eigen::VectorXd& dense) {
  SparseVector out(dense.size());
  for (Eigen::Index i = 0; i < dense.size(); ++i)
    if (dense[i] != 0.0) out.insertBack(i) = dense[i];
  return out;
}

}  // namespace

const LabelModel* ModelBundle::find(std::string_view label) const {
  auto it = std::lower_bound(labels.begin(), labels.end(), label,
                             [](const LabelModel& m, std::string_view l) { return m.label < l; });
  return it != labels.end() && it->label == label ? &*it : nullptr;
}

std::vector<std::string> PredictionSet::predicted_labels() const {
  std::vector<std::string> out;
  for (const auto& s : scores)
    if (s.predicted) out.push_back(s.label);
  std::sort(out.begin(), out.end());
  return out;
}

RidgeFit fit_label(std::span<const SparseVector> X, std::span<const int> y, double lambda, bool fit_intercept) {
  if (X.size() != y.size())
    throw InputError("fit_label: " + std::to_string(X.size()) + " vectors but " + std::to_string(y.size()) + " targets");
  if (X.empty()) throw InputError("fit_label: no samples");
  const RowMatrix design = stack_rows(X, X.front().size());
  Eigen::VectorXd target(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) target[static_cast<Eigen::Index>(i)] = y[i];

  RidgeOptions options;
  options.lambda = lambda;
  options.fit_intercept = fit_intercept;
  auto solution = solve_ridge(design, target, options);
  return {std::move(solution.weights), solution.bias};
}

double fit_threshold(std::span<const double> scores, std::span<const int> y) {
  if (scores.empty()) throw InputError("fit_threshold: no scores");
  if (scores.size() != y.size()) throw InputError("fit_threshold: scores and targets differ in length");

  // Distinct scores ascending with their positive / negative counts.
  std::map<double, std::pair<std::int64_t, std::int64_t>> by_score;
  std::int64_t positives = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw InputError("fit_threshold: non-finite score");
    auto& cell = by_score[scores[i]];
    if (y[i]) {
      ++cell.first;
      ++positives;
    } else {
      ++cell.second;
    }
  }
  if (positives == 0) return kNeverPredict;

  std::vector<double> unique;
  std::vector<std::int64_t> pos, neg;
  for (const auto& [s, c] : by_score) {
    unique.push_back(s);
    pos.push_back(c.first);
    neg.push_back(c.second);
  }
  const std::size_t m = unique.size();

  // Candidate j predicts every score >= unique[j]; candidate m predicts nothing.
  std::vector<std::int64_t> tp(m + 1, 0), fp(m + 1, 0);
  for (std::size_t j = m; j-- > 0;) {
    tp[j] = tp[j + 1] + pos[j];
    fp[j] = fp[j + 1] + neg[j];
  }

  std::size_t best = 0;
  std::int64_t best_num = -1, best_den = 1;
  for (std::size_t j = 0; j <= m; ++j) {
    const std::int64_t num = 2 * tp[j];
    const std::int64_t den = 2 * tp[j] + fp[j] + (positives - tp[j]);
    if (num * best_den > best_num * den) {
      best = j;
      best_num = num;
      best_den = den;
    }
  }

  if (best == 0) return unique.front() - 1.0 < unique.front() ? unique.front() - 1.0 : unique.front();
  if (best == m) {
    const double t = unique.back() + 1.0;
    return t > unique.back() ? t : std::nextafter(unique.back(), kNeverPredict);
  }
  const double lo = unique[best - 1];
  const double hi = unique[best];
  const double mid = lo + (hi - lo) / 2.0;
  return mid > lo ? mid : hi;
}

ModelBundle train_all(std::span<const Encounter> encounters, const TrainConfig& config) {
  if (encounters.empty()) throw ConfigError("no training encounters");
  if (!(config.lambda > 0.0)) throw ConfigError("lambda must be positive");

  Featurizer featurizer = Featurizer::fit(encounters, config.features);

  std::vector<AugmentedDocument> docs;
  for (const auto& enc : encounters) {
    auto d = featurizer.augment(enc);
    docs.insert(docs.end(), std::make_move_iterator(d.begin()), std::make_move_iterator(d.end()));
  }
  std::vector<std::string> texts;
  texts.reserve(docs.size());
  for (const auto& d : docs) texts.push_back(d.text);

  ModelBundle bundle;
  bundle.features = featurizer.state();
  bundle.tfidf = fit_idf(build_vocabulary(texts, config.vocabulary), config.l2_normalize);

  std::vector<SparseVector> vectors;
  vectors.reserve(docs.size());
  for (const auto& t : texts) vectors.push_back(vectorize_document(bundle.tfidf, t));

  std::map<std::string, std::size_t> positives;
  for (const auto& d : docs)
    for (const auto& c : d.codes) ++positives[c];
  std::vector<std::string> labels;
  for (const auto& [label, count] : positives)
    if (count >= std::max<std::size_t>(1, config.min_positive)) labels.push_back(label);
  if (labels.empty()) throw ConfigError("no label has enough positive training documents");

  const RowMatrix X = stack_rows(vectors, bundle.tfidf.dimension());
  RidgeOptions options;
  options.lambda = config.lambda;

  bundle.labels.resize(labels.size());
  detail::parallel_for(labels.size(), config.threads, [&](std::size_t l) {
    const std::string& label = labels[l];
    Eigen::VectorXd target(static_cast<Eigen::Index>(docs.size()));
    std::vector<int> y(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
      const auto& codes = docs[i].codes;
      y[i] = std::find(codes.begin(), codes.end(), label) != codes.end() ? 1 : 0;
      target[static_cast<Eigen::Index>(i)] = y[i];
    }
    const auto solution = solve_ridge(X, target, options);

    LabelModel model;
    model.label = label;
    model.weights = to_sparse(solution.weights);
    model.bias = solution.bias;
    std::vector<double> scores(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) scores[i] = model.score(vectors[i]);
    model.threshold = fit_threshold(scores, y);
    bundle.labels[l] = std::move(model);
  });
  return bundle;
}

PredictionSet predict_document(const ModelBundle& bundle, const AugmentedDocument& document) {
  PredictionSet out;
  out.encounter_id = document.encounter_id;
  out.doc_index = document.doc_index;
  const SparseVector v = vectorize_document(bundle.tfidf, document.text);
  for (const auto& model : bundle.labels) {
    const double s = model.score(v);
    out.scores.push_back({model.label, s, !model.never_predicted() && s >= model.threshold});
  }
  std::stable_sort(out.scores.begin(), out.scores.end(),
                   [](const LabelScore& a, const LabelScore& b) { return a.score > b.score; });
  return out;
}

Predictor::Predictor(const ModelBundle& bundle) : bundle_(&bundle), featurizer_(bundle.features) {}

std::vector<PredictionSet> Predictor::predict(const Encounter& encounter) const {
  std::vector<PredictionSet> out;
  for (const auto& doc : featurizer_.augment(encounter)) out.push_back(predict_document(*bundle_, doc));
  return out;
}

std::vector<PredictionSet> predict(const ModelBundle& bundle, const Encounter& encounter) {
  return Predictor(bundle).predict(encounter);
}

}  // namespace datawords
