#include "datawords/explain.hpp"

#include <algorithm>

#include "datawords/errors.hpp"

namespace datawords {

std::string_view to_string(SentenceFilter filter) {
  switch (filter) {
    case SentenceFilter::all: return "all";
    case SentenceFilter::text_only: return "text_only";
    case SentenceFilter::datawords_only: return "datawords_only";
  }
  return "all";
}

SentenceFilter parse_sentence_filter(std::string_view name) {
  for (auto f : {SentenceFilter::all, SentenceFilter::text_only, SentenceFilter::datawords_only})
    if (to_string(f) == name) return f;
  throw ConfigError("unknown sentence filter '" + std::string(name) + "'");
}

namespace {

const LabelModel& require_label(const ModelBundle& bundle, std::string_view label) {
  const LabelModel* model = bundle.find(label);
  if (!model) throw LookupError("no model for label '" + std::string(label) + "'");
  return *model;
}

}  // namespace

std::vector<ScoredSentence> score_sentences(const ModelBundle& bundle, std::string_view label,
                                            const AugmentedDocument& document) {
  const LabelModel& model = require_label(bundle, label);
  std::vector<ScoredSentence> out;
  out.reserve(document.sentences.size());
  for (std::size_t i = 0; i < document.sentences.size(); ++i) {
    const Sentence& s = document.sentences[i];
    ScoredSentence scored{s, model.weights.dot(vectorize_sentence(bundle.tfidf, s)), s.text};
    if (i < document.dataword_of.size() && document.dataword_of[i])
      scored.rendering = render_natural(document.datawords.at(*document.dataword_of[i]));
    out.push_back(std::move(scored));
  }
  return out;
}

std::vector<ScoredSentence> score_sentences(const ModelBundle& bundle, std::string_view label,
                                            std::string_view augmented_text, std::size_t doc_index) {
  const LabelModel& model = require_label(bundle, label);
  std::vector<ScoredSentence> out;
  for (auto& s : split_sentences(augmented_text, doc_index)) {
    if (is_dataword_sentence(s.text)) s.kind = SentenceKind::dataword;
    const double score = model.weights.dot(vectorize_sentence(bundle.tfidf, s));
    std::string rendering = s.text;
    out.push_back({std::move(s), score, std::move(rendering)});
  }
  return out;
}

std::vector<Justification> top_justifications(std::vector<ScoredSentence> scored, std::size_t k,
                                              SentenceFilter filter) {
  std::erase_if(scored, [filter](const ScoredSentence& s) {
    if (filter == SentenceFilter::text_only) return s.sentence.kind != SentenceKind::text;
    if (filter == SentenceFilter::datawords_only) return s.sentence.kind != SentenceKind::dataword;
    return false;
  });
  std::sort(scored.begin(), scored.end(), [](const ScoredSentence& a, const ScoredSentence& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.sentence.doc_index != b.sentence.doc_index) return a.sentence.doc_index < b.sentence.doc_index;
    return a.sentence.sent_index < b.sentence.sent_index;
  });
  if (scored.size() > k) scored.resize(k);

  std::vector<Justification> out;
  out.reserve(scored.size());
  for (std::size_t i = 0; i < scored.size(); ++i)
    out.push_back({std::move(scored[i].sentence), scored[i].score, i + 1, std::move(scored[i].rendering)});
  return out;
}

}  // namespace datawords
