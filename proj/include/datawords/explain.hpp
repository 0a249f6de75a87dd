#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "datawords/corpus.hpp"
#include "datawords/model.hpp"
#include "datawords/pipeline.hpp"

namespace datawords {

enum class SentenceFilter { all, text_only, datawords_only };

std::string_view to_string(SentenceFilter filter);
SentenceFilter parse_sentence_filter(std::string_view name);

struct ScoredSentence {
  Sentence sentence;
  double score = 0.0;
  std::string rendering;  // natural rendering for DataWords sentences, raw text otherwise
};

struct Justification {
  Sentence sentence;
  double score = 0.0;
  std::size_t rank = 1;
  std::string rendering;
};

/// w . vectorize_sentence(s) for every sentence; the bias is left out.
/// Throws LookupError for labels without a model.
std::vector<ScoredSentence> score_sentences(const ModelBundle& bundle, std::string_view label,
                                            const AugmentedDocument& document);

/// Same, for plain augmented text. DataWords sentences are recognized by their token shape.
std::vector<ScoredSentence> score_sentences(const ModelBundle& bundle, std::string_view label,
                                            std::string_view augmented_text, std::size_t doc_index = 0);

/// Filter by kind, order by score descending then (doc_index, sent_index), keep k.
std::vector<Justification> top_justifications(std::vector<ScoredSentence> scored, std::size_t k,
                                              SentenceFilter filter = SentenceFilter::all);

}  // namespace datawords
