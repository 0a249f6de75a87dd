#include "datawords/pipeline.hpp"

#include <unordered_map>

#include "datawords/errors.hpp"
#include "internal.hpp"

namespace datawords {

std::string_view to_string(ClassificationUnit unit) {
  return unit == ClassificationUnit::document ? "document" : "encounter";
}

ClassificationUnit parse_classification_unit(std::string_view name) {
  if (name == "document") return ClassificationUnit::document;
  if (name == "encounter") return ClassificationUnit::encounter;
  throw ConfigError("unknown classification unit '" + std::string(name) + "'");
}

Featurizer::Featurizer(FrozenFeatures state) : state_(std::move(state)) {
  state_.config.filter.validate();
  if (state_.config.rollup) state_.config.rollup->validate();
  state_.config.thresholds.validate();
  if (state_.config.patterns) extractor_.emplace(*state_.config.patterns);
}

Featurizer Featurizer::fit(std::span<const Encounter> training, FeatureConfig config) {
  Featurizer probe(FrozenFeatures{std::move(config), std::nullopt, {}});

  std::vector<StructuredRecord> raw;
  for (const auto& enc : training) {
    auto r = probe.raw_records(enc);
    raw.insert(raw.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
  }

  FrozenFeatures state = std::move(probe.state_);
  if (state.config.filter.mode != MeasurementFilter::Mode::all) {
    state.selected_variables = selected_variables(count_variables(raw), state.config.filter);
    raw = keep_variables(raw, *state.selected_variables);
  }
  if (state.config.rollup) raw = rollup(raw, *state.config.rollup);
  state.stats = compute_stats(raw);
  return Featurizer(std::move(state));
}

std::vector<StructuredRecord> Featurizer::raw_records(const Encounter& encounter) const {
  std::vector<StructuredRecord> records = encounter.structured;
  for (auto& r : records) r.encounter_id = encounter.encounter_id;
  if (extractor_) {
    for (std::size_t d = 0; d < encounter.documents.size(); ++d) {
      for (auto& r : extractor_->extract(encounter.documents[d], d)) {
        r.encounter_id = encounter.encounter_id;
        records.push_back(std::move(r));
      }
    }
  }
  return records;
}

std::vector<StructuredRecord> Featurizer::records(const Encounter& encounter) const {
  auto records = raw_records(encounter);
  if (state_.selected_variables) records = keep_variables(records, *state_.selected_variables);
  if (state_.config.rollup) records = rollup(records, *state_.config.rollup);
  return records;
}

namespace {

std::vector<DataWordSentence> encode_all(std::span<const StructuredRecord> records, const FrozenFeatures& state) {
  std::vector<DataWordSentence> out;
  for (const auto& r : records) {
    try {
      auto s = encode_record(r, state.config.thresholds, state.stats);
      if (keeps_dataword(s, state.config.mode)) out.push_back(std::move(s));
    } catch (const InputError& e) {
      detail::warn_once(std::string("skipping record: ") + e.what());
    }
  }
  return out;
}

AugmentedDocument assemble(const Encounter& encounter, std::size_t doc_index, const std::string& text,
                           std::vector<DataWordSentence> datawords, AblationMode mode) {
  AugmentedDocument doc;
  doc.encounter_id = encounter.encounter_id;
  doc.doc_index = doc_index;
  doc.codes = encounter.codes;
  doc.text = augment_document(text, datawords, mode);
  if (keeps_text(mode)) doc.sentences = split_sentences(text, doc_index);
  doc.dataword_of.assign(doc.sentences.size(), std::nullopt);
  for (std::size_t i = 0; i < datawords.size(); ++i) {
    doc.sentences.push_back({datawords[i].text(), doc_index, doc.sentences.size(), SentenceKind::dataword});
    doc.dataword_of.push_back(i);
  }
  doc.datawords = std::move(datawords);
  return doc;
}

}  // namespace

std::vector<AugmentedDocument> Featurizer::augment(const Encounter& encounter) const {
  const auto recs = records(encounter);
  const AblationMode mode = state_.config.mode;
  std::vector<AugmentedDocument> out;

  if (state_.config.unit == ClassificationUnit::encounter) {
    std::string joined;
    for (std::size_t d = 0; d < encounter.documents.size(); ++d) {
      if (d) joined += '\n';
      joined += encounter.documents[d];
    }
    out.push_back(assemble(encounter, 0, joined, encode_all(recs, state_), mode));
    return out;
  }

  for (std::size_t d = 0; d < encounter.documents.size(); ++d) {
    std::vector<StructuredRecord> mine;
    for (const auto& r : recs)
      if (!r.doc_index || *r.doc_index == d) mine.push_back(r);
    out.push_back(assemble(encounter, d, encounter.documents[d], encode_all(mine, state_), mode));
  }
  return out;
}

void attach_records(std::span<Encounter> encounters, std::span<const StructuredRecord> records) {
  std::unordered_map<std::string, Encounter*> by_id;
  for (auto& enc : encounters) by_id.emplace(enc.encounter_id, &enc);
  std::size_t dropped = 0;
  for (const auto& r : records) {
    auto it = by_id.find(r.encounter_id);
    if (it == by_id.end()) {
      ++dropped;
      continue;
    }
    Encounter& enc = *it->second;
    if (r.doc_index && *r.doc_index >= enc.documents.size())
      throw ValidationError("record '" + r.name + "' for '" + r.encounter_id + "' names a missing document");
    if (r.span) {
      if (!r.doc_index)
        throw ValidationError("record '" + r.name + "' for '" + r.encounter_id + "' has a span but no doc_index");
      if (r.span->end > enc.documents[*r.doc_index].size())
        throw ValidationError("record '" + r.name + "' for '" + r.encounter_id + "' has a span outside its document");
    }
    enc.structured.push_back(r);
  }
  if (dropped)
    detail::warn_once(std::to_string(dropped) + " structured records refer to encounters outside the corpus");
}

}  // namespace datawords
