#include "datawords/tfidf.hpp"

#include <cmath>
#include <map>
#include <unordered_set>

#include "datawords/errors.hpp"
#include "internal.hpp"

namespace datawords {

Vocabulary Vocabulary::indexed(std::vector<std::string> tokens, std::vector<std::size_t> df,
                               std::size_t document_count) {
  if (tokens.size() != df.size()) throw InputError("vocabulary: token and df lists differ in length");
  Vocabulary v;
  v.tokens_ = std::move(tokens);
  v.df_ = std::move(df);
  v.document_count_ = document_count;
  v.index_.reserve(v.tokens_.size());
  for (std::size_t i = 0; i < v.tokens_.size(); ++i)
    if (!v.index_.emplace(v.tokens_[i], i).second) throw InputError("vocabulary: duplicate token " + v.tokens_[i]);
  return v;
}

Vocabulary Vocabulary::hashed(unsigned bits, std::vector<std::size_t> df, std::size_t document_count) {
  if (bits < 1 || bits > 30) throw ConfigError("hash bits must be in [1, 30]");
  if (df.size() != (std::size_t{1} << bits)) throw InputError("vocabulary: df size does not match hash bits");
  Vocabulary v;
  v.hash_bits_ = bits;
  v.df_ = std::move(df);
  v.document_count_ = document_count;
  return v;
}

std::optional<std::size_t> Vocabulary::lookup(std::string_view token) const {
  if (hash_bits_) return hash_bucket(token, *hash_bits_);
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t hash_bucket(std::string_view token, unsigned bits) {
  return static_cast<std::size_t>((detail::fnv1a(token) * 0x9e3779b97f4a7c15ULL) >> (64 - bits));
}

Vocabulary build_vocabulary(std::span<const std::string> train_docs, const VocabularyOptions& options) {
  if (train_docs.empty()) throw ConfigError("cannot build a vocabulary from an empty training set");
  if (options.min_df < 1) throw ConfigError("min_df must be at least 1");

  if (options.hash_bits) {
    const unsigned bits = *options.hash_bits;
    if (bits < 1 || bits > 30) throw ConfigError("hash bits must be in [1, 30]");
    std::vector<std::size_t> df(std::size_t{1} << bits, 0);
    for (const auto& doc : train_docs) {
      std::unordered_set<std::size_t> seen;
      for (const auto& tok : tokenize(doc))
        if (seen.insert(hash_bucket(tok, bits)).second) ++df[hash_bucket(tok, bits)];
    }
    return Vocabulary::hashed(bits, std::move(df), train_docs.size());
  }

  std::vector<std::string> order;
  std::unordered_map<std::string, std::size_t> position;
  std::vector<std::size_t> df;
  for (const auto& doc : train_docs) {
    std::unordered_set<std::string> seen;
    for (auto& tok : tokenize(doc)) {
      if (!seen.insert(tok).second) continue;
      auto [it, inserted] = position.emplace(tok, order.size());
      if (inserted) {
        order.push_back(tok);
        df.push_back(0);
      }
      ++df[it->second];
    }
  }

  std::vector<std::string> tokens;
  std::vector<std::size_t> kept_df;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (df[i] < options.min_df) continue;
    tokens.push_back(std::move(order[i]));
    kept_df.push_back(df[i]);
  }
  return Vocabulary::indexed(std::move(tokens), std::move(kept_df), train_docs.size());
}

TfIdfModel fit_idf(Vocabulary vocabulary, bool l2_normalize) {
  TfIdfModel model;
  const double n = static_cast<double>(vocabulary.document_count());
  model.idf.resize(static_cast<Eigen::Index>(vocabulary.size()));
  for (std::size_t i = 0; i < vocabulary.size(); ++i)
    model.idf[static_cast<Eigen::Index>(i)] = std::log((1.0 + n) / (1.0 + static_cast<double>(vocabulary.df(i)))) + 1.0;
  model.vocabulary = std::move(vocabulary);
  model.l2_normalize = l2_normalize;
  return model;
}

SparseVector vectorize_document(const TfIdfModel& model, std::string_view text) {
  std::map<std::size_t, std::size_t> counts;
  for (const auto& tok : tokenize(text))
    if (auto index = model.vocabulary.lookup(tok)) ++counts[*index];

  SparseVector v(model.dimension());
  v.reserve(static_cast<Eigen::Index>(counts.size()));
  double norm2 = 0.0;
  for (const auto& [index, count] : counts) {
    const auto i = static_cast<Eigen::Index>(index);
    const double w = (1.0 + std::log(static_cast<double>(count))) * model.idf[i];
    if (w == 0.0) continue;
    v.insertBack(i) = w;
    norm2 += w * w;
  }
  if (model.l2_normalize && norm2 > 0.0) v /= std::sqrt(norm2);
  return v;
}

SparseVector vectorize_sentence(const TfIdfModel& model, const Sentence& sentence) {
  return vectorize_document(model, sentence.text);
}

}  // namespace datawords
