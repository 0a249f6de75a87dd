#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "datawords/corpus.hpp"

namespace datawords {

using SparseVector = Eigen::SparseVector<double>;

struct VocabularyOptions {
  std::size_t min_df = 1;
  /// When set, tokens are hashed into 2^hash_bits buckets instead of indexed.
  std::optional<unsigned> hash_bits;
};

/// Token index, document frequencies and training document count.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Indexed vocabulary from tokens in index order with their document frequencies.
  static Vocabulary indexed(std::vector<std::string> tokens, std::vector<std::size_t> df,
                            std::size_t document_count);
  static Vocabulary hashed(unsigned bits, std::vector<std::size_t> df, std::size_t document_count);

  std::optional<std::size_t> lookup(std::string_view token) const;
  std::size_t size() const noexcept { return df_.size(); }
  std::size_t document_count() const noexcept { return document_count_; }
  std::size_t df(std::size_t index) const { return df_.at(index); }
  const std::vector<std::size_t>& document_frequencies() const noexcept { return df_; }

  bool is_hashed() const noexcept { return hash_bits_.has_value(); }
  std::optional<unsigned> hash_bits() const noexcept { return hash_bits_; }
  /// Tokens in index order; empty in hashed mode.
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_ && a.df_ == b.df_ && a.document_count_ == b.document_count_ &&
           a.hash_bits_ == b.hash_bits_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::size_t> df_;
  std::size_t document_count_ = 0;
  std::optional<unsigned> hash_bits_;
};

/// Bucket of `token` in a 2^bits hashed space.
std::size_t hash_bucket(std::string_view token, unsigned bits);

/// Indices in first-seen order. Throws ConfigError for an empty training set.
Vocabulary build_vocabulary(std::span<const std::string> train_docs, const VocabularyOptions& options = {});

struct TfIdfModel {
  Vocabulary vocabulary;
  Eigen::VectorXd idf;
  bool l2_normalize = true;

  Eigen::Index dimension() const { return idf.size(); }
};

/// idf(t) = ln((1 + N) / (1 + df(t))) + 1
TfIdfModel fit_idf(Vocabulary vocabulary, bool l2_normalize = true);

/// tf = 1 + ln(count); weight = tf * idf; L2-normalized when enabled. OOV tokens are ignored.
SparseVector vectorize_document(const TfIdfModel& model, std::string_view text);
SparseVector vectorize_sentence(const TfIdfModel& model, const Sentence& sentence);

}  // namespace datawords
