#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "datawords/records.hpp"

namespace datawords {

/// One patient encounter: its documents, gold codes and attached structured records.
struct Encounter {
  std::string encounter_id;
  std::vector<std::string> documents;
  std::vector<std::string> codes;
  std::vector<StructuredRecord> structured;
};

enum class SentenceKind { text, dataword };

struct Sentence {
  std::string text;
  std::size_t doc_index = 0;
  std::size_t sent_index = 0;
  SentenceKind kind = SentenceKind::text;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

/// Encounter-level fold assignment.
struct FoldSplit {
  std::size_t fold_count = 0;
  std::map<std::string, std::size_t> assignment;

  std::size_t fold_of(const std::string& encounter_id) const;
  std::vector<std::size_t> fold_sizes() const;
};

enum class CorpusFormat { jsonl };

std::vector<Encounter> load_corpus(const std::filesystem::path& path,
                                   CorpusFormat format = CorpusFormat::jsonl);
std::vector<Encounter> parse_corpus(std::istream& in);
void write_corpus(std::ostream& out, std::span<const Encounter> encounters);

/// Splits on '.', '!', '?' and newlines. Terminators stay on the sentence they end;
/// a '.' between two digits is a decimal point and does not split. Sentences are
/// trimmed and empty ones dropped.
std::vector<Sentence> split_sentences(std::string_view text, std::size_t doc_index = 0);

/// Lowercased maximal runs of letters, digits and underscores.
std::vector<std::string> tokenize(std::string_view text);

/// Seeded, encounter-level k-fold assignment with fold sizes differing by at most one.
FoldSplit kfold_split(std::span<const Encounter> encounters, std::size_t k, std::uint64_t seed);

}  // namespace datawords
