#include "datawords/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <unordered_set>

#include "datawords/errors.hpp"
#include "internal.hpp"

namespace datawords {

using detail::json;

std::size_t FoldSplit::fold_of(const std::string& encounter_id) const {
  auto it = assignment.find(encounter_id);
  if (it == assignment.end()) throw LookupError("encounter '" + encounter_id + "' has no fold");
  return it->second;
}

std::vector<std::size_t> FoldSplit::fold_sizes() const {
  std::vector<std::size_t> sizes(fold_count, 0);
  for (const auto& [id, fold] : assignment) ++sizes.at(fold);
  return sizes;
}

namespace {

Encounter encounter_from_json(const json& object, std::size_t line) {
  if (!object.is_object()) throw ParseError("expected a JSON object", line);
  Encounter enc;

  auto id = object.find("encounter_id");
  if (id == object.end() || !id->is_string()) throw ParseError("missing string field 'encounter_id'", line);
  enc.encounter_id = id->get<std::string>();
  if (enc.encounter_id.empty()) throw ValidationError("empty encounter_id", line);

  auto docs = object.find("documents");
  if (docs == object.end() || !docs->is_array()) throw ParseError("missing array field 'documents'", line);
  for (const auto& d : *docs) {
    if (!d.is_string()) throw ParseError("documents must be strings", line);
    enc.documents.push_back(d.get<std::string>());
  }
  if (enc.documents.empty()) throw ValidationError("encounter '" + enc.encounter_id + "' has no documents", line);

  if (auto codes = object.find("codes"); codes != object.end() && !codes->is_null()) {
    if (!codes->is_array()) throw ParseError("field 'codes' must be an array", line);
    std::set<std::string> seen;
    for (const auto& c : *codes) {
      if (!c.is_string()) throw ParseError("codes must be strings", line);
      auto code = c.get<std::string>();
      if (!seen.insert(code).second)
        throw ValidationError("duplicate code '" + code + "' in encounter '" + enc.encounter_id + "'", line);
      enc.codes.push_back(std::move(code));
    }
  }

  if (auto structured = object.find("structured"); structured != object.end() && !structured->is_null()) {
    if (!structured->is_array()) throw ParseError("field 'structured' must be an array", line);
    for (const auto& item : *structured) {
      auto record = detail::record_from_json(item, Provenance::database, line);
      record.encounter_id = enc.encounter_id;
      if (record.doc_index && *record.doc_index >= enc.documents.size())
        throw ValidationError("structured record doc_index out of range", line);
      enc.structured.push_back(std::move(record));
    }
  }
  return enc;
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_token_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c >= 0x80;
}

}  // namespace

std::vector<Encounter> parse_corpus(std::istream& in) {
  std::vector<Encounter> out;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (is_blank(line)) continue;
    auto enc = encounter_from_json(detail::parse_json(line, number), number);
    if (!ids.insert(enc.encounter_id).second)
      throw ValidationError("duplicate encounter_id '" + enc.encounter_id + "'", number);
    out.push_back(std::move(enc));
  }
  return out;
}

std::vector<Encounter> load_corpus(const std::filesystem::path& path, CorpusFormat) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open corpus " + path.string());
  return parse_corpus(in);
}

void write_corpus(std::ostream& out, std::span<const Encounter> encounters) {
  for (const auto& enc : encounters) {
    json object = json::object();
    object["encounter_id"] = enc.encounter_id;
    object["documents"] = enc.documents;
    object["codes"] = enc.codes;
    if (!enc.structured.empty()) {
      json records = json::array();
      for (const auto& r : enc.structured) {
        json item = detail::record_to_json(r);
        item.erase("encounter_id");
        records.push_back(std::move(item));
      }
      object["structured"] = std::move(records);
    }
    out << object.dump() << '\n';
  }
}

std::vector<Sentence> split_sentences(std::string_view text, std::size_t doc_index) {
  std::vector<Sentence> out;
  auto emit = [&](std::size_t begin, std::size_t end) {
    while (begin < end && is_space(text[begin])) ++begin;
    while (end > begin && is_space(text[end - 1])) --end;
    if (begin == end) return;
    out.push_back({std::string(text.substr(begin, end - begin)), doc_index, out.size(), SentenceKind::text});
  };

  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      emit(start, i);
      start = i + 1;
    } else if (is_terminator(c)) {
      if (c == '.' && i > 0 && i + 1 < text.size() && is_digit(text[i - 1]) && is_digit(text[i + 1])) continue;
      while (i + 1 < text.size() && is_terminator(text[i + 1])) ++i;
      emit(start, i + 1);
      start = i + 1;
    }
  }
  emit(start, text.size());
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (is_token_char(c)) {
      current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

FoldSplit kfold_split(std::span<const Encounter> encounters, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("fold count must be at least 2");
  if (encounters.size() < k)
    throw ConfigError("cannot split " + std::to_string(encounters.size()) + " encounters into " +
                      std::to_string(k) + " folds");

  struct Keyed {
    std::uint64_t hash;
    const std::string* id;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(encounters.size());
  for (const auto& enc : encounters)
    keyed.push_back({detail::splitmix64(detail::fnv1a(enc.encounter_id) ^ detail::splitmix64(seed)), &enc.encounter_id});
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    return a.hash != b.hash ? a.hash < b.hash : *a.id < *b.id;
  });

  FoldSplit split;
  split.fold_count = k;
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    if (!split.assignment.emplace(*keyed[i].id, i % k).second)
      throw ValidationError("duplicate encounter_id '" + *keyed[i].id + "'");
  }
  return split;
}

}  // namespace datawords
