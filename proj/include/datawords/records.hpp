#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace datawords {

enum class RecordKind { measurement, condition, medication, test_result, other };
enum class Provenance { text_extraction, external_extractor, database };

std::string_view to_string(RecordKind kind);
std::string_view to_string(Provenance provenance);
/// Unknown kind names map to RecordKind::other.
RecordKind parse_record_kind(std::string_view name);

/// Half-open byte range [begin, end) into one document.
struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

/// A numeric reading or a categorical value.
using RecordValue = std::variant<double, std::string>;

/// One named structured value with its provenance.
struct StructuredRecord {
  std::string encounter_id;
  std::string name;
  RecordValue value = 0.0;
  std::string unit;
  RecordKind kind = RecordKind::other;
  Provenance provenance = Provenance::database;
  std::optional<std::size_t> doc_index;
  std::optional<CharSpan> span;

  bool is_numeric() const noexcept { return std::holds_alternative<double>(value); }
  double numeric() const { return std::get<double>(value); }
  const std::string& categorical() const { return std::get<std::string>(value); }

  friend bool operator==(const StructuredRecord&, const StructuredRecord&) = default;
};

/// Throws ValidationError when the name is empty or a numeric value is not finite.
void validate_record(const StructuredRecord& record);

}  // namespace datawords
