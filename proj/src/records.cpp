#include "datawords/records.hpp"

#include <cmath>

#include "datawords/errors.hpp"
#include "internal.hpp"

namespace datawords {

std::string_view to_string(RecordKind kind) {
  switch (kind) {
    case RecordKind::measurement: return "measurement";
    case RecordKind::condition: return "condition";
    case RecordKind::medication: return "medication";
    case RecordKind::test_result: return "test_result";
    case RecordKind::other: return "other";
  }
  return "other";
}

std::string_view to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::text_extraction: return "text_extraction";
    case Provenance::external_extractor: return "external_extractor";
    case Provenance::database: return "database";
  }
  return "database";
}

RecordKind parse_record_kind(std::string_view name) {
  if (name == "measurement") return RecordKind::measurement;
  if (name == "condition") return RecordKind::condition;
  if (name == "medication") return RecordKind::medication;
  if (name == "test_result") return RecordKind::test_result;
  return RecordKind::other;
}

void validate_record(const StructuredRecord& record) {
  if (record.name.empty()) throw ValidationError("structured record has an empty name");
  if (record.is_numeric() && !std::isfinite(record.numeric()))
    throw ValidationError("record '" + record.name + "' has a non-finite value");
  if (record.span && record.span->begin > record.span->end)
    throw ValidationError("record '" + record.name + "' has an inverted span");
}

namespace detail {

json record_to_json(const StructuredRecord& record) {
  json out = json::object();
  if (!record.encounter_id.empty()) out["encounter_id"] = record.encounter_id;
  if (record.doc_index) out["doc_index"] = *record.doc_index;
  out["name"] = record.name;
  if (record.is_numeric())
    out["value"] = record.numeric();
  else
    out["value"] = record.categorical();
  out["kind"] = std::string(to_string(record.kind));
  if (!record.unit.empty()) out["unit"] = record.unit;
  if (record.span) out["span"] = json::array({record.span->begin, record.span->end});
  return out;
}

StructuredRecord record_from_json(const json& object, Provenance provenance, std::size_t line) {
  if (!object.is_object()) throw ParseError("expected a JSON object", line);
  StructuredRecord record;
  record.provenance = provenance;

  auto name = object.find("name");
  if (name == object.end() || !name->is_string()) throw ParseError("missing string field 'name'", line);
  record.name = name->get<std::string>();

  auto value = object.find("value");
  if (value == object.end()) throw ParseError("missing field 'value'", line);
  if (value->is_number())
    record.value = value->get<double>();
  else if (value->is_string())
    record.value = value->get<std::string>();
  else
    throw ParseError("field 'value' must be a number or a string", line);

  if (auto id = object.find("encounter_id"); id != object.end()) {
    if (!id->is_string()) throw ParseError("field 'encounter_id' must be a string", line);
    record.encounter_id = id->get<std::string>();
  }
  if (auto kind = object.find("kind"); kind != object.end() && !kind->is_null()) {
    if (!kind->is_string()) throw ParseError("field 'kind' must be a string", line);
    record.kind = parse_record_kind(kind->get<std::string>());
  } else {
    record.kind = record.is_numeric() ? RecordKind::measurement : RecordKind::other;
  }
  if (auto unit = object.find("unit"); unit != object.end() && !unit->is_null()) {
    if (!unit->is_string()) throw ParseError("field 'unit' must be a string", line);
    record.unit = unit->get<std::string>();
  }
  if (auto doc = object.find("doc_index"); doc != object.end() && !doc->is_null()) {
    if (!doc->is_number_unsigned()) throw ParseError("field 'doc_index' must be a non-negative integer", line);
    record.doc_index = doc->get<std::size_t>();
  }
  if (auto span = object.find("span"); span != object.end() && !span->is_null()) {
    if (!span->is_array() || span->size() != 2 || !(*span)[0].is_number_unsigned() ||
        !(*span)[1].is_number_unsigned())
      throw ParseError("field 'span' must be [start, end]", line);
    record.span = CharSpan{(*span)[0].get<std::size_t>(), (*span)[1].get<std::size_t>()};
  }

  try {
    validate_record(record);
  } catch (const ValidationError& e) {
    throw ValidationError(e.what(), line);
  }
  return record;
}

}  // namespace detail
}  // namespace datawords
