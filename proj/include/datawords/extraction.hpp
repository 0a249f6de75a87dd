#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "datawords/records.hpp"

namespace datawords {

// ---------------------------------------------------------------------------
// Built-in pattern / lexicon extractor

/// A regular expression whose first capture group is the numeric value.
struct NumericPattern {
  std::string variable;
  std::string pattern;
  std::string unit;
  friend bool operator==(const NumericPattern&, const NumericPattern&) = default;
};

struct LexiconEntry {
  std::string phrase;
  std::string name;
  std::string value;
  RecordKind kind = RecordKind::condition;
  friend bool operator==(const LexiconEntry&, const LexiconEntry&) = default;
};

/// `aliases` maps a surface form ("Temperature") to a variable name ("Temp");
/// each alias matches "<alias> [=:] <number>" case-insensitively.
struct PatternConfig {
  std::map<std::string, std::string> aliases;
  std::vector<NumericPattern> numeric_patterns;
  std::vector<LexiconEntry> lexicon;

  friend bool operator==(const PatternConfig&, const PatternConfig&) = default;
};

PatternConfig parse_pattern_config(std::string_view json_text);
PatternConfig load_pattern_config(const std::filesystem::path& path);
std::string pattern_config_to_json(const PatternConfig& config);

/// Compiled form of a PatternConfig. Immutable after construction.
class PatternExtractor {
 public:
  /// Throws ConfigError on invalid regular expressions or missing fields.
  explicit PatternExtractor(PatternConfig config);
  ~PatternExtractor();
  PatternExtractor(const PatternExtractor&);
  PatternExtractor& operator=(const PatternExtractor&);
  PatternExtractor(PatternExtractor&&) noexcept;
  PatternExtractor& operator=(PatternExtractor&&) noexcept;

  /// Non-overlapping, leftmost-longest matches in text order.
  std::vector<StructuredRecord> extract(std::string_view text,
                                        std::optional<std::size_t> doc_index = std::nullopt) const;

  const PatternConfig& config() const noexcept { return config_; }

 private:
  struct Compiled;
  PatternConfig config_;
  std::shared_ptr<const Compiled> compiled_;
};

std::vector<StructuredRecord> extract_patterns(std::string_view text, const PatternConfig& config);

// ---------------------------------------------------------------------------
// Record files (external extractor output and database dumps share one format)

std::vector<StructuredRecord> parse_records(std::istream& in, Provenance provenance);
std::vector<StructuredRecord> load_external_extractions(const std::filesystem::path& path);
std::vector<StructuredRecord> load_db_measurements(const std::filesystem::path& path);
void write_records(std::ostream& out, std::span<const StructuredRecord> records);

// ---------------------------------------------------------------------------
// Measurement selection

struct MeasurementFilter {
  enum class Mode { all, count_range, top_n, top_n_excluding_top_m };

  Mode mode = Mode::all;
  std::size_t min_count = 0;
  std::size_t max_count = 0;
  std::size_t n = 0;
  std::size_t m = 0;

  static MeasurementFilter all() { return {}; }
  static MeasurementFilter count_range(std::size_t min, std::size_t max);
  static MeasurementFilter top_n(std::size_t n);
  static MeasurementFilter top_n_excluding_top_m(std::size_t n, std::size_t m);

  /// Throws ConfigError when n < 1 or min > max.
  void validate() const;

  friend bool operator==(const MeasurementFilter&, const MeasurementFilter&) = default;
};

/// Occurrence counts per variable name.
std::map<std::string, std::size_t> count_variables(std::span<const StructuredRecord> records);

/// Variable names passing `filter` given occurrence counts.
std::set<std::string> selected_variables(const std::map<std::string, std::size_t>& counts,
                                         const MeasurementFilter& filter);

/// Order-preserving subset of records whose names are in `names`.
std::vector<StructuredRecord> keep_variables(std::span<const StructuredRecord> records,
                                             const std::set<std::string>& names);

/// Filter with counts taken from `records` themselves.
std::vector<StructuredRecord> select_measurements(std::span<const StructuredRecord> records,
                                                  const MeasurementFilter& filter);

// ---------------------------------------------------------------------------
// Roll-up of repeated numeric readings

enum class Aggregate { mean, median, min, max, first, last, count };

std::string_view to_string(Aggregate aggregate);
Aggregate parse_aggregate(std::string_view name);

struct RollupPolicy {
  std::vector<Aggregate> aggregates{Aggregate::mean, Aggregate::min, Aggregate::max};

  void validate() const;
  friend bool operator==(const RollupPolicy&, const RollupPolicy&) = default;
};

/// One record per (encounter, numeric variable, aggregate), named "<name>_<aggregate>",
/// emitted where the group's first reading was. Categorical records pass through.
std::vector<StructuredRecord> rollup(std::span<const StructuredRecord> records,
                                     const RollupPolicy& policy);

}  // namespace datawords
