#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "datawords/records.hpp"

namespace datawords {

struct VariableStats {
  std::string name;
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation

  friend bool operator==(const VariableStats&, const VariableStats&) = default;
};

using StatsMap = std::map<std::string, VariableStats>;

/// Mean and population standard deviation of every numeric variable in `records`.
StatsMap compute_stats(std::span<const StructuredRecord> records);

enum class Bin { very_low, low, mid, high, very_high };

std::string_view to_string(Bin bin);

/// Four boundaries c1 <= c2 <= c3 <= c4 separating the five bins.
struct Cuts {
  std::array<double, 4> bounds{};
  friend bool operator==(const Cuts&, const Cuts&) = default;
};

/// very_low if v < c1, low if v < c2, mid if v < c3, high if v < c4, else very_high.
/// Throws InputError for non-finite values.
Bin bin_value(double value, const Cuts& cuts);

/// Multipliers of the standard deviation around the mean.
struct AutoCuts {
  double k_low = 1.7;
  double k_mid = 1.0;
  friend bool operator==(const AutoCuts&, const AutoCuts&) = default;
};

/// (mean - k_low*std, mean - k_mid*std, mean + k_mid*std, mean + k_low*std)
Cuts auto_cuts(const VariableStats& stats, const AutoCuts& multipliers = {});

/// A variable's rule: explicit cuts, its own auto multipliers, or (monostate) the default.
struct ThresholdEntry {
  std::variant<std::monostate, Cuts, AutoCuts> rule;
  std::string display;  // empty: derived from the variable name
  friend bool operator==(const ThresholdEntry&, const ThresholdEntry&) = default;
};

/// Per-variable binning rules plus a default auto rule for unlisted variables.
class ThresholdSpec {
 public:
  ThresholdSpec() = default;

  void set(const std::string& name, ThresholdEntry entry);
  void set_default(AutoCuts multipliers);
  void set_display(const std::string& name, std::string display);

  const std::map<std::string, ThresholdEntry>& entries() const noexcept { return entries_; }
  const AutoCuts& default_rule() const noexcept { return default_; }

  /// Explicit cuts, or auto cuts from `stats`; nullopt when neither is available.
  std::optional<Cuts> resolve(const std::string& name, const StatsMap& stats) const;

  /// Configured display name, else the name with underscores turned into spaces.
  std::string display_name(const std::string& name) const;

  /// Throws ConfigError on non-increasing explicit cuts or bad multipliers.
  void validate() const;

  friend bool operator==(const ThresholdSpec&, const ThresholdSpec&) = default;

 private:
  std::map<std::string, ThresholdEntry> entries_;
  AutoCuts default_{};
};

ThresholdSpec parse_threshold_spec(std::string_view json_text);
ThresholdSpec load_threshold_spec(const std::filesystem::path& path);
std::string threshold_spec_to_json(const ThresholdSpec& spec);

/// The text encoding of one structured record.
struct DataWordSentence {
  std::vector<std::string> tokens;
  StructuredRecord source;
  std::optional<Bin> bin;  // set for numeric records
  std::string display_name;

  /// Tokens joined by single spaces plus a terminal period.
  std::string text() const;
};

/// Variable names keep their case; runs of other characters become one underscore.
std::string sanitize_name(std::string_view name);
/// Categorical values are lowercased and sanitized like names.
std::string sanitize_value(std::string_view value);

std::string make_dataword(std::string_view name, std::string_view bin_or_value);

/// Throws UnresolvedVariableError for numeric records without resolvable cuts.
DataWordSentence encode_record(const StructuredRecord& record, const ThresholdSpec& spec,
                               const StatsMap& stats);

/// "Temperature was very high [104.3]" or "Previous condition: lung_cancer".
std::string render_natural(const DataWordSentence& sentence);

/// Shortest decimal text that round-trips to `value`.
std::string format_number(double value);

bool is_dataword_token(std::string_view token);
/// True when the sentence consists only of DataWords tokens and a final period.
bool is_dataword_sentence(std::string_view sentence);

enum class AblationMode { text_only, text_plus_datawords, datawords_only, nonnumeric_datawords_only };

std::string_view to_string(AblationMode mode);
AblationMode parse_ablation_mode(std::string_view name);

/// Whether a sentence survives `mode` (numeric sentences are dropped by the non-numeric mode).
bool keeps_dataword(const DataWordSentence& sentence, AblationMode mode);
bool keeps_text(AblationMode mode);

/// Original text and/or DataWords sentences, one per line, in record order.
std::string augment_document(std::string_view doc_text, std::span<const DataWordSentence> sentences,
                             AblationMode mode);

}  // namespace datawords
