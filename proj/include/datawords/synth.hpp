#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "datawords/corpus.hpp"
#include "datawords/encoding.hpp"
#include "datawords/extraction.hpp"

namespace datawords {

/// A numeric variable written as "<name> = <value>." into synthetic documents.
struct SynthVariable {
  std::string name;
  double mean = 0.0;
  double std = 1.0;
};

/// Label planted on a variable's bin. `base_rate` is the share of documents that
/// mention the variable; `in_bin_fraction` the share of those mentions drawn from
/// the planted bin. Labels follow the bin with probability `strength`.
struct SynthRule {
  std::string label;
  std::string variable;
  Bin bin = Bin::very_high;
  double strength = 1.0;
  double base_rate = 0.3;
  double in_bin_fraction = 0.15;
};

/// A categorical mention ("history of <phrase>.") recognized by the lexicon.
struct SynthCondition {
  std::string phrase;
  std::string name;
  std::string value;
  double rate = 0.2;
};

struct SynthSpec {
  std::uint64_t seed = 42;
  std::size_t documents = 400;
  std::size_t fold_count = 4;
  std::vector<std::string> filler;
  std::vector<SynthVariable> variables;
  std::vector<SynthRule> rules;
  std::vector<SynthCondition> conditions;

  /// Throws ConfigError (documents < 4 * fold_count, strength outside [0, 1], ...).
  void validate() const;
};

/// Planted Temp very_high rule: 400 documents, strength 0.95, base rate 0.3.
SynthSpec acceptance_synth_spec(std::uint64_t seed = 42);

SynthSpec parse_synth_spec(std::string_view json_text);
SynthSpec load_synth_spec(const std::filesystem::path& path);
std::string synth_spec_to_json(const SynthSpec& spec);

/// Deterministic corpus, one document per encounter. Bins are assigned with auto cuts
/// over the statistics of all generated readings of the variable.
std::vector<Encounter> generate_synthetic(const SynthSpec& spec);

/// Pattern config that recognizes the spec's variables and conditions.
PatternConfig synthetic_pattern_config(const SynthSpec& spec);

}  // namespace datawords
