#include "datawords/extraction.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <regex>
#include <tuple>

#include "datawords/errors.hpp"
#include "internal.hpp"

namespace datawords {

using detail::json;

// ---------------------------------------------------------------------------
// Pattern config

namespace {

std::string require_string(const json& object, const char* field, const char* where) {
  auto it = object.find(field);
  if (it == object.end() || !it->is_string() || it->get<std::string>().empty())
    throw ConfigError(std::string(where) + ": missing string field '" + field + "'");
  return it->get<std::string>();
}

std::string optional_string(const json& object, const char* field) {
  auto it = object.find(field);
  if (it == object.end() || it->is_null()) return {};
  if (!it->is_string()) throw ConfigError(std::string("field '") + field + "' must be a string");
  return it->get<std::string>();
}

std::string escape_regex(std::string_view text) {
  static constexpr std::string_view special = R"(\^$.|?*+()[]{}/)";
  std::string out;
  bool in_space = false;
  for (char c : text) {
    if (c == ' ' || c == '\t') {
      if (!in_space) out += "\\s+";
      in_space = true;
      continue;
    }
    in_space = false;
    if (special.find(c) != std::string_view::npos) out += '\\';
    out += c;
  }
  return out;
}

constexpr std::string_view kNumber = R"((-?\d+(?:\.\d+)?))";

}  // namespace

PatternConfig parse_pattern_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("pattern config: malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("pattern config must be a JSON object");

  PatternConfig config;
  if (auto aliases = root.find("aliases"); aliases != root.end()) {
    if (!aliases->is_object()) throw ConfigError("pattern config: 'aliases' must be an object");
    for (const auto& [alias, name] : aliases->items()) {
      if (!name.is_string() || name.get<std::string>().empty() || alias.empty())
        throw ConfigError("pattern config: alias '" + alias + "' must map to a variable name");
      config.aliases.emplace(alias, name.get<std::string>());
    }
  }
  if (auto patterns = root.find("numeric_patterns"); patterns != root.end()) {
    if (!patterns->is_array()) throw ConfigError("pattern config: 'numeric_patterns' must be an array");
    for (const auto& p : *patterns) {
      if (!p.is_object()) throw ConfigError("pattern config: numeric pattern must be an object");
      config.numeric_patterns.push_back(
          {require_string(p, "variable", "numeric pattern"), require_string(p, "pattern", "numeric pattern"),
           optional_string(p, "unit")});
    }
  }
  if (auto lexicon = root.find("lexicon"); lexicon != root.end()) {
    if (!lexicon->is_array()) throw ConfigError("pattern config: 'lexicon' must be an array");
    for (const auto& e : *lexicon) {
      if (!e.is_object()) throw ConfigError("pattern config: lexicon entry must be an object");
      LexiconEntry entry{require_string(e, "phrase", "lexicon entry"), require_string(e, "name", "lexicon entry"),
                         require_string(e, "value", "lexicon entry"), RecordKind::condition};
      if (auto kind = optional_string(e, "kind"); !kind.empty()) entry.kind = parse_record_kind(kind);
      config.lexicon.push_back(std::move(entry));
    }
  }
  return config;
}

PatternConfig load_pattern_config(const std::filesystem::path& path) {
  return parse_pattern_config(detail::read_file(path));
}

std::string pattern_config_to_json(const PatternConfig& config) {
  json root = json::object();
  root["aliases"] = json(config.aliases);
  json patterns = json::array();
  for (const auto& p : config.numeric_patterns) {
    json item = {{"variable", p.variable}, {"pattern", p.pattern}};
    if (!p.unit.empty()) item["unit"] = p.unit;
    patterns.push_back(std::move(item));
  }
  root["numeric_patterns"] = std::move(patterns);
  json lexicon = json::array();
  for (const auto& e : config.lexicon)
    lexicon.push_back({{"phrase", e.phrase}, {"name", e.name}, {"value", e.value}, {"kind", to_string(e.kind)}});
  root["lexicon"] = std::move(lexicon);
  return root.dump(2);
}

// ---------------------------------------------------------------------------
// Extractor

struct PatternExtractor::Compiled {
  struct Rule {
    std::regex regex;
    std::string variable;
    std::string unit;
    const LexiconEntry* lexicon = nullptr;  // null for numeric rules
  };
  std::vector<Rule> rules;
};

PatternExtractor::PatternExtractor(PatternConfig config) : config_(std::move(config)) {
  auto compiled = std::make_shared<Compiled>();
  const auto flags = std::regex::ECMAScript | std::regex::icase;
  auto compile = [&](const std::string& source, const std::string& what) {
    try {
      return std::regex(source, flags);
    } catch (const std::regex_error& e) {
      throw ConfigError("pattern config: invalid pattern for " + what + ": " + e.what());
    }
  };

  for (const auto& [alias, variable] : config_.aliases) {
    std::string source = "\\b" + escape_regex(alias) + R"(\s*[=:]?\s*)" + std::string(kNumber);
    compiled->rules.push_back({compile(source, "alias '" + alias + "'"), variable, {}, nullptr});
  }
  for (const auto& p : config_.numeric_patterns) {
    auto regex = compile(p.pattern, "variable '" + p.variable + "'");
    if (regex.mark_count() < 1)
      throw ConfigError("pattern config: pattern for '" + p.variable + "' needs a capture group for the value");
    compiled->rules.push_back({std::move(regex), p.variable, p.unit, nullptr});
  }
  for (const auto& entry : config_.lexicon) {
    std::string source = "\\b" + escape_regex(entry.phrase) + "\\b";
    compiled->rules.push_back({compile(source, "phrase '" + entry.phrase + "'"), entry.name, {}, &entry});
  }
  compiled_ = std::move(compiled);
}

PatternExtractor::~PatternExtractor() = default;
PatternExtractor::PatternExtractor(PatternExtractor&&) noexcept = default;
PatternExtractor& PatternExtractor::operator=(PatternExtractor&&) noexcept = default;

// The compiled rules point into config_, so copies recompile.
PatternExtractor::PatternExtractor(const PatternExtractor& other) : PatternExtractor(other.config_) {}
PatternExtractor& PatternExtractor::operator=(const PatternExtractor& other) {
  if (this != &other) *this = PatternExtractor(other.config_);
  return *this;
}

std::vector<StructuredRecord> PatternExtractor::extract(std::string_view text,
                                                        std::optional<std::size_t> doc_index) const {
  struct Candidate {
    std::size_t begin;
    std::size_t end;
    std::size_t rule;
    RecordValue value;
  };
  std::vector<Candidate> candidates;

  const char* first = text.data();
  const char* last = text.data() + text.size();
  for (std::size_t r = 0; r < compiled_->rules.size(); ++r) {
    const auto& rule = compiled_->rules[r];
    for (std::cregex_iterator it(first, last, rule.regex), end; it != end; ++it) {
      const auto& m = *it;
      if (m.length(0) == 0) continue;
      const auto begin = static_cast<std::size_t>(m.position(0));
      const auto stop = begin + static_cast<std::size_t>(m.length(0));
      if (rule.lexicon) {
        candidates.push_back({begin, stop, r, rule.lexicon->value});
        continue;
      }
      if (!m[1].matched) continue;
      double value = 0.0;
      const char* vb = m[1].first;
      const char* ve = m[1].second;
      if (vb != ve && *vb == '+') ++vb;
      auto [ptr, ec] = std::from_chars(vb, ve, value);
      if (ec != std::errc() || ptr != ve || !std::isfinite(value)) continue;
      candidates.push_back({begin, stop, r, value});
    }
  }

  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tuple(a.begin, b.end, a.rule) < std::tuple(b.begin, a.end, b.rule);
  });

  std::vector<StructuredRecord> records;
  std::size_t covered = 0;
  for (auto& c : candidates) {
    if (c.begin < covered) continue;
    covered = c.end;
    const auto& rule = compiled_->rules[c.rule];
    StructuredRecord record;
    record.name = rule.variable;
    record.value = std::move(c.value);
    record.unit = rule.unit;
    record.kind = rule.lexicon ? rule.lexicon->kind : RecordKind::measurement;
    record.provenance = Provenance::text_extraction;
    record.doc_index = doc_index;
    record.span = CharSpan{c.begin, c.end};
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<StructuredRecord> extract_patterns(std::string_view text, const PatternConfig& config) {
  return PatternExtractor(config).extract(text);
}

// ---------------------------------------------------------------------------
// Record files

std::vector<StructuredRecord> parse_records(std::istream& in, Provenance provenance) {
  std::vector<StructuredRecord> records;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json object = detail::parse_json(line, number);
    if (!object.is_object() || !object.contains("encounter_id"))
      throw ParseError("missing string field 'encounter_id'", number);
    auto record = detail::record_from_json(object, provenance, number);
    if (record.encounter_id.empty()) throw ValidationError("empty encounter_id", number);
    records.push_back(std::move(record));
  }
  return records;
}

namespace {
std::vector<StructuredRecord> load_records(const std::filesystem::path& path, Provenance provenance) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  return parse_records(in, provenance);
}
}  // namespace

std::vector<StructuredRecord> load_external_extractions(const std::filesystem::path& path) {
  return load_records(path, Provenance::external_extractor);
}

std::vector<StructuredRecord> load_db_measurements(const std::filesystem::path& path) {
  return load_records(path, Provenance::database);
}

void write_records(std::ostream& out, std::span<const StructuredRecord> records) {
  for (const auto& r : records) out << detail::record_to_json(r).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Measurement selection

MeasurementFilter MeasurementFilter::count_range(std::size_t min, std::size_t max) {
  MeasurementFilter f;
  f.mode = Mode::count_range;
  f.min_count = min;
  f.max_count = max;
  return f;
}

MeasurementFilter MeasurementFilter::top_n(std::size_t n) {
  MeasurementFilter f;
  f.mode = Mode::top_n;
  f.n = n;
  return f;
}

MeasurementFilter MeasurementFilter::top_n_excluding_top_m(std::size_t n, std::size_t m) {
  MeasurementFilter f;
  f.mode = Mode::top_n_excluding_top_m;
  f.n = n;
  f.m = m;
  return f;
}

void MeasurementFilter::validate() const {
  switch (mode) {
    case Mode::all: return;
    case Mode::count_range:
      if (min_count > max_count) throw ConfigError("measurement filter: min count exceeds max count");
      return;
    case Mode::top_n:
    case Mode::top_n_excluding_top_m:
      if (n < 1) throw ConfigError("measurement filter: n must be at least 1");
      return;
  }
}

std::map<std::string, std::size_t> count_variables(std::span<const StructuredRecord> records) {
  std::map<std::string, std::size_t> counts;
  for (const auto& r : records) ++counts[r.name];
  return counts;
}

std::set<std::string> selected_variables(const std::map<std::string, std::size_t>& counts,
                                         const MeasurementFilter& filter) {
  filter.validate();
  std::set<std::string> keep;
  using Mode = MeasurementFilter::Mode;
  if (filter.mode == Mode::all || filter.mode == Mode::count_range) {
    for (const auto& [name, count] : counts)
      if (filter.mode == Mode::all || (count >= filter.min_count && count <= filter.max_count)) keep.insert(name);
    return keep;
  }

  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  const std::size_t skip = filter.mode == Mode::top_n_excluding_top_m ? filter.m : 0;
  for (std::size_t i = skip; i < ranked.size() && i < skip + filter.n; ++i) keep.insert(ranked[i].first);
  return keep;
}

std::vector<StructuredRecord> keep_variables(std::span<const StructuredRecord> records,
                                             const std::set<std::string>& names) {
  std::vector<StructuredRecord> out;
  for (const auto& r : records)
    if (names.count(r.name)) out.push_back(r);
  return out;
}

std::vector<StructuredRecord> select_measurements(std::span<const StructuredRecord> records,
                                                  const MeasurementFilter& filter) {
  return keep_variables(records, selected_variables(count_variables(records), filter));
}

// ---------------------------------------------------------------------------
// Roll-up

std::string_view to_string(Aggregate aggregate) {
  switch (aggregate) {
    case Aggregate::mean: return "mean";
    case Aggregate::median: return "median";
    case Aggregate::min: return "min";
    case Aggregate::max: return "max";
    case Aggregate::first: return "first";
    case Aggregate::last: return "last";
    case Aggregate::count: return "count";
  }
  return "mean";
}

Aggregate parse_aggregate(std::string_view name) {
  for (auto a : {Aggregate::mean, Aggregate::median, Aggregate::min, Aggregate::max, Aggregate::first,
                 Aggregate::last, Aggregate::count})
    if (to_string(a) == name) return a;
  throw ConfigError("unknown aggregate '" + std::string(name) + "'");
}

void RollupPolicy::validate() const {
  if (aggregates.empty()) throw ConfigError("roll-up policy needs at least one aggregate");
}

std::vector<StructuredRecord> rollup(std::span<const StructuredRecord> records, const RollupPolicy& policy) {
  policy.validate();

  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (records[i].is_numeric()) groups[{records[i].encounter_id, records[i].name}].push_back(i);

  std::vector<StructuredRecord> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& record = records[i];
    if (!record.is_numeric()) {
      out.push_back(record);
      continue;
    }
    const auto& members = groups.at({record.encounter_id, record.name});
    if (members.front() != i) continue;

    std::vector<double> values;
    values.reserve(members.size());
    std::optional<std::size_t> doc = record.doc_index;
    for (auto m : members) {
      values.push_back(records[m].numeric());
      if (records[m].doc_index != doc) doc.reset();
    }
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (double v : values) sum += v;

    for (auto aggregate : policy.aggregates) {
      double value = 0.0;
      switch (aggregate) {
        case Aggregate::mean:
          value = std::clamp(sum / static_cast<double>(values.size()), sorted.front(), sorted.back());
          break;
        case Aggregate::median: {
          const std::size_t mid = sorted.size() / 2;
          value = sorted.size() % 2 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2.0;
          break;
        }
        case Aggregate::min: value = sorted.front(); break;
        case Aggregate::max: value = sorted.back(); break;
        case Aggregate::first: value = values.front(); break;
        case Aggregate::last: value = values.back(); break;
        case Aggregate::count: value = static_cast<double>(values.size()); break;
      }
      StructuredRecord rolled = record;
      rolled.name = record.name + "_" + std::string(to_string(aggregate));
      rolled.value = value;
      rolled.doc_index = doc;
      rolled.span.reset();
      out.push_back(std::move(rolled));
    }
  }
  return out;
}

}  // namespace datawords
