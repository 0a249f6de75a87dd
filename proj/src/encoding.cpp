#include "datawords/encoding.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "datawords/errors.hpp"
#include "internal.hpp"

namespace datawords {

using detail::json;

StatsMap compute_stats(std::span<const StructuredRecord> records) {
  std::map<std::string, std::vector<double>> values;
  for (const auto& r : records)
    if (r.is_numeric()) values[r.name].push_back(r.numeric());

  StatsMap stats;
  for (auto& [name, v] : values) {
    VariableStats s{name, v.size(), 0.0, 0.0};
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    if (*lo == *hi) {
      s.mean = *lo;
    } else {
      double sum = 0.0;
      for (double x : v) sum += x;
      s.mean = std::clamp(sum / static_cast<double>(v.size()), *lo, *hi);
      double ss = 0.0;
      for (double x : v) ss += (x - s.mean) * (x - s.mean);
      s.std = std::sqrt(ss / static_cast<double>(v.size()));
    }
    stats.emplace(name, std::move(s));
  }
  return stats;
}

std::string_view to_string(Bin bin) {
  switch (bin) {
    case Bin::very_low: return "very_low";
    case Bin::low: return "low";
    case Bin::mid: return "mid";
    case Bin::high: return "high";
    case Bin::very_high: return "very_high";
  }
  return "mid";
}

Bin bin_value(double value, const Cuts& cuts) {
  if (!std::isfinite(value)) throw InputError("cannot bin a non-finite value");
  const auto& c = cuts.bounds;
  if (value < c[0]) return Bin::very_low;
  if (value < c[1]) return Bin::low;
  if (value < c[2]) return Bin::mid;
  if (value < c[3]) return Bin::high;
  return Bin::very_high;
}

Cuts auto_cuts(const VariableStats& stats, const AutoCuts& k) {
  const double m = stats.mean;
  const double s = stats.std;
  return Cuts{{m - k.k_low * s, m - k.k_mid * s, m + k.k_mid * s, m + k.k_low * s}};
}

// ---------------------------------------------------------------------------
// ThresholdSpec

void ThresholdSpec::set(const std::string& name, ThresholdEntry entry) { entries_[name] = std::move(entry); }
void ThresholdSpec::set_default(AutoCuts multipliers) { default_ = multipliers; }
void ThresholdSpec::set_display(const std::string& name, std::string display) {
  entries_[name].display = std::move(display);
}

std::optional<Cuts> ThresholdSpec::resolve(const std::string& name, const StatsMap& stats) const {
  AutoCuts multipliers = default_;
  if (auto it = entries_.find(name); it != entries_.end()) {
    if (const auto* cuts = std::get_if<Cuts>(&it->second.rule)) return *cuts;
    if (const auto* a = std::get_if<AutoCuts>(&it->second.rule)) multipliers = *a;
  }
  auto s = stats.find(name);
  if (s == stats.end()) return std::nullopt;
  if (s->second.std == 0.0)
    detail::warn_once("variable '" + name + "' has zero standard deviation; its bins carry no information");
  return auto_cuts(s->second, multipliers);
}

std::string ThresholdSpec::display_name(const std::string& name) const {
  if (auto it = entries_.find(name); it != entries_.end() && !it->second.display.empty()) return it->second.display;
  std::string out = name;
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

namespace {

void validate_auto(const AutoCuts& a, const std::string& where) {
  if (!(a.k_mid > 0.0) || !(a.k_low > a.k_mid) || !std::isfinite(a.k_low))
    throw ConfigError("threshold spec: " + where + " needs 0 < k_mid < k_low");
}

AutoCuts auto_from_json(const json& object, const std::string& where) {
  if (!object.is_object()) throw ConfigError("threshold spec: 'auto' for " + where + " must be an object");
  AutoCuts a;
  if (auto it = object.find("k_low"); it != object.end()) {
    if (!it->is_number()) throw ConfigError("threshold spec: k_low must be a number");
    a.k_low = it->get<double>();
  }
  if (auto it = object.find("k_mid"); it != object.end()) {
    if (!it->is_number()) throw ConfigError("threshold spec: k_mid must be a number");
    a.k_mid = it->get<double>();
  }
  return a;
}

}  // namespace

void ThresholdSpec::validate() const {
  validate_auto(default_, "default");
  for (const auto& [name, entry] : entries_) {
    if (const auto* cuts = std::get_if<Cuts>(&entry.rule)) {
      const auto& c = cuts->bounds;
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (!std::isfinite(c[i])) throw ConfigError("threshold spec: non-finite cut for '" + name + "'");
        if (i > 0 && !(c[i - 1] < c[i]))
          throw ConfigError("threshold spec: cuts for '" + name + "' must be strictly increasing");
      }
    } else if (const auto* a = std::get_if<AutoCuts>(&entry.rule)) {
      validate_auto(*a, "'" + name + "'");
    }
  }
}

ThresholdSpec parse_threshold_spec(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("threshold spec: malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("threshold spec must be a JSON object");

  ThresholdSpec spec;
  for (const auto& [name, value] : root.items()) {
    if (!value.is_object()) throw ConfigError("threshold spec: entry '" + name + "' must be an object");
    if (name == "default") {
      if (auto a = value.find("auto"); a != value.end()) spec.set_default(auto_from_json(*a, "default"));
      continue;
    }
    ThresholdEntry entry;
    const bool has_cuts = value.contains("cuts");
    const bool has_auto = value.contains("auto");
    if (has_cuts && has_auto) throw ConfigError("threshold spec: '" + name + "' has both cuts and auto");
    if (has_cuts) {
      const auto& c = value["cuts"];
      if (!c.is_array() || c.size() != 4)
        throw ConfigError("threshold spec: cuts for '" + name + "' must be four numbers");
      Cuts cuts;
      for (std::size_t i = 0; i < 4; ++i) {
        if (!c[i].is_number()) throw ConfigError("threshold spec: cuts for '" + name + "' must be numbers");
        cuts.bounds[i] = c[i].get<double>();
      }
      entry.rule = cuts;
    } else if (has_auto) {
      entry.rule = auto_from_json(value["auto"], "'" + name + "'");
    }
    if (auto d = value.find("display"); d != value.end()) {
      if (!d->is_string()) throw ConfigError("threshold spec: display for '" + name + "' must be a string");
      entry.display = d->get<std::string>();
    }
    spec.set(name, std::move(entry));
  }
  spec.validate();
  return spec;
}

ThresholdSpec load_threshold_spec(const std::filesystem::path& path) {
  return parse_threshold_spec(detail::read_file(path));
}

std::string threshold_spec_to_json(const ThresholdSpec& spec) {
  json root = json::object();
  root["default"] = {{"auto", {{"k_low", spec.default_rule().k_low}, {"k_mid", spec.default_rule().k_mid}}}};
  for (const auto& [name, entry] : spec.entries()) {
    json item = json::object();
    if (const auto* cuts = std::get_if<Cuts>(&entry.rule))
      item["cuts"] = cuts->bounds;
    else if (const auto* a = std::get_if<AutoCuts>(&entry.rule))
      item["auto"] = {{"k_low", a->k_low}, {"k_mid", a->k_mid}};
    if (!entry.display.empty()) item["display"] = entry.display;
    root[name] = std::move(item);
  }
  return root.dump();
}

// ---------------------------------------------------------------------------
// Encoding

std::string DataWordSentence::text() const {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  out += '.';
  return out;
}

namespace {

bool is_alnum(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

std::string sanitize(std::string_view text, bool lower) {
  std::string out;
  bool pending = false;
  for (unsigned char c : text) {
    if (!is_alnum(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out += '_';
    pending = false;
    out += (lower && c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
  }
  return out;
}

std::string_view bin_phrase(Bin bin) {
  switch (bin) {
    case Bin::very_low: return "very low";
    case Bin::low: return "low";
    case Bin::mid: return "in normal range";
    case Bin::high: return "high";
    case Bin::very_high: return "very high";
  }
  return "in normal range";
}

}  // namespace

std::string sanitize_name(std::string_view name) { return sanitize(name, false); }
std::string sanitize_value(std::string_view value) { return sanitize(value, true); }

std::string make_dataword(std::string_view name, std::string_view bin_or_value) {
  std::string out = "dw__";
  out += name;
  out += "__";
  out += bin_or_value;
  return out;
}

DataWordSentence encode_record(const StructuredRecord& record, const ThresholdSpec& spec, const StatsMap& stats) {
  const std::string name = sanitize_name(record.name);
  if (name.empty()) throw InputError("record name '" + record.name + "' has no usable characters");

  DataWordSentence sentence;
  sentence.source = record;
  sentence.display_name = spec.display_name(record.name);

  if (!record.is_numeric()) {
    const std::string value = sanitize_value(record.categorical());
    if (value.empty()) throw InputError("record '" + record.name + "' has an empty categorical value");
    sentence.tokens.push_back(make_dataword(name, value));
    return sentence;
  }

  const auto cuts = spec.resolve(record.name, stats);
  if (!cuts) throw UnresolvedVariableError("no cuts or statistics for numeric variable '" + record.name + "'");
  const Bin bin = bin_value(record.numeric(), *cuts);
  sentence.bin = bin;
  switch (bin) {
    case Bin::very_low:
      sentence.tokens = {make_dataword(name, "low_range"), make_dataword(name, "very_low_range")};
      break;
    case Bin::low: sentence.tokens = {make_dataword(name, "low_range")}; break;
    case Bin::mid: sentence.tokens = {make_dataword(name, "mid_range")}; break;
    case Bin::high: sentence.tokens = {make_dataword(name, "high_range")}; break;
    case Bin::very_high:
      sentence.tokens = {make_dataword(name, "high_range"), make_dataword(name, "very_high_range")};
      break;
  }
  return sentence;
}

std::string format_number(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, end);
}

std::string render_natural(const DataWordSentence& sentence) {
  const auto& record = sentence.source;
  if (record.is_numeric() && sentence.bin)
    return sentence.display_name + " was " + std::string(bin_phrase(*sentence.bin)) + " [" +
           format_number(record.numeric()) + "]";
  if (record.is_numeric()) return sentence.display_name + ": " + format_number(record.numeric());
  return sentence.display_name + ": " + sanitize_value(record.categorical());
}

bool is_dataword_token(std::string_view token) {
  if (token.size() < 4 || token.substr(0, 4) != "dw__") return false;
  const auto rest = token.substr(4);
  const auto sep = rest.find("__");
  if (sep == std::string_view::npos || sep == 0 || sep + 2 >= rest.size()) return false;
  return std::all_of(rest.begin(), rest.end(), [](unsigned char c) { return is_alnum(c) || c == '_'; });
}

bool is_dataword_sentence(std::string_view sentence) {
  while (!sentence.empty() && std::isspace(static_cast<unsigned char>(sentence.front()))) sentence.remove_prefix(1);
  while (!sentence.empty() && std::isspace(static_cast<unsigned char>(sentence.back()))) sentence.remove_suffix(1);
  if (sentence.size() < 2 || sentence.back() != '.') return false;
  sentence.remove_suffix(1);
  std::size_t start = 0;
  while (start <= sentence.size()) {
    auto end = sentence.find(' ', start);
    if (end == std::string_view::npos) end = sentence.size();
    if (!is_dataword_token(sentence.substr(start, end - start))) return false;
    start = end + 1;
  }
  return true;
}

std::string_view to_string(AblationMode mode) {
  switch (mode) {
    case AblationMode::text_only: return "text_only";
    case AblationMode::text_plus_datawords: return "text_plus_datawords";
    case AblationMode::datawords_only: return "datawords_only";
    case AblationMode::nonnumeric_datawords_only: return "nonnumeric_datawords_only";
  }
  return "text_plus_datawords";
}

AblationMode parse_ablation_mode(std::string_view name) {
  for (auto m : {AblationMode::text_only, AblationMode::text_plus_datawords, AblationMode::datawords_only,
                 AblationMode::nonnumeric_datawords_only})
    if (to_string(m) == name) return m;
  throw ConfigError("unknown ablation mode '" + std::string(name) + "'");
}

bool keeps_text(AblationMode mode) {
  return mode == AblationMode::text_only || mode == AblationMode::text_plus_datawords;
}

bool keeps_dataword(const DataWordSentence& sentence, AblationMode mode) {
  switch (mode) {
    case AblationMode::text_only: return false;
    case AblationMode::text_plus_datawords:
    case AblationMode::datawords_only: return true;
    case AblationMode::nonnumeric_datawords_only: return !sentence.source.is_numeric();
  }
  return false;
}

std::string augment_document(std::string_view doc_text, std::span<const DataWordSentence> sentences,
                             AblationMode mode) {
  std::string out;
  if (keeps_text(mode)) out = doc_text;
  for (const auto& s : sentences) {
    if (!keeps_dataword(s, mode)) continue;
    if (!out.empty() || (keeps_text(mode))) out += '\n';
    out += s.text();
  }
  return out;
}

}  // namespace datawords
