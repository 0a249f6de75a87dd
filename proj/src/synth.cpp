#include "datawords/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <random>
#include <set>

#include "datawords/errors.hpp"
#include "internal.hpp"

namespace datawords {

using detail::json;

namespace {

const std::vector<std::string>& default_filler() {
  static const std::vector<std::string> words = {
      "patient",  "reports",   "mild",     "pain",     "since",    "morning",  "denies",   "nausea",
      "vomiting", "appetite",  "normal",   "sleep",    "poor",     "family",   "history",  "reviewed",
      "lungs",    "clear",     "bilateral", "heart",   "regular",  "rate",     "rhythm",   "abdomen",
      "soft",     "nontender", "extremities", "warm",  "edema",    "absent",   "plan",     "continue",
      "current",  "dose",      "follow",   "up",       "clinic",   "weeks",    "labs",     "ordered",
      "today",    "noted",     "stable",   "overnight", "discussed", "with",   "team",     "awake",
      "alert",    "oriented",  "skin",     "intact",   "wound",    "dressing", "changed",  "ambulating",
      "hallway",  "tolerating", "diet",    "fluids",   "encouraged", "monitor", "closely", "the",
      "and",      "of",        "on",       "was",      "is",       "no",       "new",      "complaints",
      "cough",    "fatigue",   "headache", "dizziness", "chest",   "breath",   "shortness", "exam"};
  return words;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  bool chance(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

/// Z-score interval well inside each bin under the default auto cuts.
std::pair<double, double> bin_core(Bin bin) {
  switch (bin) {
    case Bin::very_low: return {-5.3, -4.7};
    case Bin::low: return {-1.45, -1.25};
    case Bin::mid: return {-0.9, 0.9};
    case Bin::high: return {1.25, 1.45};
    case Bin::very_high: return {4.7, 5.3};
  }
  return {-0.9, 0.9};
}

Bin parse_bin(std::string_view name) {
  for (auto b : {Bin::very_low, Bin::low, Bin::mid, Bin::high, Bin::very_high})
    if (to_string(b) == name) return b;
  throw ConfigError("unknown bin '" + std::string(name) + "'");
}

std::string one_decimal(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.1f", value);
  return buffer;
}

const SynthVariable& find_variable(const SynthSpec& spec, const std::string& name) {
  for (const auto& v : spec.variables)
    if (v.name == name) return v;
  throw ConfigError("synthetic spec: rule refers to unknown variable '" + name + "'");
}

}  // namespace

void SynthSpec::validate() const {
  if (fold_count < 2) throw ConfigError("synthetic spec: fold_count must be at least 2");
  if (documents < 4 * fold_count)
    throw ConfigError("synthetic spec: need at least " + std::to_string(4 * fold_count) + " documents");
  if (filler.empty()) throw ConfigError("synthetic spec: filler vocabulary is empty");
  for (const auto& v : variables) {
    if (sanitize_name(v.name).empty()) throw ConfigError("synthetic spec: variable without a name");
    if (!(v.std > 0.0) || !std::isfinite(v.mean)) throw ConfigError("synthetic spec: variable '" + v.name + "' needs std > 0");
  }
  auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  for (const auto& r : rules) {
    find_variable(*this, r.variable);
    if (r.label.empty()) throw ConfigError("synthetic spec: rule without a label");
    if (!unit(r.strength) || !unit(r.base_rate) || !unit(r.in_bin_fraction))
      throw ConfigError("synthetic spec: strength, base_rate and in_bin_fraction must lie in [0, 1]");
  }
  for (const auto& c : conditions) {
    if (c.phrase.empty() || c.name.empty() || c.value.empty())
      throw ConfigError("synthetic spec: condition needs phrase, name and value");
    if (!unit(c.rate)) throw ConfigError("synthetic spec: condition rate must lie in [0, 1]");
  }
}

SynthSpec acceptance_synth_spec(std::uint64_t seed) {
  SynthSpec spec;
  spec.seed = seed;
  spec.documents = 400;
  spec.fold_count = 4;
  spec.filler = default_filler();
  spec.variables = {{"Temp", 98.6, 1.0}};
  spec.rules = {{"L1", "Temp", Bin::very_high, 0.95, 0.3, 0.15}};
  spec.conditions = {{"lung cancer", "Previous_condition", "lung_cancer", 0.2},
                     {"diabetes", "Previous_condition", "diabetes", 0.15}};
  return spec;
}

SynthSpec parse_synth_spec(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("synthetic spec: malformed JSON: ") + e.what());
  }
  try {
    SynthSpec spec;
    spec.seed = root.value("seed", std::uint64_t{42});
    spec.documents = root.value("documents", std::size_t{400});
    spec.fold_count = root.value("fold_count", std::size_t{4});
    spec.filler = root.contains("filler") ? root.at("filler").get<std::vector<std::string>>() : default_filler();
    for (const auto& v : root.value("variables", json::array()))
      spec.variables.push_back({v.at("name").get<std::string>(), v.at("mean").get<double>(), v.at("std").get<double>()});
    for (const auto& r : root.value("rules", json::array()))
      spec.rules.push_back({r.at("label").get<std::string>(), r.at("variable").get<std::string>(),
                            parse_bin(r.value("bin", std::string("very_high"))), r.value("strength", 1.0),
                            r.value("base_rate", 0.3), r.value("in_bin_fraction", 0.15)});
    for (const auto& c : root.value("conditions", json::array()))
      spec.conditions.push_back({c.at("phrase").get<std::string>(), c.at("name").get<std::string>(),
                                 c.at("value").get<std::string>(), c.value("rate", 0.2)});
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("synthetic spec: ") + e.what());
  }
}

SynthSpec load_synth_spec(const std::filesystem::path& path) { return parse_synth_spec(detail::read_file(path)); }

std::string synth_spec_to_json(const SynthSpec& spec) {
  json root = {{"seed", spec.seed}, {"documents", spec.documents}, {"fold_count", spec.fold_count}, {"filler", spec.filler}};
  json variables = json::array();
  for (const auto& v : spec.variables) variables.push_back({{"name", v.name}, {"mean", v.mean}, {"std", v.std}});
  root["variables"] = std::move(variables);
  json rules = json::array();
  for (const auto& r : spec.rules)
    rules.push_back({{"label", r.label}, {"variable", r.variable}, {"bin", to_string(r.bin)}, {"strength", r.strength},
                     {"base_rate", r.base_rate}, {"in_bin_fraction", r.in_bin_fraction}});
  root["rules"] = std::move(rules);
  json conditions = json::array();
  for (const auto& c : spec.conditions)
    conditions.push_back({{"phrase", c.phrase}, {"name", c.name}, {"value", c.value}, {"rate", c.rate}});
  root["conditions"] = std::move(conditions);
  return root.dump(2) + "\n";
}

std::vector<Encounter> generate_synthetic(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  // Integer decoys spanning every bin of every variable, so raw numerals carry little signal.
  std::vector<long> decoys;
  for (const auto& v : spec.variables) {
    const long lo = static_cast<long>(std::floor(v.mean - 6.0 * v.std));
    const long hi = static_cast<long>(std::ceil(v.mean + 6.0 * v.std));
    for (long x = lo; x <= hi; ++x) decoys.push_back(x);
  }

  struct Reading {
    std::size_t doc;
    std::size_t rule;
    double value;
  };
  std::vector<Reading> readings;
  std::vector<std::vector<std::string>> sentences(spec.documents);

  auto insert_randomly = [&](std::vector<std::string>& list, std::string sentence) {
    list.insert(list.begin() + static_cast<std::ptrdiff_t>(rng.below(list.size() + 1)), std::move(sentence));
  };

  for (std::size_t d = 0; d < spec.documents; ++d) {
    auto& doc = sentences[d];
    const std::size_t count = 3 + rng.below(4);
    for (std::size_t s = 0; s < count; ++s) {
      std::vector<std::string> words;
      const std::size_t length = 4 + rng.below(6);
      for (std::size_t w = 0; w < length; ++w) words.push_back(spec.filler[rng.below(spec.filler.size())]);
      if (!decoys.empty() && rng.chance(0.5)) {
        const long number = decoys[rng.below(decoys.size())];
        std::string token = std::to_string(number);
        if (rng.chance(0.5)) token += "." + std::to_string(rng.below(10));
        words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng.below(words.size() + 1)), token);
      }
      std::string sentence;
      for (const auto& w : words) sentence += (sentence.empty() ? "" : " ") + w;
      sentence[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(sentence[0])));
      doc.push_back(sentence + ".");
    }

    for (std::size_t r = 0; r < spec.rules.size(); ++r) {
      const auto& rule = spec.rules[r];
      if (!rng.chance(rule.base_rate)) continue;
      const auto& variable = find_variable(spec, rule.variable);
      const auto [lo, hi] = bin_core(rng.chance(rule.in_bin_fraction) ? rule.bin : Bin::mid);
      const std::string text = one_decimal(variable.mean + rng.uniform(lo, hi) * variable.std);
      readings.push_back({d, r, std::stod(text)});
      insert_randomly(doc, variable.name + " = " + text + ".");
    }
    for (const auto& c : spec.conditions)
      if (rng.chance(c.rate)) insert_randomly(doc, "History of " + c.phrase + ".");
  }

  // Bins use auto cuts over all readings of each variable.
  std::vector<StructuredRecord> records;
  for (const auto& r : readings) {
    StructuredRecord rec;
    rec.name = spec.rules[r.rule].variable;
    rec.value = r.value;
    records.push_back(std::move(rec));
  }
  const StatsMap stats = compute_stats(records);

  std::vector<std::set<std::string>> labels(spec.documents);
  for (const auto& r : readings) {
    const auto& rule = spec.rules[r.rule];
    const bool in_bin = bin_value(r.value, auto_cuts(stats.at(rule.variable))) == rule.bin;
    const bool keep = rng.chance(rule.strength);
    if (in_bin == keep) labels[r.doc].insert(rule.label);
  }

  std::vector<Encounter> corpus;
  corpus.reserve(spec.documents);
  for (std::size_t d = 0; d < spec.documents; ++d) {
    char id[32];
    std::snprintf(id, sizeof id, "syn%05zu", d);
    Encounter enc;
    enc.encounter_id = id;
    std::string text;
    for (const auto& s : sentences[d]) text += (text.empty() ? "" : " ") + s;
    enc.documents.push_back(std::move(text));
    enc.codes.assign(labels[d].begin(), labels[d].end());
    corpus.push_back(std::move(enc));
  }
  return corpus;
}

PatternConfig synthetic_pattern_config(const SynthSpec& spec) {
  PatternConfig config;
  for (const auto& v : spec.variables) config.aliases[v.name] = v.name;
  for (const auto& c : spec.conditions) config.lexicon.push_back({c.phrase, c.name, c.value, RecordKind::condition});
  return config;
}

}  // namespace datawords
