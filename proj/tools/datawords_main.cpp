// Command-line entry point: extract, stats, encode, train, predict, explain, evaluate, synth.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "datawords/corpus.hpp"
#include "datawords/encoding.hpp"
#include "datawords/errors.hpp"
#include "datawords/eval.hpp"
#include "datawords/explain.hpp"
#include "datawords/extraction.hpp"
#include "datawords/model.hpp"
#include "datawords/pipeline.hpp"
#include "datawords/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace datawords;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitConfig = 2;

struct RunConfig {
  std::string corpus;
  std::string source = "none";  // patterns | external | db | none
  std::string patterns;
  std::string external;
  std::string db;
  std::string thresholds;
  std::string mode = "text_plus_datawords";
  std::string modes = "text_only,text_plus_datawords";
  std::string measurement_filter = "all";
  std::string rollup = "none";
  std::string unit = "document";
  double lambda = 1.0;
  std::size_t folds = 4;
  std::uint64_t seed = 42;
  std::size_t topk = 3;
  std::size_t threads = 1;
  std::size_t min_positive = 1;
  std::size_t min_df = 1;
  unsigned hash_bits = 0;
  std::string filter = "all";
  std::string out;
  std::string bundle;
  std::string spec;
  std::string patterns_out;
  bool csv = false;
  bool timing = false;
};

/// Binds a flag to a RunConfig field; remembers the option so explicit flags can win over --config.
class Flags {
 public:
  explicit Flags(CLI::App* app) : app_(app) {}

  template <typename T>
  void add(const std::string& name, T RunConfig::*field, const std::string& help) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app_->add_option(name, *value, help);
    appliers_.push_back([opt, value, field](RunConfig& config) {
      if (opt->count() > 0) config.*field = *value;
    });
  }

  void flag(const std::string& name, bool RunConfig::*field, const std::string& help) {
    auto value = std::make_shared<bool>(false);
    CLI::Option* opt = app_->add_flag(name, *value, help);
    appliers_.push_back([opt, value, field](RunConfig& config) {
      if (opt->count() > 0) config.*field = *value;
    });
  }

  void apply(RunConfig& config) const {
    for (const auto& f : appliers_) f(config);
  }

 private:
  CLI::App* app_;
  std::vector<std::function<void(RunConfig&)>> appliers_;
};

template <typename T>
void read_key(const json& j, const char* key, T& target) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) target = it->get<T>();
}

void apply_config_file(const std::string& path, RunConfig& c) {
  json j;
  try {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config " + path + " must be a JSON object");
  try {
    read_key(j, "corpus", c.corpus);
    read_key(j, "source", c.source);
    read_key(j, "patterns", c.patterns);
    read_key(j, "external", c.external);
    read_key(j, "db", c.db);
    read_key(j, "thresholds", c.thresholds);
    read_key(j, "mode", c.mode);
    if (auto it = j.find("modes"); it != j.end() && it->is_array()) {
      std::string joined;
      for (const auto& m : *it) joined += (joined.empty() ? "" : ",") + m.get<std::string>();
      c.modes = joined;
    } else {
      read_key(j, "modes", c.modes);
    }
    read_key(j, "measurement_filter", c.measurement_filter);
    read_key(j, "rollup", c.rollup);
    read_key(j, "unit", c.unit);
    read_key(j, "lambda", c.lambda);
    read_key(j, "folds", c.folds);
    read_key(j, "seed", c.seed);
    read_key(j, "topk", c.topk);
    read_key(j, "threads", c.threads);
    read_key(j, "min_positive", c.min_positive);
    read_key(j, "min_df", c.min_df);
    read_key(j, "hash_bits", c.hash_bits);
    read_key(j, "filter", c.filter);
    read_key(j, "out", c.out);
    read_key(j, "bundle", c.bundle);
    read_key(j, "spec", c.spec);
    read_key(j, "patterns_out", c.patterns_out);
    read_key(j, "csv", c.csv);
    read_key(j, "timing", c.timing);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, sep))
    if (!part.empty()) parts.push_back(part);
  return parts;
}

std::size_t parse_count(const std::string& text) {
  try {
    std::size_t used = 0;
    const auto value = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return static_cast<std::size_t>(value);
  } catch (const std::exception&) {
    throw ConfigError("expected a non-negative integer, got '" + text + "'");
  }
}

MeasurementFilter parse_filter(const std::string& text) {
  const auto parts = split_list(text, ':');
  if (parts.empty() || parts[0] == "all") return MeasurementFilter::all();
  if (parts[0] == "count_range" && parts.size() == 3)
    return MeasurementFilter::count_range(parse_count(parts[1]), parse_count(parts[2]));
  if (parts[0] == "top_n" && parts.size() == 2) return MeasurementFilter::top_n(parse_count(parts[1]));
  if (parts[0] == "top_n_excluding_top_m" && parts.size() == 3)
    return MeasurementFilter::top_n_excluding_top_m(parse_count(parts[1]), parse_count(parts[2]));
  throw ConfigError("bad measurement filter '" + text + "'");
}

std::optional<RollupPolicy> parse_rollup(const std::string& text) {
  if (text.empty() || text == "none") return std::nullopt;
  RollupPolicy policy;
  if (text == "default") return policy;
  policy.aggregates.clear();
  for (const auto& a : split_list(text, ',')) policy.aggregates.push_back(parse_aggregate(a));
  policy.validate();
  return policy;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw ConfigError(std::string("missing required ") + flag);
}

/// Loads the corpus and attaches structured records from the configured source.
std::vector<Encounter> load_inputs(const RunConfig& c) {
  require(c.corpus, "--corpus");
  auto corpus = load_corpus(c.corpus);
  if (c.source == "external") {
    require(c.external, "--external");
    const auto records = load_external_extractions(c.external);
    attach_records(corpus, records);
  } else if (c.source == "db") {
    require(c.db, "--db");
    const auto records = load_db_measurements(c.db);
    attach_records(corpus, records);
  } else if (c.source == "patterns") {
    require(c.patterns, "--patterns");
  } else if (c.source != "none") {
    throw ConfigError("unknown extraction source '" + c.source + "'");
  }
  return corpus;
}

FeatureConfig feature_config(const RunConfig& c) {
  FeatureConfig f;
  if (c.source == "patterns") {
    require(c.patterns, "--patterns");
    f.patterns = load_pattern_config(c.patterns);
  }
  f.filter = parse_filter(c.measurement_filter);
  f.rollup = parse_rollup(c.rollup);
  if (!c.thresholds.empty()) f.thresholds = load_threshold_spec(c.thresholds);
  f.mode = parse_ablation_mode(c.mode);
  f.unit = parse_classification_unit(c.unit);
  return f;
}

TrainConfig train_config(const RunConfig& c) {
  TrainConfig t;
  t.features = feature_config(c);
  if (!(c.lambda > 0.0)) throw ConfigError("--lambda must be positive");
  t.lambda = c.lambda;
  t.min_positive = c.min_positive;
  t.vocabulary.min_df = c.min_df;
  if (c.hash_bits) t.vocabulary.hash_bits = c.hash_bits;
  t.threads = std::max<std::size_t>(1, c.threads);
  return t;
}

std::ofstream open_output(const std::string& path) {
  require(path, "--out");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path);
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// Commands

int cmd_extract(const RunConfig& c) {
  if (c.source == "none") throw ConfigError("extract requires a source (--source patterns|external|db)");
  auto start = std::chrono::steady_clock::now();
  const auto corpus = load_inputs(c);
  std::vector<StructuredRecord> records;
  if (c.source == "patterns") {
    const PatternExtractor extractor(load_pattern_config(c.patterns));
    for (const auto& enc : corpus)
      for (std::size_t d = 0; d < enc.documents.size(); ++d)
        for (auto& r : extractor.extract(enc.documents[d], d)) {
          r.encounter_id = enc.encounter_id;
          records.push_back(std::move(r));
        }
  } else {
    for (const auto& enc : corpus)
      for (const auto& r : enc.structured)
        if (r.provenance != Provenance::database || c.source == "db") records.push_back(r);
  }
  auto out = open_output(c.out);
  write_records(out, records);
  std::cerr << "extract: " << records.size() << " records in " << seconds_since(start) << " s\n";
  return kExitOk;
}

int cmd_stats(const RunConfig& c) {
  const auto corpus = load_inputs(c);
  const Featurizer featurizer = Featurizer::fit(corpus, feature_config(c));
  json out = json::object();
  for (const auto& [name, s] : featurizer.state().stats)
    out[name] = {{"count", s.count}, {"mean", s.mean}, {"std", s.std}};
  auto file = open_output(c.out);
  file << out.dump(2) << '\n';
  return kExitOk;
}

int cmd_encode(const RunConfig& c) {
  const auto corpus = load_inputs(c);
  const Featurizer featurizer = Featurizer::fit(corpus, feature_config(c));
  std::vector<Encounter> encoded;
  for (const auto& enc : corpus) {
    Encounter e;
    e.encounter_id = enc.encounter_id;
    e.codes = enc.codes;
    for (const auto& doc : featurizer.augment(enc)) e.documents.push_back(doc.text);
    encoded.push_back(std::move(e));
  }
  auto out = open_output(c.out);
  write_corpus(out, encoded);
  return kExitOk;
}

int cmd_train(const RunConfig& c) {
  auto start = std::chrono::steady_clock::now();
  const auto corpus = load_inputs(c);
  const auto bundle = train_all(corpus, train_config(c));
  require(c.out, "--out");
  save_bundle(bundle, c.out);
  std::cerr << "train: " << bundle.labels.size() << " label models, vocabulary "
            << bundle.tfidf.vocabulary.size() << ", " << seconds_since(start) << " s\n";
  return kExitOk;
}

ModelBundle require_bundle(const RunConfig& c) {
  require(c.bundle, "--bundle");
  if (!fs::exists(c.bundle)) throw ConfigError("bundle " + c.bundle + " does not exist");
  return load_bundle(c.bundle);
}

int cmd_predict(const RunConfig& c) {
  const auto bundle = require_bundle(c);
  const auto corpus = load_inputs(c);
  const Predictor predictor(bundle);
  auto out = open_output(c.out);
  for (const auto& enc : corpus) {
    for (const auto& p : predictor.predict(enc)) {
      json scores = json::array();
      for (const auto& s : p.scores) scores.push_back({{"label", s.label}, {"score", s.score}, {"predicted", s.predicted}});
      out << json{{"encounter_id", p.encounter_id}, {"doc_index", p.doc_index}, {"scores", std::move(scores)}}.dump()
          << '\n';
    }
  }
  return kExitOk;
}

int cmd_explain(const RunConfig& c) {
  const auto bundle = require_bundle(c);
  const auto corpus = load_inputs(c);
  const auto filter = parse_sentence_filter(c.filter);
  if (c.topk < 1) throw ConfigError("--topk must be at least 1");
  const Predictor predictor(bundle);
  auto out = open_output(c.out);
  for (const auto& enc : corpus) {
    for (const auto& doc : predictor.augment(enc)) {
      const auto prediction = predict_document(bundle, doc);
      for (const auto& label : prediction.predicted_labels()) {
        json items = json::array();
        for (const auto& j : top_justifications(score_sentences(bundle, label, doc), c.topk, filter))
          items.push_back({{"rank", j.rank},
                           {"kind", j.sentence.kind == SentenceKind::dataword ? "dataword" : "text"},
                           {"score", j.score},
                           {"text", j.sentence.text},
                           {"rendering", j.rendering}});
        out << json{{"encounter_id", doc.encounter_id}, {"doc_index", doc.doc_index}, {"label", label},
                    {"justifications", std::move(items)}}.dump()
            << '\n';
      }
    }
  }
  return kExitOk;
}

int cmd_evaluate(const RunConfig& c) {
  const auto corpus = load_inputs(c);
  require(c.out, "--out");
  fs::create_directories(c.out);
  CvConfig cv;
  cv.train = train_config(c);
  cv.folds = c.folds;
  cv.seed = c.seed;
  cv.threads = std::max<std::size_t>(1, c.threads);
  cv.record_timing = c.timing;
  const auto modes = split_list(c.modes, ',');
  if (modes.empty()) throw ConfigError("--modes is empty");
  for (const auto& name : modes) {
    auto start = std::chrono::steady_clock::now();
    cv.train.features.mode = parse_ablation_mode(name);
    const auto report = run_cv(corpus, cv);
    const fs::path base = fs::path(c.out) / ("report_" + name);
    std::ofstream(base.string() + ".json", std::ios::binary) << report_to_json(report);
    if (c.csv) std::ofstream(base.string() + ".csv", std::ios::binary) << report_to_csv(report);
    std::cerr << "evaluate: " << name << " micro F1 " << report.micro.f1 << " (P " << report.micro.precision << ", R "
              << report.micro.recall << ") in " << seconds_since(start) << " s\n";
  }
  return kExitOk;
}

int cmd_synth(const RunConfig& c, bool seed_given) {
  SynthSpec spec = c.spec.empty() ? acceptance_synth_spec() : load_synth_spec(c.spec);
  if (seed_given) spec.seed = c.seed;
  const auto corpus = generate_synthetic(spec);
  auto out = open_output(c.out);
  write_corpus(out, corpus);
  if (!c.patterns_out.empty()) {
    std::ofstream patterns(c.patterns_out, std::ios::binary | std::ios::trunc);
    if (!patterns) throw ConfigError("cannot write " + c.patterns_out);
    patterns << pattern_config_to_json(synthetic_pattern_config(spec)) << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DataWords: text classification over free text plus structured values encoded as words"};
  app.require_subcommand(1);

  struct Command {
    CLI::App* app;
    std::unique_ptr<Flags> flags;
    std::string config_path;
    CLI::Option* seed = nullptr;
  };
  std::vector<std::unique_ptr<Command>> commands;

  auto make = [&](const std::string& name, const std::string& help) -> Command& {
    auto cmd = std::make_unique<Command>();
    cmd->app = app.add_subcommand(name, help);
    cmd->flags = std::make_unique<Flags>(cmd->app);
    cmd->app->add_option("--config", cmd->config_path, "JSON config file; explicit flags override it");
    auto& f = *cmd->flags;
    f.add("--corpus", &RunConfig::corpus, "corpus JSON-lines file");
    f.add("--out", &RunConfig::out, "output path");
    f.add("--seed", &RunConfig::seed, "random seed (default 42)");
    f.add("--threads", &RunConfig::threads, "worker threads");
    commands.push_back(std::move(cmd));
    return *commands.back();
  };
  auto add_source = [](Flags& f) {
    f.add("--source", &RunConfig::source, "extraction source: patterns|external|db|none");
    f.add("--patterns", &RunConfig::patterns, "pattern config JSON");
    f.add("--external", &RunConfig::external, "external extractor output (JSON-lines)");
    f.add("--db", &RunConfig::db, "database measurement dump (JSON-lines)");
    f.add("--measurement-filter", &RunConfig::measurement_filter,
          "all | count_range:MIN:MAX | top_n:N | top_n_excluding_top_m:N:M");
    f.add("--rollup", &RunConfig::rollup, "none | default | comma list of mean,median,min,max,first,last,count");
  };
  auto add_model = [](Flags& f) {
    f.add("--thresholds", &RunConfig::thresholds, "threshold spec JSON");
    f.add("--mode", &RunConfig::mode, "text_only|text_plus_datawords|datawords_only|nonnumeric_datawords_only");
    f.add("--unit", &RunConfig::unit, "classification unit: document|encounter");
    f.add("--lambda", &RunConfig::lambda, "ridge penalty (default 1.0)");
    f.add("--min-positive", &RunConfig::min_positive, "minimum positive documents per label model");
    f.add("--min-df", &RunConfig::min_df, "minimum document frequency");
    f.add("--hash-bits", &RunConfig::hash_bits, "hashed vocabulary with 2^bits buckets (0 = indexed)");
  };

  auto& extract = make("extract", "run the configured extractor and write structured records");
  add_source(*extract.flags);

  auto& stats = make("stats", "compute per-variable statistics");
  add_source(*stats.flags);
  add_model(*stats.flags);

  auto& encode = make("encode", "write the corpus with DataWords sentences appended");
  add_source(*encode.flags);
  add_model(*encode.flags);

  auto& train = make("train", "train a model bundle");
  add_source(*train.flags);
  add_model(*train.flags);

  auto& predict_cmd = make("predict", "predict label sets with a bundle");
  add_source(*predict_cmd.flags);
  predict_cmd.flags->add("--bundle", &RunConfig::bundle, "model bundle");

  auto& explain = make("explain", "key-sentence justifications for every predicted label");
  add_source(*explain.flags);
  explain.flags->add("--bundle", &RunConfig::bundle, "model bundle");
  explain.flags->add("--topk", &RunConfig::topk, "justifications per label (default 3)");
  explain.flags->add("--filter", &RunConfig::filter, "all|text_only|datawords_only");

  auto& evaluate = make("evaluate", "k-fold cross-validation, one report per ablation mode");
  add_source(*evaluate.flags);
  add_model(*evaluate.flags);
  evaluate.flags->add("--folds", &RunConfig::folds, "fold count (default 4)");
  evaluate.flags->add("--modes", &RunConfig::modes, "comma-separated ablation modes");
  evaluate.flags->flag("--csv", &RunConfig::csv, "also write per-label CSV tables");
  evaluate.flags->flag("--timing", &RunConfig::timing, "record per-fold wall-clock time in reports");

  auto& synth = make("synth", "generate a synthetic planted-signal corpus");
  synth.flags->add("--spec", &RunConfig::spec, "synthetic spec JSON (default: built-in acceptance spec)");
  synth.flags->add("--patterns-out", &RunConfig::patterns_out, "also write a matching pattern config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    for (auto& cmd : commands) {
      if (!cmd->app->parsed()) continue;
      RunConfig config;
      if (!cmd->config_path.empty()) apply_config_file(cmd->config_path, config);
      cmd->flags->apply(config);
      const auto name = cmd->app->get_name();
      if (name == "extract") return cmd_extract(config);
      if (name == "stats") return cmd_stats(config);
      if (name == "encode") return cmd_encode(config);
      if (name == "train") return cmd_train(config);
      if (name == "predict") return cmd_predict(config);
      if (name == "explain") return cmd_explain(config);
      if (name == "evaluate") return cmd_evaluate(config);
      if (name == "synth") {
        const bool seed_given = cmd->app->get_option("--seed")->count() > 0;
        return cmd_synth(config, seed_given);
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitConfig;
}
