#include <cmath>

#include "datawords/errors.hpp"
#include "datawords/model.hpp"
#include "internal.hpp"

namespace datawords {

using detail::json;

namespace {

json filter_to_json(const MeasurementFilter& f) {
  using Mode = MeasurementFilter::Mode;
  switch (f.mode) {
    case Mode::all: return {{"mode", "all"}};
    case Mode::count_range: return {{"mode", "count_range"}, {"min", f.min_count}, {"max", f.max_count}};
    case Mode::top_n: return {{"mode", "top_n"}, {"n", f.n}};
    case Mode::top_n_excluding_top_m: return {{"mode", "top_n_excluding_top_m"}, {"n", f.n}, {"m", f.m}};
  }
  return {{"mode", "all"}};
}

MeasurementFilter filter_from_json(const json& j) {
  const auto mode = j.at("mode").get<std::string>();
  if (mode == "all") return MeasurementFilter::all();
  if (mode == "count_range")
    return MeasurementFilter::count_range(j.at("min").get<std::size_t>(), j.at("max").get<std::size_t>());
  if (mode == "top_n") return MeasurementFilter::top_n(j.at("n").get<std::size_t>());
  if (mode == "top_n_excluding_top_m")
    return MeasurementFilter::top_n_excluding_top_m(j.at("n").get<std::size_t>(), j.at("m").get<std::size_t>());
  throw ParseError("unknown measurement filter mode '" + mode + "'");
}

json tfidf_to_json(const TfIdfModel& model) {
  const auto& vocab = model.vocabulary;
  json out = json::object();
  out["document_count"] = vocab.document_count();
  if (vocab.is_hashed()) {
    out["hash_bits"] = *vocab.hash_bits();
    out["df"] = vocab.document_frequencies();
  } else {
    json entries = json::array();
    for (std::size_t i = 0; i < vocab.size(); ++i) entries.push_back(json::array({vocab.tokens()[i], vocab.df(i)}));
    out["vocab"] = std::move(entries);
  }
  out["idf"] = std::vector<double>(model.idf.data(), model.idf.data() + model.idf.size());
  out["normalize"] = model.l2_normalize;
  return out;
}

TfIdfModel tfidf_from_json(const json& j) {
  const auto count = j.at("document_count").get<std::size_t>();
  Vocabulary vocab;
  if (j.contains("hash_bits")) {
    vocab = Vocabulary::hashed(j.at("hash_bits").get<unsigned>(), j.at("df").get<std::vector<std::size_t>>(), count);
  } else {
    std::vector<std::string> tokens;
    std::vector<std::size_t> df;
    for (const auto& e : j.at("vocab")) {
      tokens.push_back(e.at(0).get<std::string>());
      df.push_back(e.at(1).get<std::size_t>());
    }
    vocab = Vocabulary::indexed(std::move(tokens), std::move(df), count);
  }
  const auto idf = j.at("idf").get<std::vector<double>>();
  if (idf.size() != vocab.size()) throw ParseError("bundle: idf length does not match the vocabulary");
  TfIdfModel model;
  model.vocabulary = std::move(vocab);
  model.idf = Eigen::Map<const Eigen::VectorXd>(idf.data(), static_cast<Eigen::Index>(idf.size()));
  model.l2_normalize = j.at("normalize").get<bool>();
  return model;
}

}  // namespace

std::string serialize_bundle(const ModelBundle& bundle) {
  const auto& state = bundle.features;
  const auto& config = state.config;

  json root = json::object();
  root["format_version"] = bundle.format_version;
  root["tokenizer"] = {{"lowercase", true}, {"token_chars", "letters digits underscore"}};
  root["ablation_mode"] = to_string(config.mode);
  root["unit"] = to_string(config.unit);
  root["patterns"] = config.patterns ? json::parse(pattern_config_to_json(*config.patterns)) : json(nullptr);
  root["measurement_filter"] = filter_to_json(config.filter);
  root["selected_variables"] = state.selected_variables ? json(*state.selected_variables) : json(nullptr);
  if (config.rollup) {
    json aggregates = json::array();
    for (auto a : config.rollup->aggregates) aggregates.push_back(to_string(a));
    root["rollup"] = std::move(aggregates);
  } else {
    root["rollup"] = nullptr;
  }
  root["threshold_spec"] = json::parse(threshold_spec_to_json(config.thresholds));

  json stats = json::object();
  for (const auto& [name, s] : state.stats) stats[name] = {{"count", s.count}, {"mean", s.mean}, {"std", s.std}};
  root["variable_stats"] = std::move(stats);

  root["tfidf"] = tfidf_to_json(bundle.tfidf);

  json labels = json::array();
  for (const auto& m : bundle.labels) {
    json weights = json::array();
    for (SparseVector::InnerIterator it(m.weights); it; ++it) weights.push_back(json::array({it.index(), it.value()}));
    labels.push_back({{"code", m.label},
                      {"weights", std::move(weights)},
                      {"bias", m.bias},
                      {"threshold", m.never_predicted() ? json(nullptr) : json(m.threshold)}});
  }
  root["labels"] = std::move(labels);
  return root.dump() + "\n";
}

ModelBundle parse_bundle(std::string_view text) {
  const json root = detail::parse_json(text);
  if (!root.is_object()) throw ParseError("bundle must be a JSON object");
  auto version = root.find("format_version");
  if (version == root.end() || !version->is_string()) throw ParseError("bundle has no format_version");
  if (version->get<std::string>() != kBundleFormatVersion)
    throw UnsupportedVersionError("unsupported bundle format_version '" + version->get<std::string>() + "'");

  try {
    ModelBundle bundle;
    auto& state = bundle.features;
    auto& config = state.config;
    config.mode = parse_ablation_mode(root.at("ablation_mode").get<std::string>());
    config.unit = parse_classification_unit(root.at("unit").get<std::string>());
    if (!root.at("patterns").is_null()) config.patterns = parse_pattern_config(root.at("patterns").dump());
    config.filter = filter_from_json(root.at("measurement_filter"));
    if (!root.at("selected_variables").is_null())
      state.selected_variables = root.at("selected_variables").get<std::set<std::string>>();
    if (!root.at("rollup").is_null()) {
      RollupPolicy policy;
      policy.aggregates.clear();
      for (const auto& a : root.at("rollup")) policy.aggregates.push_back(parse_aggregate(a.get<std::string>()));
      config.rollup = std::move(policy);
    }
    config.thresholds = parse_threshold_spec(root.at("threshold_spec").dump());
    for (const auto& [name, s] : root.at("variable_stats").items())
      state.stats[name] = {name, s.at("count").get<std::size_t>(), s.at("mean").get<double>(), s.at("std").get<double>()};

    bundle.tfidf = tfidf_from_json(root.at("tfidf"));
    const auto dimension = bundle.tfidf.dimension();

    for (const auto& l : root.at("labels")) {
      LabelModel m;
      m.label = l.at("code").get<std::string>();
      m.bias = l.at("bias").get<double>();
      m.threshold = l.at("threshold").is_null() ? kNeverPredict : l.at("threshold").get<double>();
      m.weights.resize(dimension);
      Eigen::Index previous = -1;
      for (const auto& w : l.at("weights")) {
        const auto index = w.at(0).get<Eigen::Index>();
        if (index <= previous || index >= dimension) throw ParseError("bundle: bad weight index for '" + m.label + "'");
        m.weights.insertBack(index) = w.at(1).get<double>();
        previous = index;
      }
      if (!bundle.labels.empty() && !(bundle.labels.back().label < m.label))
        throw ParseError("bundle: labels must be unique and sorted");
      bundle.labels.push_back(std::move(m));
    }
    return bundle;
  } catch (const json::exception& e) {
    throw ParseError(std::string("corrupt bundle: ") + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(std::string("corrupt bundle: ") + e.what());
  }
}

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path) {
  detail::write_file(path, serialize_bundle(bundle));
}

ModelBundle load_bundle(const std::filesystem::path& path) { return parse_bundle(detail::read_file(path)); }

}  // namespace datawords
