#include "doctest.h"

#include <cmath>

#include "datawords/errors.hpp"
#include "datawords/extraction.hpp"
#include "datawords/synth.hpp"

using namespace datawords;

namespace {

struct Reading {
  double temp;
  bool labeled;
};

/// Temp reading (if any) and L1 membership per document.
std::vector<std::optional<Reading>> readings(const std::vector<Encounter>& corpus, const SynthSpec& spec) {
  const auto config = synthetic_pattern_config(spec);
  std::vector<std::optional<Reading>> out;
  for (const auto& e : corpus) {
    std::optional<Reading> r;
    for (const auto& rec : extract_patterns(e.documents[0], config))
      if (rec.name == "Temp") r = Reading{rec.numeric(), std::count(e.codes.begin(), e.codes.end(), "L1") > 0};
    out.push_back(r);
  }
  return out;
}

Cuts corpus_cuts(const std::vector<std::optional<Reading>>& rs) {
  std::vector<StructuredRecord> recs;
  for (const auto& r : rs)
    if (r) {
      StructuredRecord s;
      s.name = "Temp";
      s.value = r->temp;
      recs.push_back(s);
    }
  return auto_cuts(compute_stats(recs).at("Temp"));
}

}  // namespace

TEST_CASE("acceptance spec shape") {
  auto spec = acceptance_synth_spec();
  CHECK(spec.documents == 400);
  CHECK(spec.seed == 42);
  REQUIRE(spec.rules.size() == 1);
  CHECK(spec.rules[0].label == "L1");
  CHECK(spec.rules[0].variable == "Temp");
  CHECK(spec.rules[0].bin == Bin::very_high);
  CHECK(spec.rules[0].strength == 0.95);
  CHECK(spec.rules[0].base_rate == 0.3);
  auto corpus = generate_synthetic(spec);
  CHECK(corpus.size() == 400);
  CHECK(parse_synth_spec(synth_spec_to_json(spec)).documents == 400);
}

TEST_CASE("strength one follows the bin exactly") {
  auto spec = acceptance_synth_spec(5);
  spec.documents = 100;
  spec.rules[0].strength = 1.0;
  auto corpus = generate_synthetic(spec);
  auto rs = readings(corpus, spec);
  auto cuts = corpus_cuts(rs);
  std::size_t positives = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    bool in_bin = rs[i] && bin_value(rs[i]->temp, cuts) == Bin::very_high;
    bool labeled = std::count(corpus[i].codes.begin(), corpus[i].codes.end(), "L1") > 0;
    CHECK(in_bin == labeled);
    positives += labeled;
  }
  CHECK(positives > 0);
}

TEST_CASE("strength sets agreement rate") {
  auto spec = acceptance_synth_spec(11);
  spec.documents = 4000;
  spec.rules[0].strength = 0.9;
  spec.rules[0].base_rate = 1.0;
  auto rs = readings(generate_synthetic(spec), spec);
  auto cuts = corpus_cuts(rs);
  std::size_t agree = 0, n = 0;
  for (const auto& r : rs) {
    if (!r) continue;
    ++n;
    agree += (bin_value(r->temp, cuts) == Bin::very_high) == r->labeled;
  }
  const double rate = double(agree) / double(n);
  const double sd = std::sqrt(0.9 * 0.1 / double(n));
  CHECK(std::abs(rate - 0.9) <= 4 * sd);
}

TEST_CASE("same seed same corpus") {
  auto spec = acceptance_synth_spec(3);
  auto a = generate_synthetic(spec), b = generate_synthetic(spec);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].documents == b[i].documents);
    CHECK(a[i].codes == b[i].codes);
  }
  spec.seed = 4;
  CHECK(generate_synthetic(spec)[0].documents != a[0].documents);
}

TEST_CASE("invalid specs") {
  auto spec = acceptance_synth_spec();
  spec.documents = 15;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = acceptance_synth_spec();
  spec.rules[0].strength = 1.5;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  CHECK_THROWS_AS(parse_synth_spec("{\"documents\":\"many\"}"), ConfigError);
}
