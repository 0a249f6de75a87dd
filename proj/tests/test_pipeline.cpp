#include "doctest.h"

#include <numeric>
#include <random>
#include <set>

#include "datawords/corpus.hpp"
#include "datawords/errors.hpp"
#include "datawords/model.hpp"
#include "datawords/pipeline.hpp"
#include "datawords/ridge.hpp"

using namespace datawords;

namespace {

PatternConfig temp_patterns() {
  PatternConfig c;
  c.aliases["Temp"] = "Temp";
  c.lexicon.push_back({"lung cancer", "Previous_condition", "lung_cancer", RecordKind::condition});
  return c;
}

Encounter enc(const std::string& id, std::vector<std::string> docs) {
  Encounter e;
  e.encounter_id = id;
  e.documents = std::move(docs);
  return e;
}

StructuredRecord db(const std::string& id, const std::string& name, double v) {
  StructuredRecord r;
  r.encounter_id = id;
  r.name = name;
  r.value = v;
  r.kind = RecordKind::measurement;
  return r;
}

std::vector<Encounter> temp_corpus() {
  return {enc("e1", {"Temp = 98.0. ok."}), enc("e2", {"Temp = 99.0."}), enc("e3", {"Temp = 100.0. history of lung cancer."}),
          enc("e4", {"Temp = 103.0."}), enc("e5", {"nothing"})};
}

}  // namespace

TEST_CASE("pattern extraction feeds DataWords into the document") {
  FeatureConfig cfg;
  cfg.patterns = temp_patterns();
  auto corpus = temp_corpus();
  auto f = Featurizer::fit(corpus, cfg);
  CHECK(f.state().stats.at("Temp").count == 4);
  CHECK(f.state().stats.at("Temp").mean == 100.0);
  auto docs = f.augment(corpus[2]);
  REQUIRE(docs.size() == 1);
  CHECK(docs[0].text ==
        "Temp = 100.0. history of lung cancer.\ndw__Temp__mid_range.\ndw__Previous_condition__lung_cancer.");
  REQUIRE(docs[0].datawords.size() == 2);
  std::size_t dw_sentences = 0;
  for (std::size_t i = 0; i < docs[0].sentences.size(); ++i) {
    if (docs[0].sentences[i].kind != SentenceKind::dataword) {
      CHECK_FALSE(docs[0].dataword_of[i]);
      continue;
    }
    REQUIRE(docs[0].dataword_of[i]);
    CHECK(docs[0].datawords[*docs[0].dataword_of[i]].text() == docs[0].sentences[i].text);
    ++dw_sentences;
  }
  CHECK(dw_sentences == 2);
  CHECK(f.augment(corpus[4])[0].text == "nothing");
}

TEST_CASE("encounter unit joins documents") {
  FeatureConfig cfg;
  cfg.patterns = temp_patterns();
  cfg.unit = ClassificationUnit::encounter;
  cfg.mode = AblationMode::text_only;
  auto e = enc("e1", {"first", "second"});
  e.codes = {"A"};
  auto f = Featurizer::fit(std::vector<Encounter>{e}, cfg);
  auto docs = f.augment(e);
  REQUIRE(docs.size() == 1);
  CHECK(docs[0].text == "first\nsecond");
  CHECK(docs[0].codes == std::vector<std::string>{"A"});
  cfg.unit = ClassificationUnit::document;
  CHECK(Featurizer::fit(std::vector<Encounter>{e}, cfg).augment(e).size() == 2);
}

TEST_CASE("frozen stats drive prediction encoding") {
  FeatureConfig cfg;
  cfg.patterns = temp_patterns();
  auto corpus = temp_corpus();
  auto train = std::vector<Encounter>(corpus.begin(), corpus.begin() + 4);
  auto f = Featurizer::fit(train, cfg);
  auto probe = enc("p", {"Temp = 103.0."});
  auto as_member = f.augment(corpus[3]);
  auto as_new = f.augment(probe);
  CHECK(as_new[0].datawords[0].tokens == as_member[0].datawords[0].tokens);
  CHECK(tokenize(as_new[0].text) == tokenize(as_member[0].text));
}

TEST_CASE("attached records and filters") {
  auto corpus = std::vector<Encounter>{enc("e1", {"a", "b"}), enc("e2", {"c"})};
  std::vector<StructuredRecord> recs{db("e1", "HR", 80), db("e1", "HR", 90), db("e2", "HR", 100),
                                     db("e2", "Na", 140), db("zz", "HR", 1)};
  recs[0].doc_index = 1;
  attach_records(corpus, recs);
  CHECK(corpus[0].structured.size() == 2);
  CHECK(corpus[1].structured.size() == 2);

  FeatureConfig cfg;
  cfg.filter = MeasurementFilter::top_n(1);
  auto f = Featurizer::fit(corpus, cfg);
  REQUIRE(f.state().selected_variables);
  CHECK(*f.state().selected_variables == std::set<std::string>{"HR"});
  auto docs = f.augment(corpus[0]);
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].datawords.size() == 1);
  CHECK(docs[1].datawords.size() == 2);
  CHECK(f.augment(corpus[1])[0].datawords.size() == 1);

  std::vector<StructuredRecord> bad{db("e2", "HR", 1)};
  bad[0].doc_index = 4;
  CHECK_THROWS_AS(attach_records(corpus, bad), ValidationError);
}

TEST_CASE("rollup in the pipeline") {
  auto e = enc("e1", {"x"});
  e.structured = {db("e1", "Glucose", 90), db("e1", "Glucose", 110), db("e1", "Glucose", 130)};
  FeatureConfig cfg;
  cfg.rollup = RollupPolicy{};
  auto f = Featurizer::fit(std::vector<Encounter>{e}, cfg);
  auto recs = f.records(e);
  REQUIRE(recs.size() == 3);
  CHECK(recs[0].name == "Glucose_mean");
  CHECK(f.state().stats.count("Glucose_max"));
}

TEST_CASE("datawords-only documents carry no raw text") {
  FeatureConfig cfg;
  cfg.patterns = temp_patterns();
  cfg.mode = AblationMode::datawords_only;
  auto corpus = temp_corpus();
  auto f = Featurizer::fit(corpus, cfg);
  for (const auto& e : corpus)
    for (const auto& d : f.augment(e))
      for (const auto& t : tokenize(d.text)) CHECK(t.rfind("dw__", 0) == 0);
  cfg.mode = AblationMode::nonnumeric_datawords_only;
  auto g = Featurizer::fit(corpus, cfg);
  CHECK(g.augment(corpus[2])[0].text == "dw__Previous_condition__lung_cancer.");
  CHECK(g.augment(corpus[0])[0].text.empty());
}

TEST_CASE("ranking survives idf rescaling") {
  std::mt19937_64 rng(59);
  const char* words[] = {"fever", "cough", "rash", "pain", "stable", "x"};
  std::vector<std::string> docs;
  std::vector<int> y;
  for (int i = 0; i < 20; ++i) {
    std::string t;
    for (int j = 0; j < 5; ++j) t += std::string(words[rng() % 6]) + " ";
    docs.push_back(t);
    y.push_back(t.find("rash") != std::string::npos);
  }
  {
    auto base = fit_idf(build_vocabulary(docs));
    auto scaled = base;
    scaled.idf *= 3.5;
    auto scores = [&](const TfIdfModel& m) {
      std::vector<SparseVector> X;
      for (const auto& d : docs) X.push_back(vectorize_document(m, d));
      auto fit = fit_label(X, y, 1.0);
      std::vector<double> s;
      for (const auto& x : X) s.push_back(fit.weights.dot(Eigen::VectorXd(x)) + fit.bias);
      return s;
    };
    auto a = scores(base), b = scores(scaled);
    std::vector<std::size_t> ra(docs.size()), rb(docs.size());
    std::iota(ra.begin(), ra.end(), 0);
    std::iota(rb.begin(), rb.end(), 0);
    auto rank = [](std::vector<std::size_t>& r, const std::vector<double>& s) {
      std::stable_sort(r.begin(), r.end(), [&](std::size_t i, std::size_t j) { return s[i] - s[j] > 1e-9; });
    };
    rank(ra, a);
    rank(rb, b);
    CHECK(ra == rb);
  }
}
