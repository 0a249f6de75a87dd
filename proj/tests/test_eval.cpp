#include "doctest.h"

#include <cmath>
#include <random>
#include <set>

#include "datawords/errors.hpp"
#include "datawords/eval.hpp"

using namespace datawords;

namespace {

Encounter enc(const std::string& id, std::vector<std::string> docs, std::vector<std::string> codes) {
  Encounter e;
  e.encounter_id = id;
  e.documents = std::move(docs);
  e.codes = std::move(codes);
  return e;
}

std::vector<Encounter> separable(std::size_t n) {
  std::vector<Encounter> out;
  for (std::size_t i = 0; i < n; ++i) {
    bool pos = i % 3 == 0;
    out.push_back(enc("s" + std::to_string(i), {pos ? "note x seen today" : "note seen today"},
                      pos ? std::vector<std::string>{"X"} : std::vector<std::string>{}));
  }
  return out;
}

}  // namespace

TEST_CASE("confusion counts") {
  std::vector<LabelSet> pred{{"A", "B"}}, gold{{"A", "C"}};
  auto t = confusion_counts(pred, gold);
  CHECK(t["A"] == Counts{1, 0, 0});
  CHECK(t["B"] == Counts{0, 1, 0});
  CHECK(t["C"] == Counts{0, 0, 1});

  std::vector<LabelSet> empty{{}}, a{{"A"}};
  CHECK(confusion_counts(empty, a)["A"] == Counts{0, 0, 1});

  std::vector<LabelSet> same{{"A"}, {"B", "C"}, {}};
  for (const auto& [label, c] : confusion_counts(same, same)) {
    CHECK(c.fp == 0);
    CHECK(c.fn == 0);
  }
  std::vector<LabelSet> two{{}, {}};
  CHECK_THROWS_AS(confusion_counts(a, two), InputError);
}

TEST_CASE("micro metrics") {
  ConfusionTable t{{"A", {2, 1, 1}}};
  auto m = micro_metrics(t);
  CHECK(m.precision == doctest::Approx(2.0 / 3.0));
  CHECK(m.recall == doctest::Approx(2.0 / 3.0));
  CHECK(m.f1 == doctest::Approx(2.0 / 3.0));
  auto z = micro_metrics(ConfusionTable{{"A", {0, 0, 0}}});
  CHECK(z.precision == 0.0);
  CHECK(z.recall == 0.0);
  CHECK(z.f1 == 0.0);

  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 200; ++trial) {
    ConfusionTable table;
    std::size_t tp = 0, fp = 0, fn = 0;
    for (int l = 0; l < 5; ++l) {
      Counts c{rng() % 5, rng() % 5, rng() % 5};
      tp += c.tp;
      fp += c.fp;
      fn += c.fn;
      table["L" + std::to_string(l)] = c;
    }
    auto got = micro_metrics(table);
    double P = tp + fp ? double(tp) / double(tp + fp) : 0.0;
    double R = tp + fn ? double(tp) / double(tp + fn) : 0.0;
    double hi = std::max(P, R), lo = std::min(P, R);
    double F = hi > 0 ? 2 * hi * (lo / (lo + hi)) : 0.0;
    CHECK(got.precision == P);
    CHECK(got.recall == R);
    CHECK(got.f1 == F);
    if (hi > 0) CHECK(std::abs(got.f1 - 2 * P * R / (P + R)) <= 4e-16 * got.f1 + 1e-300);
    CHECK(got.f1 <= std::max(got.precision, got.recall));
  }
}

TEST_CASE("per-document metrics") {
  std::vector<LabelSet> pred{{"A"}, {}}, gold{{"A"}, {"A"}};
  CHECK(per_document_metrics(pred, gold).f1 == doctest::Approx(0.5));
  std::vector<LabelSet> p1{{"A", "B"}}, g1{{"A", "C"}};
  auto one = per_document_metrics(p1, g1);
  CHECK(one.precision == 0.5);
  CHECK(one.recall == 0.5);
  CHECK(one.f1 == 0.5);

  std::mt19937_64 rng(53);
  const char* labels[] = {"A", "B", "C", "D"};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<LabelSet> p, g;
    for (int d = 0; d < 7; ++d) {
      LabelSet a, b;
      for (const char* l : labels) {
        if (rng() % 2) a.push_back(l);
        if (rng() % 2) b.push_back(l);
      }
      p.push_back(a);
      g.push_back(b);
    }
    double sp = 0, sr = 0, sf = 0;
    for (std::size_t d = 0; d < p.size(); ++d) {
      std::set<std::string> ps(p[d].begin(), p[d].end()), gs(g[d].begin(), g[d].end());
      double tp = 0;
      for (const auto& l : ps) tp += gs.count(l);
      double P = ps.empty() ? 0 : tp / double(ps.size());
      double R = gs.empty() ? 0 : tp / double(gs.size());
      sp += P;
      sr += R;
      sf += P + R > 0 ? 2 * P * R / (P + R) : 0;
    }
    auto got = per_document_metrics(p, g);
    CHECK(got.precision == doctest::Approx(sp / 7).epsilon(1e-15));
    CHECK(got.recall == doctest::Approx(sr / 7).epsilon(1e-15));
    CHECK(got.f1 == doctest::Approx(sf / 7).epsilon(1e-15));
  }
}

TEST_CASE("separable corpus is learned perfectly") {
  auto corpus = separable(24);
  CvConfig cfg;
  auto report = run_cv(corpus, cfg);
  CHECK(report.micro.f1 == 1.0);
  CHECK(report.documents == 24);
  CHECK(report.folds.size() == 4);
  CHECK(report_to_json(run_cv(corpus, cfg)) == report_to_json(report));
  CHECK(report_to_csv(report).rfind("label,tp,fp,fn,precision,recall,f1", 0) == 0);
}

TEST_CASE("threads do not change reports") {
  auto corpus = separable(30);
  corpus[4].codes.push_back("Y");
  corpus[9].codes.push_back("Y");
  CvConfig cfg;
  const auto one = report_to_json(run_cv(corpus, cfg));
  cfg.threads = 8;
  CHECK(report_to_json(run_cv(corpus, cfg)) == one);
  cfg.seed = 7;
  CHECK(report_to_json(run_cv(corpus, cfg)) != one);
}

TEST_CASE("digest ignores threads") {
  CvConfig a, b;
  b.threads = 6;
  CHECK(config_digest(a) == config_digest(b));
  b.train.lambda = 2.0;
  CHECK(config_digest(a) != config_digest(b));
}

TEST_CASE("timing is opt-in") {
  auto corpus = separable(12);
  CvConfig cfg;
  CHECK(report_to_json(run_cv(corpus, cfg)).find("seconds") == std::string::npos);
  cfg.record_timing = true;
  CHECK(report_to_json(run_cv(corpus, cfg)).find("seconds") != std::string::npos);
}

TEST_CASE("folds never split encounters") {
  std::vector<Encounter> corpus;
  for (int i = 0; i < 12; ++i) corpus.push_back(enc("m" + std::to_string(i), {"a x", "b", "c x"}, {"X"}));
  corpus[3].codes.clear();
  auto run = run_cv_detailed(corpus, CvConfig{});
  for (std::size_t f = 0; f < run.test_documents.size(); ++f)
    for (const auto& d : run.test_documents[f]) CHECK(run.split.fold_of(d.encounter_id) == f);
  CHECK(run.report.documents == 36);
}

TEST_CASE("too few encounters for the folds") {
  auto corpus = separable(2);
  CvConfig cfg;
  cfg.folds = 3;
  CHECK_THROWS_AS(run_cv(corpus, cfg), ConfigError);
}
