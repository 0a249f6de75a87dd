#include "doctest.h"

#include <cmath>
#include <random>

#include "datawords/corpus.hpp"
#include "datawords/errors.hpp"
#include "datawords/tfidf.hpp"
#include "oracles.hpp"

using namespace datawords;

namespace {

std::string random_doc(std::mt19937_64& rng, int max_tokens) {
  static const char* words[] = {"a", "b", "c", "fever", "Temp", "dw__Temp__mid_range", "98", "x_y"};
  std::uniform_int_distribution<int> len(0, max_tokens), pick(0, 7), sep(0, 3);
  std::string doc;
  int n = len(rng);
  for (int i = 0; i < n; ++i) {
    doc += words[pick(rng)];
    doc += " .,\n"[sep(rng)];
  }
  return doc;
}

}  // namespace

TEST_CASE("vocabulary counts document frequency") {
  std::vector<std::string> docs{"a b", "b c"};
  auto v = build_vocabulary(docs);
  REQUIRE(v.size() == 3);
  CHECK(v.tokens() == std::vector<std::string>{"a", "b", "c"});
  CHECK(v.df(*v.lookup("a")) == 1);
  CHECK(v.df(*v.lookup("b")) == 2);
  CHECK(v.df(*v.lookup("c")) == 1);
  CHECK(v.document_count() == 2);

  std::vector<std::string> dw{"dw__Temp__mid_range."};
  CHECK(build_vocabulary(dw).lookup("dw__temp__mid_range"));

  std::vector<std::string> blanks{"", ""};
  auto empty = build_vocabulary(blanks);
  CHECK(empty.size() == 0);
  CHECK(empty.document_count() == 2);

  CHECK_THROWS_AS(build_vocabulary(std::vector<std::string>{}), ConfigError);
}

TEST_CASE("min_df drops rare tokens") {
  std::vector<std::string> docs{"a b", "b c", "b c d"};
  auto v = build_vocabulary(docs, {2, std::nullopt});
  CHECK(v.tokens() == std::vector<std::string>{"b", "c"});
}

TEST_CASE("idf formula") {
  std::vector<std::string> docs{"a b", "b c"};
  auto m = fit_idf(build_vocabulary(docs));
  CHECK(m.idf(*m.vocabulary.lookup("b")) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.idf(*m.vocabulary.lookup("a")) == doctest::Approx(std::log(1.5) + 1.0).epsilon(1e-15));

  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    std::size_t N = 1 + rng() % 50;
    std::size_t df = 1 + rng() % N;
    auto v = Vocabulary::indexed({"t"}, {df}, N);
    CHECK(std::abs(fit_idf(v).idf(0) - (std::log((1.0 + N) / (1.0 + df)) + 1.0)) <= 1e-12);
  }
}

TEST_CASE("document vectors") {
  std::vector<std::string> docs{"a b", "b c"};
  auto m = fit_idf(build_vocabulary(docs));
  auto v = vectorize_document(m, "a b");
  CHECK(v.coeff(*m.vocabulary.lookup("a")) == doctest::Approx(0.8148).epsilon(1e-4));
  CHECK(v.coeff(*m.vocabulary.lookup("b")) == doctest::Approx(0.5797).epsilon(1e-4));
  CHECK(vectorize_document(m, "zzz").nonZeros() == 0);
  CHECK(vectorize_document(m, "").nonZeros() == 0);
  auto bbb = vectorize_document(m, "b b b");
  CHECK(bbb.nonZeros() == 1);
  CHECK(bbb.coeff(*m.vocabulary.lookup("b")) == doctest::Approx(1.0).epsilon(1e-15));
  m.l2_normalize = false;
  CHECK(vectorize_document(m, "b b b").coeff(1) == doctest::Approx(1.0 + std::log(3.0)).epsilon(1e-15));
}

TEST_CASE("sentence vectors") {
  std::vector<std::string> docs{"fever noted", "dw__temp__high_range.", "b c"};
  auto m = fit_idf(build_vocabulary(docs));
  Sentence s{"fever noted", 0, 0, SentenceKind::text};
  CHECK((vectorize_sentence(m, s) - vectorize_document(m, "fever noted")).norm() == 0.0);
  Sentence dw{"dw__temp__high_range.", 0, 1, SentenceKind::dataword};
  auto v = vectorize_sentence(m, dw);
  CHECK(v.nonZeros() == 1);
  CHECK(v.norm() == doctest::Approx(1.0));
  Sentence oov{"nothing here.", 0, 2, SentenceKind::text};
  CHECK(vectorize_sentence(m, oov).nonZeros() == 0);
}

TEST_CASE("sparse tf-idf matches dense brute force") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> docs;
    std::size_t n = 1 + rng() % 6;
    for (std::size_t i = 0; i < n; ++i) docs.push_back(random_doc(rng, 12));
    docs.push_back("a");
    auto model = fit_idf(build_vocabulary(docs));
    auto dense = oracle::tfidf(docs, docs);
    REQUIRE(dense.vocab == model.vocabulary.tokens());
    for (std::size_t i = 0; i < docs.size(); ++i) {
      Eigen::VectorXd got = vectorize_document(model, docs[i]);
      CHECK((got - dense.rows.row(Eigen::Index(i)).transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("hashed vocabulary") {
  std::vector<std::string> docs{"a b", "b c"};
  auto v = build_vocabulary(docs, {1, 4u});
  CHECK(v.is_hashed());
  CHECK(v.size() == 16);
  CHECK(v.lookup("b") == hash_bucket("b", 4));
  CHECK(v.df(hash_bucket("b", 4)) >= 2);
  for (const char* t : {"a", "b", "zzz", "dw__temp__mid_range"}) CHECK(hash_bucket(t, 4) < 16);
}

TEST_CASE("vocabulary is deterministic") {
  std::vector<std::string> docs{"z y x", "a z", "q"};
  CHECK(build_vocabulary(docs) == build_vocabulary(docs));
  CHECK(build_vocabulary(docs).tokens() == std::vector<std::string>{"z", "y", "x", "a", "q"});
}
