#include "doctest.h"

#include <Eigen/Sparse>
#include <random>

#include "json.hpp"

#include "datawords/errors.hpp"
#include "datawords/model.hpp"
#include "datawords/ridge.hpp"
#include "oracles.hpp"

using namespace datawords;

namespace {

Encounter enc(const std::string& id, const std::string& text, std::vector<std::string> codes) {
  Encounter e;
  e.encounter_id = id;
  e.documents = {text};
  e.codes = std::move(codes);
  return e;
}

std::vector<Encounter> trivial_corpus() {
  return {enc("e1", "patient has x today", {"A"}), enc("e2", "patient is fine today", {}),
          enc("e3", "x again for patient", {"A"}), enc("e4", "nothing to report", {"B"})};
}

}  // namespace

TEST_CASE("ridge closed form cases") {
  Eigen::MatrixXd X(1, 2);
  X << 1, 0;
  Eigen::VectorXd y(1);
  y << 1;
  auto s = solve_ridge(X, y, {1.0, false});
  CHECK(s.weights(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.weights(1) == 0.0);
  CHECK(s.bias == 0.0);

  Eigen::MatrixXd Z = Eigen::MatrixXd::Random(5, 3);
  auto zero = solve_ridge(Z, Eigen::VectorXd::Zero(5));
  CHECK(zero.weights.isZero(0.0));
  CHECK(zero.bias == 0.0);

  CHECK_THROWS_AS(solve_ridge(Z, Eigen::VectorXd::Zero(4)), InputError);
  CHECK_THROWS_AS(solve_ridge(Z, Eigen::VectorXd::Zero(5), {0.0}), InputError);
}

TEST_CASE("ridge matches normal equations") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  const double lambdas[] = {0.1, 1.0, 10.0};
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::Index n = 1 + Eigen::Index(rng() % 8), d = 1 + Eigen::Index(rng() % 5);
    Eigen::MatrixXd X(n, d);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) X(i, j) = g(rng);
      y(i) = double(rng() % 2);
    }
    const double lambda = lambdas[trial % 3];
    const bool intercept = trial % 4 != 0;
    Eigen::VectorXd w;
    double b;
    oracle::ridge(X, y, lambda, intercept, w, b);
    auto dense = solve_ridge(X, y, {lambda, intercept});
    CHECK((dense.weights - w).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(std::abs(dense.bias - b) <= 1e-8);
    Eigen::SparseMatrix<double> S = X.sparseView();
    auto sparse = solve_ridge(S, y, {lambda, intercept});
    CHECK((sparse.weights - w).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("ridge gradient vanishes at the solution") {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 30; ++trial) {
    Eigen::Index n = 3 + Eigen::Index(rng() % 10), d = 1 + Eigen::Index(rng() % 6);
    Eigen::MatrixXd X(n, d);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) X(i, j) = g(rng);
      y(i) = double(rng() % 2);
    }
    auto s = solve_ridge(X, y, {1.0, true});
    auto objective = [&](const Eigen::VectorXd& w, double b) {
      return (X * w - y + Eigen::VectorXd::Constant(n, b)).squaredNorm() + w.squaredNorm();
    };
    Eigen::VectorXd r = X * s.weights - y + Eigen::VectorXd::Constant(n, s.bias);
    Eigen::VectorXd grad_w = 2.0 * X.transpose() * r + 2.0 * s.weights;
    double grad_b = 2.0 * r.sum();
    CHECK(std::sqrt(grad_w.squaredNorm() + grad_b * grad_b) <= 1e-6);

    Eigen::VectorXd dir = Eigen::VectorXd::Random(d);
    Eigen::VectorXd w1 = s.weights + Eigen::VectorXd::Ones(d) * 0.3;
    const double h = 1e-6;
    double fd = (objective(w1 + h * dir, s.bias) - objective(w1 - h * dir, s.bias)) / (2 * h);
    Eigen::VectorXd r1 = X * w1 - y + Eigen::VectorXd::Constant(n, s.bias);
    double analytic = (2.0 * X.transpose() * r1 + 2.0 * w1).dot(dir);
    CHECK(std::abs(fd - analytic) <= 1e-5 * std::max(1.0, std::abs(analytic)));
  }
}

TEST_CASE("fit_label on sparse rows") {
  std::vector<SparseVector> X(3, SparseVector(2));
  X[0].insert(0) = 1.0;
  X[1].insert(1) = 1.0;
  X[2].insert(0) = 0.5;
  std::vector<int> y{1, 0, 1};
  auto fit = fit_label(X, y, 1.0);
  Eigen::MatrixXd D(3, 2);
  D << 1, 0, 0, 1, 0.5, 0;
  Eigen::VectorXd w;
  double b;
  oracle::ridge(D, Eigen::Vector3d(1, 0, 1), 1.0, true, w, b);
  CHECK((fit.weights - w).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(std::abs(fit.bias - b) <= 1e-10);
  std::vector<int> short_y{1};
  CHECK_THROWS_AS(fit_label(X, short_y, 1.0), InputError);
}

TEST_CASE("threshold examples") {
  std::vector<double> s{0.9, 0.8, 0.2};
  std::vector<int> y{1, 1, 0};
  CHECK(fit_threshold(s, y) == doctest::Approx(0.5));
  std::vector<int> none{0, 0, 0};
  CHECK(fit_threshold(s, none) == kNeverPredict);
  CHECK_THROWS_AS(fit_threshold(std::vector<double>{}, std::vector<int>{}), InputError);
  std::vector<int> all{1, 1, 1};
  CHECK(fit_threshold(s, all) <= 0.2);
}

TEST_CASE("threshold matches exhaustive search") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + rng() % 12;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = double(rng() % 7) / 4.0 - 0.5;
      y[i] = int(rng() % 3 == 0);
    }
    if (std::count(y.begin(), y.end(), 1) == 0) y[0] = 1;
    const double t = fit_threshold(s, y);
    CHECK(oracle::f1_at(s, y, t) == oracle::best_f1(s, y));
  }
}

TEST_CASE("linear combination") {
  CHECK(combine_linear(0.4, 0.8, 0.5, 0.5) == doctest::Approx(0.6));
  CHECK(combine_linear(0.4, 0.8, 0.7, 0.0) == doctest::Approx(0.28));
  CHECK(combine_linear(0.3, 0.3, 1.0, 1.0) == doctest::Approx(0.6));
  static_assert(combine_linear(1.0, 2.0, 1.0, 1.0) == 3.0);
}

TEST_CASE("train and predict on the trivial corpus") {
  auto corpus = trivial_corpus();
  TrainConfig cfg;
  auto bundle = train_all(corpus, cfg);
  REQUIRE(bundle.labels.size() == 2);
  CHECK(bundle.labels[0].label == "A");
  CHECK(bundle.find("A"));
  CHECK_FALSE(bundle.find("Z"));
  auto p = predict(bundle, corpus[0]);
  REQUIRE(p.size() == 1);
  auto labels = p[0].predicted_labels();
  CHECK(std::find(labels.begin(), labels.end(), "A") != labels.end());

  CHECK(serialize_bundle(train_all(corpus, cfg)) == serialize_bundle(bundle));

  cfg.min_positive = 2;
  auto pruned = train_all(corpus, cfg);
  CHECK(pruned.labels.size() == 1);
  cfg.min_positive = 3;
  CHECK_THROWS_AS(train_all(corpus, cfg), ConfigError);
}

TEST_CASE("smallest corpus gives one model") {
  std::vector<Encounter> corpus{enc("e1", "cough", {"A"}), enc("e2", "no cough", {})};
  CHECK(train_all(corpus, TrainConfig{}).labels.size() == 1);
  std::vector<Encounter> unlabeled{enc("e1", "cough", {}), enc("e2", "no cough", {})};
  CHECK_THROWS_AS(train_all(unlabeled, TrainConfig{}), ConfigError);
}

TEST_CASE("empty text scores the bias; sentinel never predicts") {
  auto corpus = trivial_corpus();
  auto bundle = train_all(corpus, TrainConfig{});
  bundle.labels[1].threshold = kNeverPredict;
  bundle.labels[1].bias = 1e9;
  auto p = predict(bundle, enc("q", "", {}));
  REQUIRE(p.size() == 1);
  for (const auto& s : p[0].scores) {
    const auto* m = bundle.find(s.label);
    CHECK(s.score == m->bias);
    CHECK(s.predicted == (!m->never_predicted() && m->bias >= m->threshold));
  }
  auto labels = p[0].predicted_labels();
  CHECK(std::find(labels.begin(), labels.end(), "B") == labels.end());
}

TEST_CASE("parallel training matches sequential") {
  std::vector<Encounter> corpus;
  std::mt19937_64 rng(37);
  const char* words[] = {"fever", "cough", "rash", "pain", "stable", "x", "y"};
  for (int i = 0; i < 40; ++i) {
    std::string text;
    std::vector<std::string> codes;
    for (int j = 0; j < 6; ++j) text += std::string(words[rng() % 7]) + " ";
    for (const char* c : {"A", "B", "C", "D"})
      if (rng() % 3 == 0) codes.push_back(c);
    corpus.push_back(enc("e" + std::to_string(i), text, codes));
  }
  TrainConfig cfg;
  const auto one = serialize_bundle(train_all(corpus, cfg));
  cfg.threads = 4;
  CHECK(serialize_bundle(train_all(corpus, cfg)) == one);
}

TEST_CASE("bundle round trip and corruption") {
  auto corpus = trivial_corpus();
  auto bundle = train_all(corpus, TrainConfig{});
  bundle.labels[1].threshold = kNeverPredict;
  const auto text = serialize_bundle(bundle);
  auto back = parse_bundle(text);
  CHECK(serialize_bundle(back) == text);
  CHECK(back.labels[1].never_predicted());
  for (const auto& e : corpus) {
    auto a = predict(bundle, e), b = predict(back, e);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < a[i].scores.size(); ++j) {
        CHECK(a[i].scores[j].score == b[i].scores[j].score);
        CHECK(a[i].scores[j].predicted == b[i].scores[j].predicted);
      }
  }

  CHECK_THROWS_AS(parse_bundle(text.substr(0, text.size() / 2)), ParseError);
  auto j = nlohmann::json::parse(text);
  j["format_version"] = "99";
  CHECK_THROWS_AS(parse_bundle(j.dump()), UnsupportedVersionError);
}
