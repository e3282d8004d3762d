#include <cmath>

#include "corpusgan/lda.hpp"
#include "doctest.h"

using namespace corpusgan;

TEST_CASE("fit_lda with one topic recovers the smoothed unigram distribution") {
  std::vector<std::map<int, int>> docs = {{{0, 3}, {1, 1}}, {{2, 2}}};
  LdaConfig cfg;
  cfg.topics = 1;
  cfg.beta = 0.01;
  cfg.iters = 5;
  auto tw = fit_lda(docs, 4, cfg);
  REQUIRE(tw.topics() == 1);
  const double denom = 6.0 + 4 * 0.01;
  CHECK(tw.phi(0, 0) == doctest::Approx((3 + 0.01) / denom).epsilon(1e-12));
  CHECK(tw.phi(0, 1) == doctest::Approx((1 + 0.01) / denom).epsilon(1e-12));
  CHECK(tw.phi(0, 2) == doctest::Approx((2 + 0.01) / denom).epsilon(1e-12));
  CHECK(tw.phi(0, 3) == doctest::Approx(0.01 / denom).epsilon(1e-12));
}

TEST_CASE("fit_lda rows are probability vectors") {
  std::vector<std::map<int, int>> docs = {{{0, 5}, {3, 2}}, {{1, 4}, {2, 1}}, {{4, 6}}};
  LdaConfig cfg;
  cfg.topics = 3;
  cfg.alpha = 0.5;
  cfg.iters = 20;
  cfg.seed = 4;
  auto tw = fit_lda(docs, 5, cfg);
  for (int t = 0; t < tw.topics(); t++) {
    CHECK(std::abs(tw.phi.row(t).sum() - 1.0) < 1e-9);
    CHECK((tw.phi.row(t).array() >= 0).all());
  }
}

TEST_CASE("fit_lda separates disjoint vocabularies into distinct topics") {
  // two documents over disjoint 2-word vocabularies
  std::vector<std::map<int, int>> docs = {{{0, 30}, {1, 30}}, {{2, 30}, {3, 30}}};
  LdaConfig cfg;
  cfg.topics = 2;
  cfg.alpha = 0.1;
  cfg.beta = 0.01;
  cfg.iters = 500;
  cfg.seed = 7;
  auto tw = fit_lda(docs, 4, cfg);

  // each topic concentrates >= 0.8 of its mass on one document's word pair
  double t0_doc0 = tw.phi(0, 0) + tw.phi(0, 1);
  double t0_doc1 = tw.phi(0, 2) + tw.phi(0, 3);
  double t1_doc0 = tw.phi(1, 0) + tw.phi(1, 1);
  double t1_doc1 = tw.phi(1, 2) + tw.phi(1, 3);
  bool split_a = t0_doc0 >= 0.8 && t1_doc1 >= 0.8;
  bool split_b = t0_doc1 >= 0.8 && t1_doc0 >= 0.8;
  CHECK((split_a || split_b));
}

TEST_CASE("fit_lda is deterministic for a fixed seed") {
  std::vector<std::map<int, int>> docs = {{{0, 4}, {1, 2}}, {{2, 3}, {3, 3}}};
  LdaConfig cfg;
  cfg.topics = 2;
  cfg.iters = 1;
  cfg.seed = 11;
  auto a = fit_lda(docs, 4, cfg);
  auto b = fit_lda(docs, 4, cfg);
  CHECK(a.phi == b.phi);
}

TEST_CASE("fit_lda rejects an empty corpus") {
  std::vector<std::map<int, int>> docs = {{}, {}};
  LdaConfig cfg;
  CHECK_THROWS_AS(fit_lda(docs, 3, cfg), error);
}

TEST_CASE("log_init floor rule and values") {
  TopicWordMatrix tw;
  tw.phi.resize(1, 3);
  tw.phi << 1.0, 0.0, 0.5;
  Matrix m = log_init(tw, 1e-8);
  CHECK(m(0, 0) == 0.0);
  CHECK(m(0, 1) == doctest::Approx(std::log(1e-8)));
  CHECK(m(0, 2) == doctest::Approx(std::log(0.5)));
  CHECK(std::isfinite(m.minCoeff()));
  CHECK_THROWS_AS(log_init(tw, 0.0), error);
}

TEST_CASE("log_init of a uniform row is constant -ln V") {
  TopicWordMatrix tw;
  const int V = 8;
  tw.phi = Matrix::Constant(1, V, 1.0 / V);
  Matrix m = log_init(tw, 1e-8);
  for (int w = 0; w < V; w++) CHECK(m(0, w) == doctest::Approx(-std::log(double(V))));
}

TEST_CASE("softmax of a log_init row recovers the phi row") {
  std::vector<std::map<int, int>> docs = {{{0, 5}, {1, 3}}, {{2, 4}, {3, 2}, {0, 1}}};
  LdaConfig cfg;
  cfg.topics = 2;
  cfg.alpha = 0.3;
  cfg.iters = 50;
  cfg.seed = 3;
  auto tw = fit_lda(docs, 4, cfg);
  Matrix m = log_init(tw, 1e-10);
  for (int t = 0; t < tw.topics(); t++) {
    Eigen::ArrayXd e = (m.row(t).array() - m.row(t).maxCoeff()).exp();
    Eigen::ArrayXd soft = e / e.sum();
    for (int w = 0; w < tw.vocab(); w++)
      CHECK(std::abs(soft[w] - tw.phi(t, w)) < 1e-6);
  }
}

TEST_CASE("topic_word_tsv lists every cell") {
  TopicWordMatrix tw;
  tw.phi.resize(2, 2);
  tw.phi << 0.25, 0.75, 0.5, 0.5;
  auto tsv = topic_word_tsv(tw);
  CHECK(tsv.find("0\t1\t0.75") != std::string::npos);
  CHECK(tsv.find("1\t0\t0.5") != std::string::npos);
}
