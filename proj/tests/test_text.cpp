#include <cmath>
#include <fstream>

#include "corpusgan/text.hpp"
#include "doctest.h"

using namespace corpusgan;

TEST_CASE("porter stemmer matches the classic algorithm on known pairs") {
  // Pairs from the published reference vocabulary of the original algorithm.
  const std::pair<const char*, const char*> pairs[] = {
      {"caresses", "caress"},   {"ponies", "poni"},        {"ties", "ti"},
      {"caress", "caress"},     {"cats", "cat"},           {"feed", "feed"},
      {"agreed", "agre"},       {"plastered", "plaster"},  {"bled", "bled"},
      {"motoring", "motor"},    {"sing", "sing"},          {"conflated", "conflat"},
      {"troubled", "troubl"},   {"sized", "size"},         {"hopping", "hop"},
      {"tanned", "tan"},        {"falling", "fall"},       {"hissing", "hiss"},
      {"fizzed", "fizz"},       {"failing", "fail"},       {"filing", "file"},
      {"happy", "happi"},       {"sky", "sky"},            {"relational", "relat"},
      {"conditional", "condit"},{"rational", "ration"},    {"valenci", "valenc"},
      {"hesitanci", "hesit"},   {"digitizer", "digit"},    {"conformabli", "conform"},
      {"radicalli", "radic"},   {"differentli", "differ"}, {"vileli", "vile"},
      {"analogousli", "analog"},{"vietnamization", "vietnam"},
      {"predication", "predic"},{"operator", "oper"},      {"feudalism", "feudal"},
      {"decisiveness", "decis"},{"hopefulness", "hope"},   {"callousness", "callous"},
      {"formaliti", "formal"},  {"sensitiviti", "sensit"}, {"sensibiliti", "sensibl"},
      {"triplicate", "triplic"},{"formative", "form"},     {"formalize", "formal"},
      {"electriciti", "electr"},{"electrical", "electr"},  {"hopeful", "hope"},
      {"goodness", "good"},     {"revival", "reviv"},      {"allowance", "allow"},
      {"inference", "infer"},   {"airliner", "airlin"},    {"gyroscopic", "gyroscop"},
      {"adjustable", "adjust"}, {"defensible", "defens"},  {"irritant", "irrit"},
      {"replacement", "replac"},{"adjustment", "adjust"},  {"dependent", "depend"},
      {"adoption", "adopt"},    {"homologou", "homolog"},  {"communism", "commun"},
      {"activate", "activ"},    {"angulariti", "angular"}, {"homologous", "homolog"},
      {"effective", "effect"},  {"bowdlerize", "bowdler"}, {"probate", "probat"},
      {"rate", "rate"},         {"cease", "ceas"},         {"controll", "control"},
      {"roll", "roll"},         {"generalizations", "gener"},
      {"oscillators", "oscil"},
  };
  for (const auto& [word, stem] : pairs) {
    CAPTURE(word);
    CHECK(porter_stem(word) == stem);
  }
}

TEST_CASE("porter stemmer leaves short words unchanged") {
  CHECK(porter_stem("a") == "a");
  CHECK(porter_stem("is") == "is");
  CHECK(porter_stem("as") == "as");
}

TEST_CASE("tokenize handles empty input") {
  CHECK(tokenize("").empty());
}

TEST_CASE("tokenize collapses one lemma to one stem") {
  auto toks = tokenize("Running runs RUN");
  REQUIRE(toks.size() == 3);
  CHECK(toks[0] == toks[1]);
  CHECK(toks[1] == toks[2]);
  CHECK(toks[0] == "run");
}

TEST_CASE("tokenize splits on digits, punctuation and non-ascii bytes") {
  auto toks = tokenize("abc123def, gh\xc3\xa9ij");
  REQUIRE(toks.size() == 4);
  CHECK(toks[0] == "abc");
  CHECK(toks[1] == "def");
  CHECK(toks[2] == "gh");
  CHECK(toks[3] == "ij");
}

TEST_CASE("tokenize matches the frozen golden token list") {
  std::ifstream para(FIXTURE_DIR "/paragraph.txt");
  REQUIRE(para.good());
  std::string text((std::istreambuf_iterator<char>(para)), std::istreambuf_iterator<char>());
  auto toks = tokenize(text);

  std::ifstream golden(FIXTURE_DIR "/paragraph_tokens.txt");
  REQUIRE(golden.good());
  std::vector<std::string> expected;
  std::string line;
  while (std::getline(golden, line))
    if (!line.empty()) expected.push_back(line);

  REQUIRE(toks.size() == expected.size());
  for (std::size_t i = 0; i < toks.size(); i++) {
    CAPTURE(i);
    CHECK(toks[i] == expected[i]);
  }
}

TEST_CASE("build_vocabulary ranks by frequency then lexicographic") {
  // stems {a:5, b:5, c:1}, cap 2 -> [a, b]
  std::vector<std::vector<std::string>> docs = {
      {"a", "a", "b", "c"}, {"a", "b", "b"}, {"a", "a", "b", "b"}};
  auto v = build_vocabulary(docs, 2);
  REQUIRE(v.size() == 2);
  CHECK(v.terms[0] == "a");
  CHECK(v.terms[1] == "b");
  CHECK(v.lookup("a") == 0);
  CHECK(v.lookup("b") == 1);
  CHECK(v.lookup("c") == -1);
  CHECK(v.doc_freq[0] == 3);
  CHECK(v.doc_freq[1] == 3);
}

TEST_CASE("build_vocabulary keeps fewer terms than the cap when distinct terms run out") {
  std::vector<std::vector<std::string>> docs = {{"x", "y"}, {"z"}};
  auto v = build_vocabulary(docs, 5000);
  CHECK(v.size() == 3);
}

TEST_CASE("build_vocabulary cap binds") {
  std::vector<std::vector<std::string>> docs = {{"x", "x", "y"}};
  auto v = build_vocabulary(docs, 1);
  REQUIRE(v.size() == 1);
  CHECK(v.terms[0] == "x");
  CHECK(v.doc_freq[0] == 1);
}

TEST_CASE("build_vocabulary uses training split only") {
  RawCorpus c;
  c.corpus_id = 0;
  c.name = "c0";
  c.documents.push_back({"d0", "alpha beta", Split::train});
  c.documents.push_back({"d1", "gamma gamma gamma", Split::test});
  auto v = build_vocabulary(std::vector<RawCorpus>{c}, 10);
  CHECK(v.lookup("alpha") == 0);
  CHECK(v.lookup("beta") == 1);
  CHECK(v.lookup("gamma") == -1);
}

TEST_CASE("build_vocabulary rejects all-empty input") {
  std::vector<std::vector<std::string>> docs = {{}, {}};
  CHECK_THROWS_AS(build_vocabulary(docs, 5), error);
}

TEST_CASE("tf_idf matches hand arithmetic") {
  Vocabulary v;
  v.terms = {"a", "b"};
  v.index = {{"a", 0}, {"b", 1}};
  v.doc_freq = {1, 2};
  auto w = tf_idf({"a", "a", "b"}, v, 4);
  REQUIRE(w.size() == 2);
  CHECK(w.at(0) == doctest::Approx(2.0 * std::log(4.0)).epsilon(1e-12));
  CHECK(w.at(1) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("tf_idf omits terms present in every training document") {
  Vocabulary v;
  v.terms = {"a", "b"};
  v.index = {{"a", 0}, {"b", 1}};
  v.doc_freq = {4, 2};
  auto w = tf_idf({"a", "a", "b"}, v, 4);
  CHECK(w.count(0) == 0);
  CHECK(w.count(1) == 1);
}

TEST_CASE("tf_idf on empty token list is empty") {
  Vocabulary v;
  v.terms = {"a"};
  v.index = {{"a", 0}};
  v.doc_freq = {1};
  CHECK(tf_idf({}, v, 3).empty());
}

TEST_CASE("l1_normalize") {
  bool degenerate = false;
  auto w = l1_normalize({{0, 2.0}, {3, 2.0}}, &degenerate);
  CHECK(!degenerate);
  CHECK(w.at(0) == doctest::Approx(0.5));
  CHECK(w.at(3) == doctest::Approx(0.5));

  auto s = l1_normalize({{1, 3.0}}, &degenerate);
  CHECK(!degenerate);
  CHECK(s.at(1) == doctest::Approx(1.0));

  auto z = l1_normalize({}, &degenerate);
  CHECK(degenerate);
  CHECK(z.empty());
}

TEST_CASE("l1 sums to one for random sparse vectors") {
  Rng rng(7);
  for (int trial = 0; trial < 50; trial++) {
    std::map<int, double> w;
    int n = 1 + static_cast<int>(rng.uniform_index(20));
    for (int i = 0; i < n; i++) w[static_cast<int>(rng.uniform_index(100))] = rng.uniform(0.001, 9.0);
    auto norm = l1_normalize(w);
    double sum = 0.0;
    for (auto& [idx, val] : norm) sum += val;
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("pipeline determinism on identical input") {
  std::vector<RawCorpus> corpora(2);
  corpora[0] = {0, "c0", {{"a", "The cats ran quickly; 42 dogs trailed!", Split::train},
                          {"b", "Dogs dogs dogs ran.", Split::train}}};
  corpora[1] = {1, "c1", {{"a", "Quick brown foxes jump over lazy dogs.", Split::train}}};
  auto v1 = build_vocabulary(corpora, 50);
  auto v2 = build_vocabulary(corpora, 50);
  CHECK(v1.to_tsv() == v2.to_tsv());
  for (auto& c : corpora)
    for (auto& d : c.documents) {
      auto w1 = tf_idf(tokenize(d.text), v1, 3);
      auto w2 = tf_idf(tokenize(d.text), v2, 3);
      CHECK(w1 == w2);
      for (auto& [idx, val] : w1) {
        CHECK(idx < v1.size());
        CHECK(val > 0.0);
      }
    }
}

TEST_CASE("vocabulary tsv round trip") {
  std::vector<std::vector<std::string>> docs = {{"red", "green", "green"}, {"blue", "red"}};
  auto v = build_vocabulary(docs, 10);
  auto back = Vocabulary::from_tsv(v.to_tsv());
  CHECK(back.terms == v.terms);
  CHECK(back.doc_freq == v.doc_freq);
  CHECK(back.lookup("green") == v.lookup("green"));
  CHECK_THROWS_AS(Vocabulary::from_tsv("oops\tnot-an-int"), error);
}
