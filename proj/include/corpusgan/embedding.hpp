#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "corpusgan/dense.hpp"
#include "corpusgan/text.hpp"

namespace corpusgan {

enum class Squash { identity, tanh_squash };

struct EmbeddingMatrix {
  Matrix data;             // V x dim
  std::string provenance;  // e.g. "corpus:religion", "all", "wegan"
  int rows() const { return static_cast<int>(data.rows()); }
  int dim() const { return static_cast<int>(data.cols()); }
};

struct SkipGramConfig {
  int dim = 300;
  int window = 5;
  int negative_samples = 5;
  int epochs = 5;
  double learning_rate = 0.025;
  std::uint64_t seed = 1;
};

// Skip-gram with negative sampling, unigram^(3/4) negative table,
// single-threaded and deterministic for a fixed seed. Out-of-vocabulary
// tokens are dropped before pair generation.
EmbeddingMatrix train_skipgram(const std::vector<std::vector<std::string>>& docs,
                               const Vocabulary& vocab, const SkipGramConfig& cfg);

// word2vec text format: header "V dim", then one "term x1 ... x_dim" per line.
std::string to_word2vec_text(const EmbeddingMatrix& E, const Vocabulary& vocab);

struct EmbeddingLoadReport {
  int found = 0;
  int missing = 0;
  double coverage = 0.0;
};

// Rows are aligned to vocab order regardless of file order. Terms absent from
// the file get seeded uniform(-0.5/dim, 0.5/dim) rows. expected_dim 0 accepts
// whatever the header declares.
EmbeddingMatrix load_embeddings(const std::string& path, const Vocabulary& vocab,
                                int expected_dim, std::uint64_t seed,
                                EmbeddingLoadReport* report = nullptr);

// squash(sum_j weight_j * E.row(j)), the tf-idf weighted word embedding.
Vector doc_embed(const std::map<int, double>& weights, const EmbeddingMatrix& E, Squash squash);

// k most cosine-similar rows to term_index, query excluded, ties by index.
std::vector<std::pair<int, double>> top_k_synonyms(const EmbeddingMatrix& E, int term_index,
                                                   int k);

struct SynonymDrift {
  double mean_differing = 0.0;    // mean over terms of |top-k(before) \ top-k(after)|
  double changed_fraction = 0.0;  // share of terms whose top-k set changed at all
};

SynonymDrift synonym_drift(const EmbeddingMatrix& before, const EmbeddingMatrix& after, int k);

// TSV report: term, rank, neighbor, cosine. One block per query term.
std::string synonym_report_tsv(const EmbeddingMatrix& E, const Vocabulary& vocab,
                               const std::vector<std::string>& query_terms, int k);

}  // namespace corpusgan
