#pragma once
#include <cstdint>
#include <map>
#include <vector>

#include "corpusgan/dense.hpp"
#include "corpusgan/common.hpp"

namespace corpusgan {

struct TopicWordMatrix {
  Matrix phi;  // T x V, each row a probability vector
  int topics() const { return static_cast<int>(phi.rows()); }
  int vocab() const { return static_cast<int>(phi.cols()); }
};

struct LdaConfig {
  int topics = 50;
  double alpha = -1.0;  // < 0 means 50/topics
  double beta = 0.01;
  int iters = 1000;
  std::uint64_t seed = 1;
};

// Collapsed Gibbs sampling over token-topic assignments; phi estimated from
// the final counts with beta smoothing. docs are sparse term->count maps.
TopicWordMatrix fit_lda(const std::vector<std::map<int, int>>& docs, int vocab_size,
                        const LdaConfig& cfg);

// ln(max(phi, floor)) entrywise.
Matrix log_init(const TopicWordMatrix& phi, double floor);

// TSV persistence: topic, term-index, probability.
std::string topic_word_tsv(const TopicWordMatrix& phi);

}  // namespace corpusgan
