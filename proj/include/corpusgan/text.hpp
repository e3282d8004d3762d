#pragma once

#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "corpusgan/common.hpp"

namespace corpusgan {

enum class Split { train, validation, test };

const char* split_name(Split s);
Split split_from_name(const std::string& name);

struct RawDocument {
  std::string relpath;  // stable identity within a corpus root
  std::string text;
  Split split = Split::train;
};

struct RawCorpus {
  int corpus_id = 0;
  std::string name;
  std::vector<RawDocument> documents;
};

// Classic Porter stemming algorithm (1980 step set, no later departures).
// Expects a lowercase ASCII word; words of length <= 2 are returned unchanged.
std::string porter_stem(std::string word);

// Lowercases, splits on anything outside [a-z], stems each alphabetic run.
// Non-ASCII bytes act as separators.
std::vector<std::string> tokenize(std::string_view raw);

struct Vocabulary {
  std::vector<std::string> terms;               // index -> term
  std::unordered_map<std::string, int> index;   // term -> index
  std::vector<int> doc_freq;                    // training documents containing term

  int size() const { return static_cast<int>(terms.size()); }
  int lookup(const std::string& term) const;  // -1 when absent

  std::string to_tsv() const;
  static Vocabulary from_tsv(const std::string& content);
};

struct TfIdfDoc {
  int corpus_id = 0;
  int label = 0;
  Split split = Split::train;
  bool degenerate = false;            // no in-vocabulary mass survived
  std::map<int, double> weights;      // term index -> weight, all > 0
};

// Terms ranked by total frequency over training documents (ties lexicographic),
// capped at v_max. doc_freq is counted over training documents only.
Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& train_docs_tokens,
                            int v_max);
Vocabulary build_vocabulary(const std::vector<RawCorpus>& corpora, int v_max);

// weight(t) = tf(t) * ln(n_train_docs / doc_freq(t)), raw counts, zero weights omitted.
std::map<int, double> tf_idf(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                             int n_train_docs);

// Divides by the entry sum; the zero vector comes back unchanged with *degenerate set.
std::map<int, double> l1_normalize(const std::map<int, double>& weights,
                                   bool* degenerate = nullptr);

}  // namespace corpusgan
