#pragma once
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "corpusgan/config.hpp"
#include "corpusgan/degan.hpp"
#include "corpusgan/embedding.hpp"
#include "corpusgan/eval.hpp"
#include "corpusgan/lda.hpp"
#include "corpusgan/wegan.hpp"

namespace corpusgan {

struct ExperimentConfig {
  // [data]
  std::string data_root;
  std::string manifest = "manifest.tsv";  // relative to data_root; absent file = hash split
  double train_ratio = 0.78;
  double validation_ratio = 0.10;
  double test_ratio = 0.12;
  int v_max = 5000;
  // corpus name -> subdirectories merged into it; empty map = one corpus per
  // subdirectory, unmapped subdirectories are dropped when the map is present
  std::map<std::string, std::vector<std::string>> groups;
  // [embedding]
  SkipGramConfig skipgram;
  // [lda]
  LdaConfig lda;
  // [wegan] / [degan]
  WeganConfig wegan;
  DeganConfig degan;
  int checkpoint_every = 25;  // epochs between state flushes while training
  // [eval]
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  FinetuneConfig finetune;
  int kmeans_iters = 100;
  int projection_samples = 100;
  std::vector<std::string> synonym_terms;
  int synonym_k = 5;
  // [output]
  std::string out_dir = "out";

  std::uint64_t hash = 0;  // config_hash of the file this was parsed from
};

// Reads every recognized key, defaulting the rest; rejects unknown keys so
// typos fail loudly.
ExperimentConfig experiment_from_config(const ConfigFile& c);

// Prepared dataset loaded back from disk.
struct PreparedData {
  Vocabulary vocab;
  std::vector<std::string> corpus_names;
  std::vector<std::vector<TfIdfDoc>> docs;                 // [corpus][doc], all splits
  std::vector<std::vector<std::map<int, int>>> counts;     // raw in-vocabulary term counts
  std::vector<EmbeddingMatrix> per_corpus;                 // word2vec per corpus
  EmbeddingMatrix all_docs;                                // pooled word2vec
  int corpora() const { return static_cast<int>(docs.size()); }
  std::vector<std::vector<TfIdfDoc>> split_docs(Split s) const;
};

// Tokenizes, splits, builds the vocabulary on training documents, computes
// L1-normalized tf-idf, and trains per-corpus plus pooled embeddings.
// Idempotent: a content hash of the raw corpus and the preparation settings
// short-circuits reruns. Returns true when work was done, false on no-op.
bool cmd_prepare(const ExperimentConfig& cfg, std::ostream& log);

PreparedData load_prepared(const ExperimentConfig& cfg);

// Trains the selected model ("wegan" or "degan") for every seed in
// cfg.seeds, resuming from existing checkpoints. Writes per-seed state files
// and metrics CSVs under <out>/train/<model>/seed<k>/.
void cmd_train(const ExperimentConfig& cfg, const std::string& model, std::ostream& log);

// Pure function of the on-disk prepared data and checkpoints: clustering Rand
// indices, finetuned classification accuracies, Welch significance, synonym
// drift, and projection exports under <out>/eval/. Missing models leave their
// columns absent.
void cmd_evaluate(const ExperimentConfig& cfg, std::ostream& log);

// Renders the summary table and significance blocks from eval/metrics.csv.
std::string cmd_report(const ExperimentConfig& cfg);

// Named discrete-support fixtures for the convergence harness.
ConvergenceReport run_convergence_fixture(const ExperimentConfig& cfg, const std::string& fixture,
                              std::ostream& log);

}  // namespace corpusgan
