#pragma once
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "corpusgan/embedding.hpp"
#include "corpusgan/neural.hpp"
#include "corpusgan/text.hpp"

namespace corpusgan {

struct WeganConfig {
  int epochs = 100;
  int batch_per_corpus = 50;
  double lr_start = 0.01;
  double lr_end = 1.0;  // linear ramp across epochs
  int classifier_hidden = 50;
  int discriminator_hidden = 10;
  int labels = 0;  // number of classes K; 0 means corpus membership (K = M)
  double g_lr_scale = 1.0;  // scales the embedding update; 0 freezes G
  std::uint64_t seed = 1;
};

struct WeganEpochMetrics {
  int epoch = 0;
  double lr = 0.0;
  double disc_loss = 0.0;  // per-sample means over the epoch
  double gen_loss = 0.0;
  double cls_loss = 0.0;
  double disc_accuracy = 0.0;
};

struct WeganState {
  EmbeddingMatrix G;
  MlpParams D;  // d -> hidden -> 1 sigmoid
  MlpParams C;  // d -> hidden -> K softmax
  int epochs_done = 0;
  std::string rng_state;
  std::vector<WeganEpochMetrics> history;
};

// corpora[m] holds corpus m's training documents (weights L1-normalized,
// label set). fixed[m] is that corpus's frozen embedding matrix V^m; G starts
// from g_init (the all-documents embeddings).
WeganState wegan_init(const std::vector<std::vector<TfIdfDoc>>& corpora,
                      const std::vector<EmbeddingMatrix>& fixed, const EmbeddingMatrix& g_init,
                      const WeganConfig& cfg);

// Runs epochs [state.epochs_done, until_epoch). Resumable: continuing a saved
// state reproduces an uninterrupted run bit for bit.
void wegan_run(WeganState& state, const std::vector<std::vector<TfIdfDoc>>& corpora,
               const std::vector<EmbeddingMatrix>& fixed, const WeganConfig& cfg,
               int until_epoch);

WeganState train_wegan(const std::vector<std::vector<TfIdfDoc>>& corpora,
                       const std::vector<EmbeddingMatrix>& fixed, const EmbeddingMatrix& g_init,
                       const WeganConfig& cfg);

// Fraction of documents whose classifier argmax under f_G equals their label.
double wegan_classifier_accuracy(const WeganState& state,
                                 const std::vector<std::vector<TfIdfDoc>>& corpora);

void write_wegan_state(std::ostream& os, const WeganState& state);
WeganState read_wegan_state(std::istream& is);

// epoch,lr,disc_loss,gen_loss,cls_loss,disc_accuracy rows.
std::string wegan_metrics_csv(const WeganState& state);

}  // namespace corpusgan
