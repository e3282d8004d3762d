#pragma once
// Generators of synthetic document embeddings, one per corpus, trained
// against a single 2M-class discriminator that separates every corpus from
// every generator. Shared "general topic" parameters tie the generators
// together; a discrete harness checks the discriminator's closed-form
// optimum.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "corpusgan/common.hpp"
#include "corpusgan/dense.hpp"
#include "corpusgan/embedding.hpp"
#include "corpusgan/neural.hpp"
#include "corpusgan/text.hpp"

namespace corpusgan {

// All M generators in one container so the shared components genuinely are
// one object. Deliberately bias-free: adding biases lets a generator park
// probability mass on a handful of terms regardless of the noise input.
struct DeganGenerator {
  std::vector<Matrix> W_h;  // per corpus, hidden x noise_dim
  std::vector<Matrix> W_o;  // per corpus, vocab x hidden
  Matrix W_h0;              // shared across corpora, hidden x noise_dim
  Matrix W_o0;              // shared across corpora, vocab x hidden

  int corpora() const { return static_cast<int>(W_h.size()); }
  int noise_dim() const { return static_cast<int>(W_h0.cols()); }
  int hidden() const { return static_cast<int>(W_h0.rows()); }
  int vocab() const { return static_cast<int>(W_o0.rows()); }
};

void validate_generator(const DeganGenerator& gen);

struct DeganConfig {
  int epochs = 100;
  int batch_per_corpus = 50;
  double lr_d = 0.1;    // 0.01 suits newsgroup-scale vocabularies
  double lr_g = 0.001;
  int noise_dim = 50;   // noise ~ uniform(-1, 1)^noise_dim
  int hidden = 50;      // generator hidden width; must equal topic matrix rows
  int disc_hidden = 50;
  std::uint64_t seed = 1;
};

// softmax(W_o^m tanh(W_h^m n) + W_o0 tanh(W_h0 n)): a probability vector
// over the vocabulary, directly comparable to an L1-normalized tf-idf row.
Vector degan_generate(const DeganGenerator& gen, int m, const Vector& n);

struct DeganGenGrads {
  std::vector<Matrix> dW_h, dW_o;
  Matrix dW_h0, dW_o0;
};

DeganGenGrads zero_gen_grads(const DeganGenerator& gen);

// Generator-side loss, summed over every (corpus, noise draw) pair:
// log[ p_fake / (p_fake + p_real) ] with p = D(G^m(n)). The discriminator's
// parameters stay fixed; gradients flow through the whole generator, and the
// shared matrices accumulate contributions from every corpus.
double degan_gen_loss(const MlpParams& D, const DeganGenerator& gen,
                      const std::vector<std::vector<Vector>>& noise, DeganGenGrads* grads);

// Flat views over all generator parameters for finite-difference checks.
std::vector<ParamRef> degan_param_refs(DeganGenerator& gen, const DeganGenGrads& grads);

struct DeganEpochMetrics {
  int epoch = 0;                       // 0 = untrained baseline
  double disc_loss = 0.0;              // per-term mean of the 2M-class loss
  double gen_loss = 0.0;               // per-term mean of the ratio loss
  double real_score = 0.0;             // mean e_m^T D(G^m(n))
  std::vector<double> class_accuracy;  // real corpora first, then fakes
};

struct DeganState {
  DeganGenerator gen;
  MlpParams D;
  int epochs_done = 0;  // trained epochs; history additionally holds row 0
  std::string rng_state;
  std::vector<DeganEpochMetrics> history;
};

// lda_log: topics x vocab matrix of log topic-word probabilities seeding the
// output layers; word_embed: vocab x d matrix seeding the discriminator's
// first layer. Records an untrained baseline metrics row.
DeganState degan_init(const std::vector<std::vector<TfIdfDoc>>& corpora, const Matrix& lda_log,
                      const EmbeddingMatrix& word_embed, const DeganConfig& cfg);

// Train up to until_epoch (capped at cfg.epochs); resumable bit-for-bit.
void degan_run(DeganState& state, const std::vector<std::vector<TfIdfDoc>>& corpora,
               const DeganConfig& cfg, int until_epoch);

DeganState train_degan(const std::vector<std::vector<TfIdfDoc>>& corpora, const Matrix& lda_log,
                       const EmbeddingMatrix& word_embed, const DeganConfig& cfg);

// Mean over corpora and draws of the discriminator mass assigned to the
// matching real class, e_m^T D(G^m(n)): rises as generators improve.
double degan_real_score(const DeganState& state, int draws, std::uint64_t seed);

void write_degan_state(std::ostream& os, const DeganState& state);
DeganState read_degan_state(std::istream& is);

std::string degan_metrics_csv(const DeganState& state);

// Per corpus: the k highest-mean-probability terms over `draws` generated
// vectors, one "corpus, rank, term, mean probability" row each.
std::string degan_top_terms_tsv(const DeganState& state, const Vocabulary& vocab, int draws,
                                int k, std::uint64_t seed);

// ---- Discrete-support discriminator optimum ----

// A distribution over support points 0..size-1; mass sums to 1 within 1e-12.
struct DiscreteDistribution {
  Vector mass;
};

void validate_distribution(const DiscreteDistribution& dist);

struct OptimalDiscriminator {
  std::vector<int> points;  // support indices with positive total mass
  Matrix d;                 // one row per kept point, 2M columns, rows sum to 1
};

// Closed-form optimum of the 2M-class discrimination objective:
// D*(x) = (p_1(x),...,p_M(x),q_1(x),...,q_M(x)) / (sum_m p_m(x) + q_m(x)).
OptimalDiscriminator optimal_discriminator(const std::vector<DiscreteDistribution>& p,
                                           const std::vector<DiscreteDistribution>& q);

// ---- Convergence harness on a discrete support ----

struct ConvergenceCheckpoint {
  int epoch = 0;
  std::vector<double> tv;    // per corpus: TV(empirical generator dist, p_m)
  double mean_tv = 0.0;
  double supnorm_gap = 0.0;  // max |D(vertex) - closed-form optimum|
};

struct ConvergenceReport {
  int support_size = 0;
  int corpora = 0;
  bool oracle = false;
  std::vector<ConvergenceCheckpoint> checkpoints;

  const ConvergenceCheckpoint& first() const { return checkpoints.front(); }
  const ConvergenceCheckpoint& last() const { return checkpoints.back(); }
  std::string to_json() const;
};

struct ConvergenceConfig {
  DeganConfig degan;
  int checkpoints = 5;        // measurement points after the epoch-0 baseline
  int sample_draws = 2000;    // noise draws for the empirical generator dist
  int docs_per_corpus = 300;  // synthetic documents sampled from each p_m
  int embed_dim = 8;          // width of the synthesized discriminator seed
  // Non-empty: freeze the generators and draw "fake" samples from these
  // distributions instead, so the discriminator is measured against a known
  // target (with q = p the optimum pairs every class with its twin).
  std::vector<DiscreteDistribution> oracle_q;
};

// Embeds a <=16-point support as one-hot simplex vertices, samples documents
// from p, trains the adversarial pair on them, and at each checkpoint reports
// the TV distance between empirical generator output and p plus the sup-norm
// gap between the trained discriminator and the closed-form optimum.
ConvergenceReport verify_convergence(const std::vector<DiscreteDistribution>& p,
                                const ConvergenceConfig& cfg);

}  // namespace corpusgan
