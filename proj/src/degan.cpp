#include "corpusgan/degan.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace corpusgan {

namespace {

Vector softmax_vec(const Vector& z) {
  const double m = z.maxCoeff();
  Vector e = (z.array() - m).exp();
  return e / e.sum();
}

Matrix glorot(int rows, int cols, Rng& rng) {
  const double s = std::sqrt(6.0 / (rows + cols));
  Matrix w(rows, cols);
  for (int i = 0; i < rows; i++)
    for (int j = 0; j < cols; j++) w(i, j) = rng.uniform(-s, s);
  return w;
}

Vector to_dense(const std::map<int, double>& weights, int dim) {
  Vector v = Vector::Zero(dim);
  for (const auto& [idx, w] : weights) v[idx] = w;
  return v;
}

int argmax(const Vector& y) {
  int best = 0;
  for (int i = 1; i < y.size(); i++)
    if (y[i] > y[best]) best = i;
  return best;
}

int sample_point(const DiscreteDistribution& dist, Rng& rng) {
  const double u = rng.uniform01();
  double cum = 0.0;
  for (int s = 0; s < dist.mass.size(); s++) {
    cum += dist.mass[s];
    if (u <= cum) return s;
  }
  return static_cast<int>(dist.mass.size()) - 1;
}

void check_config(const DeganConfig& cfg) {
  if (cfg.epochs < 0) throw error("degan: negative epochs");
  if (cfg.batch_per_corpus < 1) throw error("degan: batch_per_corpus must be >= 1");
  if (cfg.lr_d <= 0 || cfg.lr_g <= 0) throw error("degan: learning rates must be > 0");
  if (cfg.noise_dim < 1 || cfg.hidden < 1 || cfg.disc_hidden < 1)
    throw error("degan: noise_dim, hidden and disc_hidden must be >= 1");
}

void check_inputs(const std::vector<std::vector<TfIdfDoc>>& corpora, const Matrix& lda_log,
                  const EmbeddingMatrix& word_embed, const DeganConfig& cfg) {
  check_config(cfg);
  const int M = static_cast<int>(corpora.size());
  if (M == 0) throw error("degan: no corpora");
  const int V = static_cast<int>(lda_log.cols());
  if (V < 1 || lda_log.rows() < 1) throw error("degan: empty topic matrix");
  if (!lda_log.allFinite()) throw error("degan: non-finite topic matrix");
  if (lda_log.rows() != cfg.hidden)
    throw error("degan: cfg.hidden (" + std::to_string(cfg.hidden) +
                ") must equal topic matrix rows (" + std::to_string(lda_log.rows()) + ")");
  if (word_embed.rows() != V)
    throw error("degan: word embedding rows must equal vocabulary size");
  for (int m = 0; m < M; m++) {
    if (corpora[m].empty()) throw error("degan: corpus " + std::to_string(m) + " has no documents");
    for (const auto& d : corpora[m])
      if (!d.weights.empty() && d.weights.rbegin()->first >= V)
        throw error("degan: document term index out of vocabulary range");
  }
}

struct GenForward {
  Vector h_m, h_0;  // tanh hidden activations
  Vector y;         // softmax output
};

GenForward generate_cached(const DeganGenerator& gen, int m, const Vector& n) {
  GenForward f;
  f.h_m = (gen.W_h[m] * n).array().tanh();
  f.h_0 = (gen.W_h0 * n).array().tanh();
  f.y = softmax_vec(gen.W_o[m] * f.h_m + gen.W_o0 * f.h_0);
  return f;
}

// One full measurement-or-update pass over the data. With update=false the
// parameters are left untouched and only the metrics row is produced, which
// is how the untrained baseline row is recorded. A non-null oracle replaces
// generator output with one-hot samples from the given distributions and
// freezes the generators (the discriminator then trains against a known
// target density).
DeganEpochMetrics epoch_pass(DeganState& st, const std::vector<std::vector<TfIdfDoc>>& corpora,
                             const DeganConfig& cfg, Rng& rng, bool update,
                             const std::vector<DiscreteDistribution>* oracle, int epoch_index) {
  const int M = static_cast<int>(corpora.size());
  const int V = st.gen.vocab();
  const int d_n = st.gen.noise_dim();

  std::size_t max_docs = 0;
  for (int m = 0; m < M; m++) max_docs = std::max(max_docs, corpora[m].size());
  const int steps_per_epoch =
      static_cast<int>((max_docs + cfg.batch_per_corpus - 1) / cfg.batch_per_corpus);

  std::vector<BatchQueue> queues;
  for (int m = 0; m < M; m++) queues.emplace_back(static_cast<int>(corpora[m].size()));

  auto draw_noise = [&] {
    Vector n(d_n);
    for (int i = 0; i < d_n; i++) n[i] = rng.uniform(-1.0, 1.0);
    return n;
  };
  auto draw_fake = [&](int m) {
    if (oracle) return Vector(Vector::Unit(V, sample_point((*oracle)[m], rng)));
    return degan_generate(st.gen, m, draw_noise());
  };

  double disc_sum = 0, gen_sum = 0, score_sum = 0;
  long disc_terms = 0, gen_terms = 0, score_n = 0;
  std::vector<long> cls_correct(2 * M, 0), cls_total(2 * M, 0);

  for (int step = 0; step < steps_per_epoch; step++) {
    // (a) discriminator update on real documents vs current generator output
    std::vector<std::vector<Vector>> real(M), fake(M);
    for (int m = 0; m < M; m++) {
      for (int i : queues[m].draw(cfg.batch_per_corpus, rng))
        real[m].push_back(to_dense(corpora[m][i].weights, V));
      for (std::size_t i = 0; i < real[m].size(); i++) fake[m].push_back(draw_fake(m));
    }

    for (int m = 0; m < M; m++) {
      for (const Vector& v : real[m]) {
        if (argmax(mlp_forward(st.D, v)) == m) cls_correct[m]++;
        cls_total[m]++;
      }
      for (const Vector& v : fake[m]) {
        Vector post = mlp_forward(st.D, v);
        if (argmax(post) == M + m) cls_correct[M + m]++;
        cls_total[M + m]++;
        score_sum += post[m];
        score_n++;
      }
    }

    auto disc = degan_disc_loss(st.D, real, fake);
    long n_terms = 0;
    for (int m = 0; m < M; m++) n_terms += static_cast<long>(real[m].size() + fake[m].size());
    if (!std::isfinite(disc.loss))
      throw error("degan: non-finite discriminator loss at epoch " + std::to_string(epoch_index) +
                  " step " + std::to_string(step));
    if (update) {
      scale_grads(disc.grads, 1.0 / n_terms);
      sgd_step(st.D, disc.grads, cfg.lr_d);
    }
    disc_sum += disc.loss;
    disc_terms += n_terms;

    // (b) generator update on fresh noise; skipped when an oracle stands in
    if (!oracle) {
      std::vector<std::vector<Vector>> noise(M);
      for (int m = 0; m < M; m++)
        for (int i = 0; i < cfg.batch_per_corpus; i++) noise[m].push_back(draw_noise());
      DeganGenGrads grads = zero_gen_grads(st.gen);
      const double loss = degan_gen_loss(st.D, st.gen, noise, update ? &grads : nullptr);
      const long terms = static_cast<long>(M) * cfg.batch_per_corpus;
      if (!std::isfinite(loss))
        throw error("degan: non-finite generator loss at epoch " + std::to_string(epoch_index) +
                    " step " + std::to_string(step));
      if (update) {
        const double f = cfg.lr_g / static_cast<double>(terms);
        for (int m = 0; m < M; m++) {
          if (!grads.dW_h[m].allFinite() || !grads.dW_o[m].allFinite())
            throw error("degan: non-finite generator gradient at epoch " +
                        std::to_string(epoch_index));
          st.gen.W_h[m] -= f * grads.dW_h[m];
          st.gen.W_o[m] -= f * grads.dW_o[m];
        }
        if (!grads.dW_h0.allFinite() || !grads.dW_o0.allFinite())
          throw error("degan: non-finite shared gradient at epoch " + std::to_string(epoch_index));
        st.gen.W_h0 -= f * grads.dW_h0;
        st.gen.W_o0 -= f * grads.dW_o0;
      }
      gen_sum += loss;
      gen_terms += terms;
    }
  }

  DeganEpochMetrics row;
  row.epoch = epoch_index;
  row.disc_loss = disc_terms ? disc_sum / disc_terms : 0.0;
  row.gen_loss = gen_terms ? gen_sum / gen_terms : 0.0;
  row.real_score = score_n ? score_sum / score_n : 0.0;
  row.class_accuracy.resize(2 * M);
  for (int c = 0; c < 2 * M; c++)
    row.class_accuracy[c] =
        cls_total[c] ? static_cast<double>(cls_correct[c]) / cls_total[c] : 0.0;
  return row;
}

DeganState init_impl(const std::vector<std::vector<TfIdfDoc>>& corpora, const Matrix& lda_log,
                     const EmbeddingMatrix& word_embed, const DeganConfig& cfg,
                     const std::vector<DiscreteDistribution>* oracle) {
  check_inputs(corpora, lda_log, word_embed, cfg);
  const int M = static_cast<int>(corpora.size());
  const int V = static_cast<int>(lda_log.cols());
  const int T = static_cast<int>(lda_log.rows());
  const int d = word_embed.dim();

  Rng rng(cfg.seed);
  DeganState st;
  st.D = make_mlp({V, d, cfg.disc_hidden, 2 * M},
                  {Activation::tanh_act, Activation::tanh_act, Activation::softmax}, true, rng);
  st.D.layers[0].W = word_embed.data.transpose();
  validate_mlp(st.D);

  for (int m = 0; m < M; m++) st.gen.W_h.push_back(glorot(T, cfg.noise_dim, rng));
  st.gen.W_h0 = glorot(T, cfg.noise_dim, rng);
  for (int m = 0; m < M; m++) st.gen.W_o.push_back(lda_log.transpose());
  st.gen.W_o0 = lda_log.transpose();
  validate_generator(st.gen);

  st.history.push_back(epoch_pass(st, corpora, cfg, rng, false, oracle, 0));
  st.rng_state = rng.save_state();
  return st;
}

void run_impl(DeganState& st, const std::vector<std::vector<TfIdfDoc>>& corpora,
              const DeganConfig& cfg, int until_epoch,
              const std::vector<DiscreteDistribution>* oracle) {
  until_epoch = std::min(until_epoch, cfg.epochs);
  if (st.epochs_done >= until_epoch) return;
  Rng rng(1);
  rng.load_state(st.rng_state);
  for (int epoch = st.epochs_done; epoch < until_epoch; epoch++) {
    st.history.push_back(epoch_pass(st, corpora, cfg, rng, true, oracle, epoch + 1));
    st.epochs_done = epoch + 1;
    st.rng_state = rng.save_state();
  }
}

}  // namespace

void validate_generator(const DeganGenerator& gen) {
  const int M = gen.corpora();
  if (M == 0) throw error("generator: no corpora");
  if (static_cast<int>(gen.W_o.size()) != M)
    throw error("generator: W_h/W_o corpus counts differ");
  const int T = gen.hidden();
  const int d_n = gen.noise_dim();
  const int V = gen.vocab();
  if (T < 1 || d_n < 1 || V < 1) throw error("generator: empty parameter matrices");
  if (gen.W_o0.cols() != T) throw error("generator: shared matrices disagree on hidden width");
  for (int m = 0; m < M; m++) {
    if (gen.W_h[m].rows() != T || gen.W_h[m].cols() != d_n)
      throw error("generator " + std::to_string(m) + ": W_h shape mismatch");
    if (gen.W_o[m].rows() != V || gen.W_o[m].cols() != T)
      throw error("generator " + std::to_string(m) + ": W_o shape mismatch");
    if (!gen.W_h[m].allFinite() || !gen.W_o[m].allFinite())
      throw error("generator " + std::to_string(m) + ": non-finite parameters");
  }
  if (!gen.W_h0.allFinite() || !gen.W_o0.allFinite())
    throw error("generator: non-finite shared parameters");
}

Vector degan_generate(const DeganGenerator& gen, int m, const Vector& n) {
  if (m < 0 || m >= gen.corpora()) throw error("degan_generate: corpus index out of range");
  if (n.size() != gen.noise_dim())
    throw error("degan_generate: noise size " + std::to_string(n.size()) + " != " +
                std::to_string(gen.noise_dim()));
  return generate_cached(gen, m, n).y;
}

DeganGenGrads zero_gen_grads(const DeganGenerator& gen) {
  DeganGenGrads g;
  for (int m = 0; m < gen.corpora(); m++) {
    g.dW_h.push_back(Matrix::Zero(gen.W_h[m].rows(), gen.W_h[m].cols()));
    g.dW_o.push_back(Matrix::Zero(gen.W_o[m].rows(), gen.W_o[m].cols()));
  }
  g.dW_h0 = Matrix::Zero(gen.W_h0.rows(), gen.W_h0.cols());
  g.dW_o0 = Matrix::Zero(gen.W_o0.rows(), gen.W_o0.cols());
  return g;
}

double degan_gen_loss(const MlpParams& D, const DeganGenerator& gen,
                      const std::vector<std::vector<Vector>>& noise, DeganGenGrads* grads) {
  const int M = gen.corpora();
  if (static_cast<int>(noise.size()) != M)
    throw error("degan_gen_loss: one noise batch per corpus required");
  if (D.layers.front().W.cols() != gen.vocab())
    throw error("degan_gen_loss: discriminator input dim != generator vocab");
  if (D.layers.back().W.rows() != 2 * M)
    throw error("degan_gen_loss: discriminator must output 2M classes");

  double total = 0.0;
  for (int m = 0; m < M; m++) {
    for (const Vector& n : noise[m]) {
      GenForward f = generate_cached(gen, m, n);
      InputGradLoss pair = degan_pair_loss(D, f.y, m, M);
      total += pair.loss;
      if (!grads) continue;
      // back through the output softmax, then both hidden branches
      Vector dz = f.y.array() * (pair.dx.array() - pair.dx.dot(f.y));
      grads->dW_o[m].noalias() += dz * f.h_m.transpose();
      grads->dW_o0.noalias() += dz * f.h_0.transpose();
      Vector ds_m =
          (gen.W_o[m].transpose() * dz).array() * (1.0 - f.h_m.array().square());
      Vector ds_0 =
          (gen.W_o0.transpose() * dz).array() * (1.0 - f.h_0.array().square());
      grads->dW_h[m].noalias() += ds_m * n.transpose();
      grads->dW_h0.noalias() += ds_0 * n.transpose();
    }
  }
  return total;
}

std::vector<ParamRef> degan_param_refs(DeganGenerator& gen, const DeganGenGrads& grads) {
  std::vector<ParamRef> refs;
  for (int m = 0; m < gen.corpora(); m++) {
    refs.push_back({"generator" + std::to_string(m) + ".W_h", gen.W_h[m].data(),
                    gen.W_h[m].size(), grads.dW_h[m].data()});
    refs.push_back({"generator" + std::to_string(m) + ".W_o", gen.W_o[m].data(),
                    gen.W_o[m].size(), grads.dW_o[m].data()});
  }
  refs.push_back({"shared.W_h0", gen.W_h0.data(), gen.W_h0.size(), grads.dW_h0.data()});
  refs.push_back({"shared.W_o0", gen.W_o0.data(), gen.W_o0.size(), grads.dW_o0.data()});
  return refs;
}

DeganState degan_init(const std::vector<std::vector<TfIdfDoc>>& corpora, const Matrix& lda_log,
                      const EmbeddingMatrix& word_embed, const DeganConfig& cfg) {
  return init_impl(corpora, lda_log, word_embed, cfg, nullptr);
}

void degan_run(DeganState& st, const std::vector<std::vector<TfIdfDoc>>& corpora,
               const DeganConfig& cfg, int until_epoch) {
  check_config(cfg);
  run_impl(st, corpora, cfg, until_epoch, nullptr);
}

DeganState train_degan(const std::vector<std::vector<TfIdfDoc>>& corpora, const Matrix& lda_log,
                       const EmbeddingMatrix& word_embed, const DeganConfig& cfg) {
  DeganState st = degan_init(corpora, lda_log, word_embed, cfg);
  degan_run(st, corpora, cfg, cfg.epochs);
  return st;
}

double degan_real_score(const DeganState& st, int draws, std::uint64_t seed) {
  if (draws < 1) throw error("degan_real_score: draws must be >= 1");
  const int M = st.gen.corpora();
  const int d_n = st.gen.noise_dim();
  Rng rng(seed);
  double sum = 0.0;
  for (int i = 0; i < draws; i++) {
    for (int m = 0; m < M; m++) {
      Vector n(d_n);
      for (int j = 0; j < d_n; j++) n[j] = rng.uniform(-1.0, 1.0);
      sum += mlp_forward(st.D, degan_generate(st.gen, m, n))[m];
    }
  }
  return sum / (static_cast<double>(draws) * M);
}

void write_degan_state(std::ostream& os, const DeganState& st) {
  os << "degan-state 1\n";
  os << "corpora " << st.gen.corpora() << '\n';
  os << "epochs_done " << st.epochs_done << '\n';
  os << "rng " << st.rng_state << '\n';
  write_matrix(os, st.gen.W_h0);
  write_matrix(os, st.gen.W_o0);
  for (int m = 0; m < st.gen.corpora(); m++) {
    write_matrix(os, st.gen.W_h[m]);
    write_matrix(os, st.gen.W_o[m]);
  }
  write_mlp(os, st.D);
  os << "history " << st.history.size() << '\n';
  for (const auto& r : st.history) {
    os << r.epoch << ' ' << format_double(r.disc_loss) << ' ' << format_double(r.gen_loss) << ' '
       << format_double(r.real_score);
    for (double a : r.class_accuracy) os << ' ' << format_double(a);
    os << '\n';
  }
}

DeganState read_degan_state(std::istream& is) {
  std::string tag;
  int version = 0;
  is >> tag >> version;
  if (!is || tag != "degan-state" || version != 1)
    throw error("read_degan_state: bad header/version");
  DeganState st;
  int M = 0;
  is >> tag >> M;
  if (!is || tag != "corpora" || M < 1) throw error("read_degan_state: bad corpus count");
  is >> tag >> st.epochs_done;
  if (!is || tag != "epochs_done") throw error("read_degan_state: missing epochs_done");
  is >> tag;
  if (tag != "rng") throw error("read_degan_state: missing rng");
  std::getline(is, st.rng_state);
  if (!st.rng_state.empty() && st.rng_state.front() == ' ') st.rng_state.erase(0, 1);
  st.gen.W_h0 = read_matrix(is);
  st.gen.W_o0 = read_matrix(is);
  for (int m = 0; m < M; m++) {
    st.gen.W_h.push_back(read_matrix(is));
    st.gen.W_o.push_back(read_matrix(is));
  }
  validate_generator(st.gen);
  st.D = read_mlp(is);
  std::size_t n = 0;
  is >> tag >> n;
  if (!is || tag != "history") throw error("read_degan_state: missing history");
  st.history.resize(n);
  for (auto& r : st.history) {
    is >> r.epoch >> r.disc_loss >> r.gen_loss >> r.real_score;
    r.class_accuracy.resize(2 * M);
    for (double& a : r.class_accuracy) is >> a;
    if (!is) throw error("read_degan_state: truncated history");
  }
  return st;
}

std::string degan_metrics_csv(const DeganState& st) {
  const int M = st.gen.corpora();
  std::ostringstream os;
  os << "epoch,disc_loss,gen_loss,real_score";
  for (int m = 0; m < M; m++) os << ",acc_real_" << m;
  for (int m = 0; m < M; m++) os << ",acc_fake_" << m;
  os << '\n';
  for (const auto& r : st.history) {
    os << r.epoch << ',' << format_double(r.disc_loss) << ',' << format_double(r.gen_loss) << ','
       << format_double(r.real_score);
    for (double a : r.class_accuracy) os << ',' << format_double(a);
    os << '\n';
  }
  return os.str();
}

std::string degan_top_terms_tsv(const DeganState& st, const Vocabulary& vocab, int draws, int k,
                                std::uint64_t seed) {
  const int V = st.gen.vocab();
  if (vocab.size() != V) throw error("degan_top_terms_tsv: vocabulary size mismatch");
  if (draws < 1 || k < 1) throw error("degan_top_terms_tsv: draws and k must be >= 1");
  k = std::min(k, V);
  const int d_n = st.gen.noise_dim();
  Rng rng(seed);
  std::ostringstream os;
  os << "corpus\trank\tterm\tmean_probability\n";
  for (int m = 0; m < st.gen.corpora(); m++) {
    Vector mean = Vector::Zero(V);
    for (int i = 0; i < draws; i++) {
      Vector n(d_n);
      for (int j = 0; j < d_n; j++) n[j] = rng.uniform(-1.0, 1.0);
      mean += degan_generate(st.gen, m, n);
    }
    mean /= draws;
    std::vector<int> idx(V);
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](int a, int b) {
      if (mean[a] != mean[b]) return mean[a] > mean[b];
      return a < b;
    });
    for (int r = 0; r < k; r++)
      os << m << '\t' << (r + 1) << '\t' << vocab.terms[idx[r]] << '\t'
         << format_double(mean[idx[r]]) << '\n';
  }
  return os.str();
}

void validate_distribution(const DiscreteDistribution& dist) {
  if (dist.mass.size() < 1) throw error("distribution: empty support");
  if (!dist.mass.allFinite()) throw error("distribution: non-finite mass");
  if (dist.mass.minCoeff() < 0.0) throw error("distribution: negative mass");
  if (std::abs(dist.mass.sum() - 1.0) > 1e-12)
    throw error("distribution: mass must sum to 1 within 1e-12");
}

OptimalDiscriminator optimal_discriminator(const std::vector<DiscreteDistribution>& p,
                                           const std::vector<DiscreteDistribution>& q) {
  const int M = static_cast<int>(p.size());
  if (M == 0) throw error("optimal_discriminator: no distributions");
  if (static_cast<int>(q.size()) != M)
    throw error("optimal_discriminator: p and q counts differ");
  const long S = p[0].mass.size();
  for (const auto& dist : p) {
    validate_distribution(dist);
    if (dist.mass.size() != S) throw error("optimal_discriminator: mismatched supports");
  }
  for (const auto& dist : q) {
    validate_distribution(dist);
    if (dist.mass.size() != S) throw error("optimal_discriminator: mismatched supports");
  }
  OptimalDiscriminator out;
  std::vector<Eigen::RowVectorXd> rows;
  for (long s = 0; s < S; s++) {
    double tot = 0.0;
    for (int m = 0; m < M; m++) tot += p[m].mass[s] + q[m].mass[s];
    if (tot == 0.0) continue;  // no mass reaches this point; the pairing term is undefined
    Eigen::RowVectorXd row(2 * M);
    for (int m = 0; m < M; m++) {
      row[m] = p[m].mass[s] / tot;
      row[M + m] = q[m].mass[s] / tot;
    }
    out.points.push_back(static_cast<int>(s));
    rows.push_back(row);
  }
  out.d.resize(static_cast<long>(rows.size()), 2 * M);
  for (std::size_t r = 0; r < rows.size(); r++) out.d.row(static_cast<long>(r)) = rows[r];
  return out;
}

std::string ConvergenceReport::to_json() const {
  std::ostringstream os;
  os << "{\n";
  os << "  \"support_size\": " << support_size << ",\n";
  os << "  \"corpora\": " << corpora << ",\n";
  os << "  \"oracle\": " << (oracle ? "true" : "false") << ",\n";
  os << "  \"checkpoints\": [\n";
  for (std::size_t c = 0; c < checkpoints.size(); c++) {
    const auto& cp = checkpoints[c];
    os << "    {\"epoch\": " << cp.epoch << ", \"tv\": [";
    for (std::size_t m = 0; m < cp.tv.size(); m++)
      os << (m ? ", " : "") << format_double(cp.tv[m]);
    os << "], \"mean_tv\": " << format_double(cp.mean_tv)
       << ", \"supnorm_gap\": " << format_double(cp.supnorm_gap) << "}"
       << (c + 1 < checkpoints.size() ? "," : "") << "\n";
  }
  os << "  ]\n}\n";
  return os.str();
}

ConvergenceReport verify_convergence(const std::vector<DiscreteDistribution>& p,
                                const ConvergenceConfig& cfg) {
  const int M = static_cast<int>(p.size());
  if (M == 0) throw error("verify_convergence: no target distributions");
  const int S = static_cast<int>(p[0].mass.size());
  if (S < 2 || S > 16) throw error("verify_convergence: support size must be in [2, 16]");
  for (const auto& dist : p) {
    validate_distribution(dist);
    if (dist.mass.size() != S) throw error("verify_convergence: mismatched supports");
  }
  const bool oracle = !cfg.oracle_q.empty();
  if (oracle) {
    if (static_cast<int>(cfg.oracle_q.size()) != M)
      throw error("verify_convergence: oracle_q count must match p");
    for (const auto& dist : cfg.oracle_q) {
      validate_distribution(dist);
      if (dist.mass.size() != S) throw error("verify_convergence: mismatched oracle support");
    }
  }
  if (cfg.checkpoints < 1 || cfg.sample_draws < 1 || cfg.docs_per_corpus < 1 ||
      cfg.embed_dim < 1)
    throw error("verify_convergence: bad harness config");
  check_config(cfg.degan);

  // Synthetic documents: one-hot rows at vertices sampled from each p_m.
  Rng data_rng(cfg.degan.seed + 0x517cc1b7ull);
  std::vector<std::vector<TfIdfDoc>> corpora(M);
  for (int m = 0; m < M; m++) {
    for (int i = 0; i < cfg.docs_per_corpus; i++) {
      TfIdfDoc doc;
      doc.corpus_id = m;
      doc.label = m;
      doc.split = Split::train;
      doc.weights = {{sample_point(p[m], data_rng), 1.0}};
      corpora[m].push_back(std::move(doc));
    }
  }

  // Harness-internal seeds for the output layers and the discriminator's
  // first layer: a spread log-probability matrix and a small random embedding.
  Matrix lda_log(cfg.degan.hidden, S);
  for (int t = 0; t < cfg.degan.hidden; t++) {
    Vector row(S);
    for (int s = 0; s < S; s++) row[s] = data_rng.uniform(0.5, 1.5);
    row /= row.sum();
    lda_log.row(t) = row.array().log().matrix().transpose();
  }
  EmbeddingMatrix word_embed;
  word_embed.provenance = "convergence-harness";
  word_embed.data.resize(S, cfg.embed_dim);
  const double es = 0.5 / cfg.embed_dim;
  for (int s = 0; s < S; s++)
    for (int j = 0; j < cfg.embed_dim; j++) word_embed.data(s, j) = data_rng.uniform(-es, es);

  DeganState st = init_impl(corpora, lda_log, word_embed, cfg.degan,
                            oracle ? &cfg.oracle_q : nullptr);

  Rng eval_rng(cfg.degan.seed + 0x9e3779b9ull);
  auto measure = [&](int epoch) {
    ConvergenceCheckpoint cp;
    cp.epoch = epoch;
    std::vector<DiscreteDistribution> q(M);
    if (oracle) {
      q = cfg.oracle_q;  // known target; no need to estimate
    } else {
      for (int m = 0; m < M; m++) {
        Vector counts = Vector::Zero(S);
        for (int i = 0; i < cfg.sample_draws; i++) {
          Vector n(cfg.degan.noise_dim);
          for (int j = 0; j < cfg.degan.noise_dim; j++) n[j] = eval_rng.uniform(-1.0, 1.0);
          counts[argmax(degan_generate(st.gen, m, n))] += 1.0;
        }
        q[m].mass = counts / counts.sum();
      }
    }
    for (int m = 0; m < M; m++)
      cp.tv.push_back(0.5 * (q[m].mass - p[m].mass).cwiseAbs().sum());
    cp.mean_tv = std::accumulate(cp.tv.begin(), cp.tv.end(), 0.0) / M;

    OptimalDiscriminator opt = optimal_discriminator(p, q);
    double gap = 0.0;
    for (std::size_t r = 0; r < opt.points.size(); r++) {
      Vector post = mlp_forward(st.D, Vector::Unit(S, opt.points[r]));
      for (int j = 0; j < 2 * M; j++)
        gap = std::max(gap, std::abs(post[j] - opt.d(static_cast<long>(r), j)));
    }
    cp.supnorm_gap = gap;
    return cp;
  };

  ConvergenceReport report;
  report.support_size = S;
  report.corpora = M;
  report.oracle = oracle;
  report.checkpoints.push_back(measure(0));

  std::vector<int> stops;
  for (int c = 1; c <= cfg.checkpoints; c++) {
    int e = static_cast<int>(std::lround(
        static_cast<double>(cfg.degan.epochs) * c / cfg.checkpoints));
    if (e > 0 && (stops.empty() || e > stops.back())) stops.push_back(e);
  }
  for (int e : stops) {
    run_impl(st, corpora, cfg.degan, e, oracle ? &cfg.oracle_q : nullptr);
    report.checkpoints.push_back(measure(e));
  }
  return report;
}

}  // namespace corpusgan
