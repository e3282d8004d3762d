#include "corpusgan/wegan.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace corpusgan {

namespace {

void check_inputs(const std::vector<std::vector<TfIdfDoc>>& corpora,
                  const std::vector<EmbeddingMatrix>& fixed, const EmbeddingMatrix& g_init,
                  const WeganConfig& cfg) {
  const int M = static_cast<int>(corpora.size());
  if (M == 0) throw error("wegan: no corpora");
  if (static_cast<int>(fixed.size()) != M) throw error("wegan: one fixed matrix per corpus required");
  const int K = cfg.labels > 0 ? cfg.labels : M;
  for (int m = 0; m < M; m++) {
    if (corpora[m].empty()) throw error("wegan: corpus " + std::to_string(m) + " has no documents");
    if (fixed[m].rows() != g_init.rows() || fixed[m].dim() != g_init.dim())
      throw error("wegan: fixed matrix " + std::to_string(m) + " shape differs from G");
    for (const auto& d : corpora[m]) {
      if (d.label < 0 || d.label >= K) throw error("wegan: document label out of range");
      if (!d.weights.empty() && d.weights.rbegin()->first >= g_init.rows())
        throw error("wegan: document term index out of vocabulary range");
    }
  }
  if (cfg.epochs < 0 || cfg.batch_per_corpus < 1) throw error("wegan: bad epoch/batch config");
  if (cfg.lr_start > cfg.lr_end) throw error("wegan: lr_start must be <= lr_end");
}

double ramp_lr(const WeganConfig& cfg, int epoch) {
  if (cfg.epochs <= 1) return cfg.lr_start;
  return cfg.lr_start + (cfg.lr_end - cfg.lr_start) * epoch / (cfg.epochs - 1);
}

}  // namespace

WeganState wegan_init(const std::vector<std::vector<TfIdfDoc>>& corpora,
                      const std::vector<EmbeddingMatrix>& fixed, const EmbeddingMatrix& g_init,
                      const WeganConfig& cfg) {
  check_inputs(corpora, fixed, g_init, cfg);
  const int M = static_cast<int>(corpora.size());
  const int K = cfg.labels > 0 ? cfg.labels : M;
  const int d = g_init.dim();

  Rng rng(cfg.seed);
  WeganState st;
  st.G = g_init;
  st.G.provenance = "wegan";
  st.D = make_mlp({d, cfg.discriminator_hidden, 1}, {Activation::tanh_act, Activation::sigmoid},
                  true, rng);
  st.C = make_mlp({d, cfg.classifier_hidden, K}, {Activation::tanh_act, Activation::softmax},
                  true, rng);
  st.rng_state = rng.save_state();
  return st;
}

void wegan_run(WeganState& st, const std::vector<std::vector<TfIdfDoc>>& corpora,
               const std::vector<EmbeddingMatrix>& fixed, const WeganConfig& cfg,
               int until_epoch) {
  check_inputs(corpora, fixed, st.G, cfg);
  const int M = static_cast<int>(corpora.size());
  until_epoch = std::min(until_epoch, cfg.epochs);
  if (st.epochs_done >= until_epoch) return;

  // original document embeddings g_i^m are fixed; compute once
  std::vector<std::vector<Vector>> originals(M);
  for (int m = 0; m < M; m++)
    for (const auto& doc : corpora[m])
      originals[m].push_back(doc_embed(doc.weights, fixed[m], Squash::tanh_squash));

  std::size_t max_docs = 0;
  for (int m = 0; m < M; m++) max_docs = std::max(max_docs, corpora[m].size());
  const int steps_per_epoch =
      static_cast<int>((max_docs + cfg.batch_per_corpus - 1) / cfg.batch_per_corpus);

  Rng rng(1);
  rng.load_state(st.rng_state);

  for (int epoch = st.epochs_done; epoch < until_epoch; epoch++) {
    const double lr = ramp_lr(cfg, epoch);
    // queues are rebuilt each epoch so a checkpoint at an epoch boundary
    // captures the full sampling state in the rng alone
    std::vector<BatchQueue> q1, q2;
    for (int m = 0; m < M; m++) {
      q1.emplace_back(static_cast<int>(corpora[m].size()));
      q2.emplace_back(static_cast<int>(corpora[m].size()));
    }

    double disc_sum = 0, gen_sum = 0, cls_sum = 0;
    long disc_n = 0, gen_n = 0, cls_n = 0;
    long correct = 0, judged = 0;

    for (int step = 0; step < steps_per_epoch; step++) {
      // step (a): update D and C on mini-batch S1
      std::vector<Vector> batch_orig, batch_fake;
      std::vector<int> batch_labels;
      for (int m = 0; m < M; m++) {
        for (int i : q1[m].draw(cfg.batch_per_corpus, rng)) {
          batch_orig.push_back(originals[m][i]);
          batch_fake.push_back(doc_embed(corpora[m][i].weights, st.G, Squash::tanh_squash));
          batch_labels.push_back(corpora[m][i].label);
        }
      }
      auto disc = wegan_disc_loss(st.D, batch_orig, batch_fake);
      const long n_terms = 2 * static_cast<long>(batch_orig.size());
      if (!std::isfinite(disc.loss))
        throw error("wegan: non-finite discriminator loss at epoch " + std::to_string(epoch) +
                    " step " + std::to_string(step));
      scale_grads(disc.grads, 1.0 / n_terms);
      sgd_step(st.D, disc.grads, lr);
      disc_sum += disc.loss;
      disc_n += n_terms;

      for (std::size_t i = 0; i < batch_orig.size(); i++) {
        if (mlp_forward(st.D, batch_orig[i])[0] > 0.5) correct++;
        if (mlp_forward(st.D, batch_fake[i])[0] < 0.5) correct++;
        judged += 2;
      }

      auto cls = classifier_nll(st.C, batch_fake, batch_labels);
      if (!std::isfinite(cls.loss))
        throw error("wegan: non-finite classifier loss at epoch " + std::to_string(epoch) +
                    " step " + std::to_string(step));
      scale_grads(cls.grads, 1.0 / static_cast<long>(batch_fake.size()));
      sgd_step(st.C, cls.grads, lr);
      cls_sum += cls.loss;
      cls_n += static_cast<long>(batch_fake.size());

      // step (b): update G on an independent mini-batch S2
      std::vector<TfIdfDoc> batch_docs;
      for (int m = 0; m < M; m++)
        for (int i : q2[m].draw(cfg.batch_per_corpus, rng)) batch_docs.push_back(corpora[m][i]);
      auto gen = wegan_gen_loss(st.D, st.C, st.G, batch_docs);
      if (!std::isfinite(gen.loss))
        throw error("wegan: non-finite embedding loss at epoch " + std::to_string(epoch) +
                    " step " + std::to_string(step));
      const double g_lr = lr * cfg.g_lr_scale / static_cast<double>(batch_docs.size());
      for (const auto& [idx, grad] : gen.g_grads) {
        if (!grad.allFinite())
          throw error("wegan: non-finite embedding gradient at epoch " + std::to_string(epoch));
        st.G.data.row(idx) -= g_lr * grad.transpose();
      }
      gen_sum += gen.loss;
      gen_n += static_cast<long>(batch_docs.size());
    }

    WeganEpochMetrics m;
    m.epoch = epoch;
    m.lr = lr;
    m.disc_loss = disc_sum / disc_n;
    m.gen_loss = gen_sum / gen_n;
    m.cls_loss = cls_sum / cls_n;
    m.disc_accuracy = judged ? static_cast<double>(correct) / judged : 0.0;
    st.history.push_back(m);
    st.epochs_done = epoch + 1;
    st.rng_state = rng.save_state();
  }
}

WeganState train_wegan(const std::vector<std::vector<TfIdfDoc>>& corpora,
                       const std::vector<EmbeddingMatrix>& fixed, const EmbeddingMatrix& g_init,
                       const WeganConfig& cfg) {
  WeganState st = wegan_init(corpora, fixed, g_init, cfg);
  wegan_run(st, corpora, fixed, cfg, cfg.epochs);
  return st;
}

double wegan_classifier_accuracy(const WeganState& st,
                                 const std::vector<std::vector<TfIdfDoc>>& corpora) {
  long correct = 0, total = 0;
  for (const auto& corpus : corpora) {
    for (const auto& doc : corpus) {
      Vector y = mlp_forward(st.C, doc_embed(doc.weights, st.G, Squash::tanh_squash));
      int argmax = 0;
      for (int k = 1; k < y.size(); k++)
        if (y[k] > y[argmax]) argmax = k;
      if (argmax == doc.label) correct++;
      total++;
    }
  }
  if (total == 0) throw error("wegan_classifier_accuracy: no documents");
  return static_cast<double>(correct) / total;
}

void write_wegan_state(std::ostream& os, const WeganState& st) {
  os << "wegan-state 1\n";
  os << "epochs_done " << st.epochs_done << '\n';
  os << "rng " << st.rng_state << '\n';
  os << "G " << (st.G.provenance.empty() ? "-" : st.G.provenance) << '\n';
  write_matrix(os, st.G.data);
  write_mlp(os, st.D);
  write_mlp(os, st.C);
  os << "history " << st.history.size() << '\n';
  for (const auto& m : st.history) {
    os << m.epoch << ' ' << format_double(m.lr) << ' ' << format_double(m.disc_loss) << ' '
       << format_double(m.gen_loss) << ' ' << format_double(m.cls_loss) << ' '
       << format_double(m.disc_accuracy) << '\n';
  }
}

WeganState read_wegan_state(std::istream& is) {
  std::string tag;
  int version = 0;
  is >> tag >> version;
  if (!is || tag != "wegan-state" || version != 1)
    throw error("read_wegan_state: bad header/version");
  WeganState st;
  is >> tag >> st.epochs_done;
  if (!is || tag != "epochs_done") throw error("read_wegan_state: missing epochs_done");
  is >> tag;
  if (tag != "rng") throw error("read_wegan_state: missing rng");
  std::getline(is, st.rng_state);
  if (!st.rng_state.empty() && st.rng_state.front() == ' ') st.rng_state.erase(0, 1);
  is >> tag >> st.G.provenance;
  if (tag != "G") throw error("read_wegan_state: missing G");
  if (st.G.provenance == "-") st.G.provenance.clear();
  st.G.data = read_matrix(is);
  st.D = read_mlp(is);
  st.C = read_mlp(is);
  std::size_t n = 0;
  is >> tag >> n;
  if (!is || tag != "history") throw error("read_wegan_state: missing history");
  st.history.resize(n);
  for (auto& m : st.history) {
    is >> m.epoch >> m.lr >> m.disc_loss >> m.gen_loss >> m.cls_loss >> m.disc_accuracy;
    if (!is) throw error("read_wegan_state: truncated history");
  }
  return st;
}

std::string wegan_metrics_csv(const WeganState& st) {
  std::ostringstream os;
  os << "epoch,lr,disc_loss,gen_loss,cls_loss,disc_accuracy\n";
  for (const auto& m : st.history) {
    os << m.epoch << ',' << format_double(m.lr) << ',' << format_double(m.disc_loss) << ','
       << format_double(m.gen_loss) << ',' << format_double(m.cls_loss) << ','
       << format_double(m.disc_accuracy) << '\n';
  }
  return os.str();
}

}  // namespace corpusgan
