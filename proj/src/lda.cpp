#include "corpusgan/lda.hpp"

#include <cmath>
#include <sstream>

namespace corpusgan {

TopicWordMatrix fit_lda(const std::vector<std::map<int, int>>& docs, int vocab_size,
                        const LdaConfig& cfg) {
  const int T = cfg.topics;
  const int V = vocab_size;
  if (T < 1) throw error("fit_lda: topics must be >= 1");
  if (cfg.iters < 1) throw error("fit_lda: iters must be >= 1");
  if (V < 1) throw error("fit_lda: vocab_size must be >= 1");
  const double alpha = cfg.alpha < 0 ? 50.0 / T : cfg.alpha;
  const double beta = cfg.beta;

  std::vector<std::vector<int>> tokens(docs.size());
  long total = 0;
  for (std::size_t d = 0; d < docs.size(); d++) {
    for (const auto& [term, count] : docs[d]) {
      if (term < 0 || term >= V) throw error("fit_lda: term index out of range");
      if (count < 0) throw error("fit_lda: negative count");
      for (int c = 0; c < count; c++) tokens[d].push_back(term);
      total += count;
    }
  }
  if (total == 0) throw error("fit_lda: corpus is empty");

  const int D = static_cast<int>(docs.size());
  std::vector<std::vector<int>> z(tokens.size());
  std::vector<long> n_dt(static_cast<std::size_t>(D) * T, 0);
  std::vector<long> n_tw(static_cast<std::size_t>(T) * V, 0);
  std::vector<long> n_t(T, 0);

  Rng rng(cfg.seed);
  for (int d = 0; d < D; d++) {
    z[d].resize(tokens[d].size());
    for (std::size_t i = 0; i < tokens[d].size(); i++) {
      const int t = static_cast<int>(rng.uniform_index(T));
      z[d][i] = t;
      n_dt[static_cast<std::size_t>(d) * T + t]++;
      n_tw[static_cast<std::size_t>(t) * V + tokens[d][i]]++;
      n_t[t]++;
    }
  }

  std::vector<double> p(T);
  for (int iter = 0; iter < cfg.iters; iter++) {
    for (int d = 0; d < D; d++) {
      for (std::size_t i = 0; i < tokens[d].size(); i++) {
        const int w = tokens[d][i];
        const int old = z[d][i];
        n_dt[static_cast<std::size_t>(d) * T + old]--;
        n_tw[static_cast<std::size_t>(old) * V + w]--;
        n_t[old]--;

        double sum = 0.0;
        for (int t = 0; t < T; t++) {
          sum += (n_dt[static_cast<std::size_t>(d) * T + t] + alpha) *
                 (n_tw[static_cast<std::size_t>(t) * V + w] + beta) / (n_t[t] + V * beta);
          p[t] = sum;
        }
        const double u = rng.uniform01() * sum;
        int pick = 0;
        while (pick < T - 1 && p[pick] < u) pick++;

        z[d][i] = pick;
        n_dt[static_cast<std::size_t>(d) * T + pick]++;
        n_tw[static_cast<std::size_t>(pick) * V + w]++;
        n_t[pick]++;
      }
    }
  }

  TopicWordMatrix out;
  out.phi.resize(T, V);
  for (int t = 0; t < T; t++)
    for (int w = 0; w < V; w++)
      out.phi(t, w) = (n_tw[static_cast<std::size_t>(t) * V + w] + beta) / (n_t[t] + V * beta);
  return out;
}

Matrix log_init(const TopicWordMatrix& phi, double floor) {
  if (floor <= 0) throw error("log_init: floor must be > 0");
  return phi.phi.array().max(floor).log();
}

std::string topic_word_tsv(const TopicWordMatrix& phi) {
  std::ostringstream os;
  for (int t = 0; t < phi.topics(); t++)
    for (int w = 0; w < phi.vocab(); w++)
      os << t << '\t' << w << '\t' << format_double(phi.phi(t, w)) << '\n';
  return os.str();
}

}  // namespace corpusgan
