#include "corpusgan/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace corpusgan {

namespace {

Matrix init_rows(int rows, int dim, Rng& rng) {
  Matrix m(rows, dim);
  double scale = 0.5 / dim;
  for (int i = 0; i < rows; i++)
    for (int j = 0; j < dim; j++) m(i, j) = rng.uniform(-scale, scale);
  return m;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

EmbeddingMatrix train_skipgram(const std::vector<std::vector<std::string>>& docs,
                               const Vocabulary& vocab, const SkipGramConfig& cfg) {
  if (cfg.dim < 1 || cfg.window < 1 || cfg.negative_samples < 1)
    throw error("train_skipgram: dim, window and negative_samples must be >= 1");
  const int V = vocab.size();

  std::vector<std::vector<int>> sentences;
  std::vector<long long> counts(V, 0);
  long long train_words = 0;
  bool trainable = false;
  for (const auto& doc : docs) {
    std::vector<int> sen;
    for (const auto& tok : doc) {
      int idx = vocab.lookup(tok);
      if (idx >= 0) {
        sen.push_back(idx);
        counts[idx]++;
        train_words++;
      }
    }
    if (sen.size() >= 2) trainable = true;
    if (!sen.empty()) sentences.push_back(std::move(sen));
  }
  if (!trainable) throw error("train_skipgram: no document has two in-vocabulary tokens");

  Rng rng(cfg.seed);
  EmbeddingMatrix out;
  out.data = init_rows(V, cfg.dim, rng);
  if (cfg.epochs == 0) return out;

  // unigram^(3/4) negative-sampling table
  const std::size_t table_size = 1000000;
  std::vector<int> table(table_size);
  double norm = 0.0;
  for (int i = 0; i < V; i++) norm += std::pow(static_cast<double>(counts[i]), 0.75);
  {
    int i = 0;
    double cum = std::pow(static_cast<double>(counts[0]), 0.75) / norm;
    for (std::size_t t = 0; t < table_size; t++) {
      table[t] = i;
      if (static_cast<double>(t) / table_size > cum && i < V - 1) {
        i++;
        cum += std::pow(static_cast<double>(counts[i]), 0.75) / norm;
      }
    }
  }

  Matrix& syn0 = out.data;
  Matrix syn1neg = Matrix::Zero(V, cfg.dim);
  Vector neu1e(cfg.dim);

  const double alpha0 = cfg.learning_rate;
  const double total = static_cast<double>(cfg.epochs) * train_words + 1.0;
  long long processed = 0;

  for (int epoch = 0; epoch < cfg.epochs; epoch++) {
    for (const auto& sen : sentences) {
      const int n = static_cast<int>(sen.size());
      for (int pos = 0; pos < n; pos++) {
        double alpha = alpha0 * std::max(1.0 - processed / total, 1e-4);
        processed++;
        const int word = sen[pos];
        const int b = static_cast<int>(rng.uniform_index(cfg.window));
        for (int a = b; a < cfg.window * 2 + 1 - b; a++) {
          if (a == cfg.window) continue;
          const int c = pos - cfg.window + a;
          if (c < 0 || c >= n) continue;
          const int last = sen[c];
          neu1e.setZero();
          for (int d = 0; d < cfg.negative_samples + 1; d++) {
            int target;
            double label;
            if (d == 0) {
              target = word;
              label = 1.0;
            } else {
              target = table[rng.uniform_index(table_size)];
              if (target == word) continue;
              label = 0.0;
            }
            const double f = syn0.row(last).dot(syn1neg.row(target));
            const double g = (label - sigmoid(f)) * alpha;
            neu1e += g * syn1neg.row(target).transpose();
            syn1neg.row(target) += g * syn0.row(last);
          }
          syn0.row(last) += neu1e.transpose();
        }
      }
    }
  }
  return out;
}

std::string to_word2vec_text(const EmbeddingMatrix& E, const Vocabulary& vocab) {
  if (E.rows() != vocab.size()) throw error("to_word2vec_text: row count != vocabulary size");
  std::ostringstream os;
  os << E.rows() << ' ' << E.dim() << '\n';
  for (int i = 0; i < E.rows(); i++) {
    os << vocab.terms[i];
    for (int j = 0; j < E.dim(); j++) os << ' ' << format_double(E.data(i, j));
    os << '\n';
  }
  return os.str();
}

EmbeddingMatrix load_embeddings(const std::string& path, const Vocabulary& vocab,
                                int expected_dim, std::uint64_t seed,
                                EmbeddingLoadReport* report) {
  std::istringstream is(read_file(path));
  std::string line;
  if (!std::getline(is, line)) throw error(path + ": empty embedding file");
  auto header = split_ws(line);
  if (header.size() != 2) throw error(path + ": malformed header, want \"V dim\"");
  long file_rows = std::stol(header[0]);
  int dim = std::stoi(header[1]);
  if (file_rows < 0 || dim < 1) throw error(path + ": malformed header values");
  if (expected_dim > 0 && dim != expected_dim)
    throw error(path + ": dimension " + std::to_string(dim) + " does not match expected " +
                std::to_string(expected_dim));

  const int V = vocab.size();
  EmbeddingMatrix out;
  out.data.resize(V, dim);
  out.provenance = "file:" + path;
  std::vector<bool> seen(V, false);

  int lineno = 1;
  long parsed = 0;
  while (std::getline(is, line)) {
    lineno++;
    if (line.empty()) continue;
    auto cols = split_ws(line);
    if (static_cast<int>(cols.size()) != dim + 1)
      throw error(path + ": line " + std::to_string(lineno) + " has " +
                  std::to_string(cols.size() - 1) + " values, want " + std::to_string(dim));
    parsed++;
    int idx = vocab.lookup(cols[0]);
    if (idx < 0) continue;  // term outside this run's vocabulary
    for (int j = 0; j < dim; j++) out.data(idx, j) = std::stod(cols[1 + j]);
    seen[idx] = true;
  }
  if (parsed != file_rows)
    throw error(path + ": header declares " + std::to_string(file_rows) + " rows, file has " +
                std::to_string(parsed));

  Rng rng(seed);
  int missing = 0;
  double scale = 0.5 / dim;
  for (int i = 0; i < V; i++) {
    if (!seen[i]) {
      missing++;
      for (int j = 0; j < dim; j++) out.data(i, j) = rng.uniform(-scale, scale);
    }
  }
  if (report) {
    report->found = V - missing;
    report->missing = missing;
    report->coverage = V == 0 ? 0.0 : static_cast<double>(V - missing) / V;
  }
  return out;
}

Vector doc_embed(const std::map<int, double>& weights, const EmbeddingMatrix& E, Squash squash) {
  Vector v = Vector::Zero(E.dim());
  for (const auto& [idx, w] : weights) {
    if (idx < 0 || idx >= E.rows()) throw error("doc_embed: term index out of range");
    v += w * E.data.row(idx).transpose();
  }
  if (squash == Squash::tanh_squash) {
    // keep the contract |component| < 1 even where double tanh saturates to 1
    const double lim = std::nextafter(1.0, 0.0);
    v = v.array().tanh().min(lim).max(-lim);
  }
  return v;
}

std::vector<std::pair<int, double>> top_k_synonyms(const EmbeddingMatrix& E, int term_index,
                                                   int k) {
  const int V = E.rows();
  if (term_index < 0 || term_index >= V) throw error("top_k_synonyms: term index out of range");
  if (k < 1 || k >= V) throw error("top_k_synonyms: need 1 <= k < V");
  const double qnorm = E.data.row(term_index).norm();
  if (qnorm == 0.0) throw error("top_k_synonyms: query row has zero norm, similarity undefined");

  std::vector<std::pair<int, double>> scored;
  scored.reserve(V - 1);
  for (int i = 0; i < V; i++) {
    if (i == term_index) continue;
    const double n = E.data.row(i).norm();
    // zero-norm candidates rank below every real cosine
    const double cos = n == 0.0 ? -2.0 : E.data.row(i).dot(E.data.row(term_index)) / (n * qnorm);
    scored.emplace_back(i, cos);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  scored.resize(k);
  return scored;
}

SynonymDrift synonym_drift(const EmbeddingMatrix& before, const EmbeddingMatrix& after, int k) {
  if (before.rows() != after.rows())
    throw error("synonym_drift: matrices cover different vocabularies");
  const int V = before.rows();
  SynonymDrift out;
  int changed = 0;
  double total = 0.0;
  for (int i = 0; i < V; i++) {
    auto a = top_k_synonyms(before, i, k);
    auto b = top_k_synonyms(after, i, k);
    std::set<int> sa, sb;
    for (auto& [idx, cos] : a) sa.insert(idx);
    for (auto& [idx, cos] : b) sb.insert(idx);
    int common = 0;
    for (int idx : sa) common += sb.count(idx);
    int differing = k - common;
    total += differing;
    if (differing > 0) changed++;
  }
  out.mean_differing = total / V;
  out.changed_fraction = static_cast<double>(changed) / V;
  return out;
}

std::string synonym_report_tsv(const EmbeddingMatrix& E, const Vocabulary& vocab,
                               const std::vector<std::string>& query_terms, int k) {
  std::ostringstream os;
  os << "term\trank\tneighbor\tcosine\n";
  for (const auto& term : query_terms) {
    int idx = vocab.lookup(term);
    if (idx < 0) throw error("synonym_report_tsv: unknown term " + term);
    auto top = top_k_synonyms(E, idx, k);
    for (std::size_t r = 0; r < top.size(); r++) {
      os << term << '\t' << (r + 1) << '\t' << vocab.terms[top[r].first] << '\t'
         << format_double(top[r].second) << '\n';
    }
  }
  return os.str();
}

}  // namespace corpusgan
