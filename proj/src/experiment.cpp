#include "corpusgan/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "corpusgan/corpus.hpp"

namespace fs = std::filesystem;

namespace corpusgan {
namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> k = {
      {"data",
       {"root", "manifest", "train_ratio", "validation_ratio", "test_ratio", "v_max"}},
      {"embedding", {"dim", "window", "negatives", "epochs", "lr", "seed"}},
      {"lda", {"topics", "alpha", "beta", "iters", "seed"}},
      {"wegan",
       {"epochs", "batch", "lr_start", "lr_end", "classifier_hidden", "discriminator_hidden",
        "g_lr_scale"}},
      {"degan", {"epochs", "batch", "lr_d", "lr_g", "noise_dim", "hidden", "disc_hidden"}},
      {"train", {"checkpoint_every"}},
      {"eval",
       {"seeds", "finetune_epochs", "finetune_batch", "finetune_lr", "kmeans_iters",
        "projection_samples", "synonym_terms", "synonym_k"}},
      {"output", {"dir"}},
  };
  return k;
}

std::string stamp(const ExperimentConfig& cfg) { return "# config " + hex64(cfg.hash) + "\n"; }

std::string stamp(const ExperimentConfig& cfg, std::uint64_t seed) {
  return "# config " + hex64(cfg.hash) + " seed " + std::to_string(seed) + "\n";
}

void ensure_dir(const fs::path& p) { fs::create_directories(p); }

std::string weights_field(const std::map<int, double>& w) {
  if (w.empty()) return "-";
  std::ostringstream os;
  bool first = true;
  for (const auto& [t, v] : w) {
    if (!first) os << ' ';
    first = false;
    os << t << ':' << format_double(v);
  }
  return os.str();
}

std::map<int, double> parse_weights(const std::string& field) {
  std::map<int, double> w;
  if (field == "-") return w;
  for (const std::string& pair : split_ws(field)) {
    const std::size_t colon = pair.find(':');
    if (colon == std::string::npos) throw error("docs tsv: malformed weight pair: " + pair);
    w[std::stoi(pair.substr(0, colon))] = std::stod(pair.substr(colon + 1));
  }
  return w;
}

std::string counts_field(const std::map<int, int>& c) {
  if (c.empty()) return "-";
  std::ostringstream os;
  bool first = true;
  for (const auto& [t, n] : c) {
    if (!first) os << ' ';
    first = false;
    os << t << ':' << n;
  }
  return os.str();
}

std::map<int, int> parse_counts(const std::string& field) {
  std::map<int, int> c;
  if (field == "-") return c;
  for (const std::string& pair : split_ws(field)) {
    const std::size_t colon = pair.find(':');
    if (colon == std::string::npos) throw error("counts tsv: malformed count pair: " + pair);
    c[std::stoi(pair.substr(0, colon))] = std::stoi(pair.substr(colon + 1));
  }
  return c;
}

// Grouped raw corpora in final corpus order, with ids rewritten.
std::vector<RawCorpus> group_corpora(std::vector<RawCorpus> loaded, const ExperimentConfig& cfg) {
  if (cfg.groups.empty()) return loaded;
  std::map<std::string, std::string> subdir_to_group;
  for (const auto& [group, dirs] : cfg.groups)
    for (const std::string& d : dirs) {
      if (subdir_to_group.count(d))
        throw error("groups: subdirectory listed twice: " + d);
      subdir_to_group[d] = group;
    }
  std::map<std::string, RawCorpus> merged;
  std::set<std::string> seen_dirs;
  for (RawCorpus& c : loaded) {
    auto it = subdir_to_group.find(c.name);
    if (it == subdir_to_group.end()) continue;  // unmapped subdirectories are dropped
    seen_dirs.insert(c.name);
    RawCorpus& g = merged[it->second];
    g.name = it->second;
    for (RawDocument& d : c.documents) g.documents.push_back(std::move(d));
  }
  for (const auto& [d, g] : subdir_to_group)
    if (!seen_dirs.count(d)) throw error("groups: subdirectory not found under root: " + d);
  std::vector<RawCorpus> out;
  for (auto& [name, c] : merged) {
    if (c.documents.empty()) throw error("groups: corpus " + name + " has no documents");
    c.corpus_id = static_cast<int>(out.size());
    out.push_back(std::move(c));
  }
  return out;
}

std::uint64_t prepare_input_hash(const ExperimentConfig& cfg,
                                 const std::vector<RawCorpus>& corpora) {
  std::ostringstream meta;
  meta << "v_max " << cfg.v_max << "\nratios " << format_double(cfg.train_ratio) << ' '
       << format_double(cfg.validation_ratio) << ' ' << format_double(cfg.test_ratio)
       << "\nskipgram " << cfg.skipgram.dim << ' ' << cfg.skipgram.window << ' '
       << cfg.skipgram.negative_samples << ' ' << cfg.skipgram.epochs << ' '
       << format_double(cfg.skipgram.learning_rate) << ' ' << cfg.skipgram.seed << "\n";
  for (const RawCorpus& c : corpora) {
    meta << "corpus " << c.name << "\n";
    for (const RawDocument& d : c.documents)
      meta << d.relpath << ' ' << split_name(d.split) << ' ' << hex64(fnv1a64(d.text)) << "\n";
  }
  return fnv1a64(meta.str());
}

struct CsvRow {
  std::uint64_t seed = 0;
  std::string arm;       // "w2v", "wegan", "degan"
  double ri = -1.0;      // < 0 = absent
  double accuracy = -1.0;
  int best_epoch = -1;
};

std::string metrics_csv(const ExperimentConfig& cfg, const std::vector<CsvRow>& rows) {
  std::ostringstream os;
  os << stamp(cfg);
  os << "run,seed,arm,ri,accuracy,best_epoch\n";
  for (const CsvRow& r : rows) {
    os << hex64(cfg.hash) << ',' << r.seed << ',' << r.arm << ',';
    if (r.ri >= 0.0) os << format_double(r.ri);
    os << ',';
    if (r.accuracy >= 0.0) os << format_double(r.accuracy);
    os << ',';
    if (r.best_epoch >= 0) os << r.best_epoch;
    os << '\n';
  }
  return os.str();
}

std::vector<CsvRow> parse_metrics_csv(const std::string& text) {
  std::vector<CsvRow> rows;
  std::istringstream is(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // column header
      continue;
    }
    const auto cols = split_char(line, ',');
    if (cols.size() != 6) throw error("metrics csv: expected 6 columns: " + line);
    CsvRow r;
    r.seed = std::stoull(cols[1]);
    r.arm = cols[2];
    if (!cols[3].empty()) r.ri = std::stod(cols[3]);
    if (!cols[4].empty()) r.accuracy = std::stod(cols[4]);
    if (!cols[5].empty()) r.best_epoch = std::stoi(cols[5]);
    rows.push_back(r);
  }
  return rows;
}

struct ColumnStats {
  std::vector<double> values;
  bool present() const { return values.size() >= 1; }
  double mean() const {
    double s = 0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
  }
  double sd() const {
    if (values.size() < 2) return 0.0;
    const double m = mean();
    double s = 0;
    for (double v : values) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(values.size() - 1));
  }
};

std::string percent(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * x);
  return buf;
}

std::string summary_table(const std::map<std::string, ColumnStats>& cols) {
  static const char* order[] = {"w2v-RI", "weGAN-RI", "w2v-accuracy", "weGAN-accuracy",
                                "deGAN-accuracy"};
  std::ostringstream os;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-6s", "");
  os << buf;
  for (const char* name : order) {
    std::snprintf(buf, sizeof buf, "%16s", name);
    os << buf;
  }
  os << '\n';
  for (const char* row : {"mean", "sd"}) {
    std::snprintf(buf, sizeof buf, "%-6s", row);
    os << buf;
    for (const char* name : order) {
      auto it = cols.find(name);
      std::string cell = "absent";
      if (it != cols.end() && it->second.present())
        cell = std::string(row[0] == 'm' ? percent(it->second.mean()) : percent(it->second.sd()));
      std::snprintf(buf, sizeof buf, "%16s", cell.c_str());
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

std::map<std::string, ColumnStats> collect_columns(const std::vector<CsvRow>& rows) {
  std::map<std::string, ColumnStats> cols;
  for (const CsvRow& r : rows) {
    if (r.arm == "w2v") {
      if (r.ri >= 0.0) cols["w2v-RI"].values.push_back(r.ri);
      if (r.accuracy >= 0.0) cols["w2v-accuracy"].values.push_back(r.accuracy);
    } else if (r.arm == "wegan") {
      if (r.ri >= 0.0) cols["weGAN-RI"].values.push_back(r.ri);
      if (r.accuracy >= 0.0) cols["weGAN-accuracy"].values.push_back(r.accuracy);
    } else if (r.arm == "degan") {
      if (r.accuracy >= 0.0) cols["deGAN-accuracy"].values.push_back(r.accuracy);
    }
  }
  return cols;
}

std::string significance_blocks(const std::map<std::string, ColumnStats>& cols) {
  std::ostringstream os;
  const std::pair<const char*, const char*> pairs[] = {
      {"weGAN-RI", "w2v-RI"},
      {"weGAN-accuracy", "w2v-accuracy"},
      {"deGAN-accuracy", "w2v-accuracy"},
  };
  for (const auto& [treat, base] : pairs) {
    auto t = cols.find(treat), b = cols.find(base);
    if (t == cols.end() || b == cols.end()) continue;
    if (t->second.values.size() < 2 || b->second.values.size() < 2) {
      os << "metric: " << treat << " vs " << base << ": needs >= 2 seeds per arm\n\n";
      continue;
    }
    RunStats s = compare_runs(t->second.values, b->second.values);
    os << significance_report(std::string(treat) + " vs " + base, s) << "\n";
  }
  return os.str();
}

Vector dense_weights(const std::map<int, double>& w, int dim) {
  Vector v = Vector::Zero(dim);
  for (const auto& [t, x] : w) v[t] = x;
  return v;
}

// One labeled example per document under the chosen representation.
LabeledSet make_set(const std::vector<std::vector<TfIdfDoc>>& docs, Split split,
                    const std::function<Vector(const TfIdfDoc&)>& rep) {
  LabeledSet s;
  for (const auto& corpus : docs)
    for (const TfIdfDoc& d : corpus)
      if (d.split == split) {
        s.x.push_back(rep(d));
        s.y.push_back(d.label);
      }
  return s;
}

std::string state_path(const ExperimentConfig& cfg, const std::string& model,
                       std::uint64_t seed) {
  return (fs::path(cfg.out_dir) / "train" / model / ("seed" + std::to_string(seed)) /
          "state.txt")
      .string();
}

Matrix load_or_fit_lda(const ExperimentConfig& cfg, const PreparedData& data, std::ostream& log) {
  const fs::path dir = fs::path(cfg.out_dir) / "train";
  ensure_dir(dir);
  const fs::path cache = dir / "lda_log.txt";
  if (fs::is_regular_file(cache)) {
    std::ifstream is(cache);
    return read_matrix(is);
  }
  std::vector<std::map<int, int>> train_counts;
  for (int m = 0; m < data.corpora(); m++)
    for (std::size_t i = 0; i < data.counts[m].size(); i++)
      if (data.docs[m][i].split == Split::train && !data.counts[m][i].empty())
        train_counts.push_back(data.counts[m][i]);
  log << "lda: fitting " << cfg.lda.topics << " topics on " << train_counts.size()
      << " training documents\n";
  TopicWordMatrix phi = fit_lda(train_counts, data.vocab.size(), cfg.lda);
  const Matrix lda_log = log_init(phi, 1e-12);
  std::ofstream os(cache);
  write_matrix(os, lda_log);
  os << stamp(cfg);
  write_file((dir / "lda_topics.tsv").string(), stamp(cfg) + topic_word_tsv(phi));
  return lda_log;
}

}  // namespace

ExperimentConfig experiment_from_config(const ConfigFile& c) {
  for (const auto& [section, kv] : c.sections) {
    if (section == "groups") continue;  // free-form corpus names
    auto it = known_keys().find(section);
    if (it == known_keys().end()) throw error("config: unknown section [" + section + "]");
    for (const auto& [key, value] : kv)
      if (!it->second.count(key))
        throw error("config: unknown key " + section + "." + key);
  }

  ExperimentConfig e;
  e.data_root = c.get("data", "root", "");
  e.manifest = c.get("data", "manifest", e.manifest);
  e.train_ratio = c.get_real("data", "train_ratio", e.train_ratio);
  e.validation_ratio = c.get_real("data", "validation_ratio", e.validation_ratio);
  e.test_ratio = c.get_real("data", "test_ratio", e.test_ratio);
  e.v_max = c.get_int("data", "v_max", e.v_max);
  if (e.v_max < 1) throw error("config: data.v_max must be >= 1");
  if (e.train_ratio <= 0 || e.validation_ratio < 0 || e.test_ratio < 0)
    throw error("config: split ratios must be positive (train) and non-negative");

  auto g = c.sections.find("groups");
  if (g != c.sections.end())
    for (const auto& [group, dirs] : g->second) e.groups[group] = split_ws(dirs);

  e.skipgram.dim = c.get_int("embedding", "dim", e.skipgram.dim);
  e.skipgram.window = c.get_int("embedding", "window", e.skipgram.window);
  e.skipgram.negative_samples = c.get_int("embedding", "negatives", e.skipgram.negative_samples);
  e.skipgram.epochs = c.get_int("embedding", "epochs", e.skipgram.epochs);
  e.skipgram.learning_rate = c.get_real("embedding", "lr", e.skipgram.learning_rate);
  e.skipgram.seed = c.get_u64("embedding", "seed", e.skipgram.seed);

  e.lda.topics = c.get_int("lda", "topics", e.lda.topics);
  e.lda.alpha = c.get_real("lda", "alpha", e.lda.alpha);
  e.lda.beta = c.get_real("lda", "beta", e.lda.beta);
  e.lda.iters = c.get_int("lda", "iters", e.lda.iters);
  e.lda.seed = c.get_u64("lda", "seed", e.lda.seed);

  e.wegan.epochs = c.get_int("wegan", "epochs", e.wegan.epochs);
  e.wegan.batch_per_corpus = c.get_int("wegan", "batch", e.wegan.batch_per_corpus);
  e.wegan.lr_start = c.get_real("wegan", "lr_start", e.wegan.lr_start);
  e.wegan.lr_end = c.get_real("wegan", "lr_end", e.wegan.lr_end);
  e.wegan.classifier_hidden = c.get_int("wegan", "classifier_hidden", e.wegan.classifier_hidden);
  e.wegan.discriminator_hidden =
      c.get_int("wegan", "discriminator_hidden", e.wegan.discriminator_hidden);
  e.wegan.g_lr_scale = c.get_real("wegan", "g_lr_scale", e.wegan.g_lr_scale);

  e.degan.epochs = c.get_int("degan", "epochs", e.degan.epochs);
  e.degan.batch_per_corpus = c.get_int("degan", "batch", e.degan.batch_per_corpus);
  e.degan.lr_d = c.get_real("degan", "lr_d", e.degan.lr_d);
  e.degan.lr_g = c.get_real("degan", "lr_g", e.degan.lr_g);
  e.degan.noise_dim = c.get_int("degan", "noise_dim", e.degan.noise_dim);
  e.degan.hidden = c.get_int("degan", "hidden", e.lda.topics);
  e.degan.disc_hidden = c.get_int("degan", "disc_hidden", e.degan.disc_hidden);
  if (e.degan.hidden != e.lda.topics)
    throw error("config: degan.hidden must equal lda.topics (generator output layers are "
                "seeded from the topic-word matrix)");

  e.checkpoint_every = c.get_int("train", "checkpoint_every", e.checkpoint_every);
  if (e.checkpoint_every < 1) throw error("config: train.checkpoint_every must be >= 1");

  if (c.has("eval", "seeds")) e.seeds = c.get_u64_list("eval", "seeds");
  if (e.seeds.empty()) throw error("config: eval.seeds must not be empty");
  e.finetune.epochs = c.get_int("eval", "finetune_epochs", e.finetune.epochs);
  e.finetune.batch = c.get_int("eval", "finetune_batch", e.finetune.batch);
  e.finetune.lr = c.get_real("eval", "finetune_lr", e.finetune.lr);
  e.kmeans_iters = c.get_int("eval", "kmeans_iters", e.kmeans_iters);
  e.projection_samples = c.get_int("eval", "projection_samples", e.projection_samples);
  e.synonym_terms = c.get_list("eval", "synonym_terms");
  e.synonym_k = c.get_int("eval", "synonym_k", e.synonym_k);

  e.out_dir = c.get("output", "dir", e.out_dir);
  e.hash = config_hash(c);
  return e;
}

std::vector<std::vector<TfIdfDoc>> PreparedData::split_docs(Split s) const {
  std::vector<std::vector<TfIdfDoc>> out(docs.size());
  for (std::size_t m = 0; m < docs.size(); m++)
    for (const TfIdfDoc& d : docs[m])
      if (d.split == s) out[m].push_back(d);
  return out;
}

bool cmd_prepare(const ExperimentConfig& cfg, std::ostream& log) {
  if (cfg.data_root.empty()) throw error("prepare: data.root is not configured");
  CorpusLoadOptions opts;
  opts.manifest = cfg.manifest;
  opts.train_ratio = cfg.train_ratio;
  opts.validation_ratio = cfg.validation_ratio;
  opts.test_ratio = cfg.test_ratio;
  std::vector<RawCorpus> corpora = group_corpora(load_corpora(cfg.data_root, opts), cfg);
  for (const RawCorpus& c : corpora)
    if (c.documents.empty()) throw error("prepare: corpus " + c.name + " is empty");

  const fs::path dir = fs::path(cfg.out_dir) / "prepared";
  const std::string input_hash = hex64(prepare_input_hash(cfg, corpora));
  const fs::path hash_file = dir / "input_hash.txt";
  if (fs::is_regular_file(hash_file) && read_file(hash_file.string()) == input_hash + "\n") {
    log << "prepare: up to date (input hash " << input_hash << ")\n";
    return false;
  }
  ensure_dir(dir);

  // tokenize everything once
  std::vector<std::vector<std::vector<std::string>>> tokens(corpora.size());
  std::vector<std::vector<std::string>> train_tokens;
  int n_train = 0;
  for (std::size_t m = 0; m < corpora.size(); m++) {
    tokens[m].reserve(corpora[m].documents.size());
    for (const RawDocument& d : corpora[m].documents) {
      tokens[m].push_back(tokenize(d.text));
      if (d.split == Split::train) {
        train_tokens.push_back(tokens[m].back());
        n_train++;
      }
    }
  }
  log << "prepare: " << corpora.size() << " corpora, " << n_train << " training documents\n";
  const Vocabulary vocab = build_vocabulary(train_tokens, cfg.v_max);
  log << "prepare: vocabulary " << vocab.size() << " terms\n";

  std::ostringstream docs_tsv, counts_tsv, corpora_tsv;
  docs_tsv << stamp(cfg) << "corpus\tdoc\trelpath\tsplit\tlabel\tdegenerate\tweights\n";
  counts_tsv << stamp(cfg) << "corpus\tdoc\tcounts\n";
  corpora_tsv << stamp(cfg) << "corpus\tname\ttrain\tvalidation\ttest\n";
  for (std::size_t m = 0; m < corpora.size(); m++) {
    int by_split[3] = {0, 0, 0};
    for (std::size_t i = 0; i < corpora[m].documents.size(); i++) {
      const RawDocument& d = corpora[m].documents[i];
      by_split[static_cast<int>(d.split)]++;
      bool degenerate = false;
      const std::map<int, double> w =
          l1_normalize(tf_idf(tokens[m][i], vocab, n_train), &degenerate);
      docs_tsv << m << '\t' << i << '\t' << d.relpath << '\t' << split_name(d.split) << '\t' << m
               << '\t' << (degenerate ? 1 : 0) << '\t' << weights_field(degenerate ? std::map<int, double>{} : w)
               << '\n';
      std::map<int, int> counts;
      for (const std::string& t : tokens[m][i]) {
        const int idx = vocab.lookup(t);
        if (idx >= 0) counts[idx]++;
      }
      counts_tsv << m << '\t' << i << '\t' << counts_field(counts) << '\n';
    }
    corpora_tsv << m << '\t' << corpora[m].name << '\t' << by_split[0] << '\t' << by_split[1]
                << '\t' << by_split[2] << '\n';
  }
  write_file((dir / "docs.tsv").string(), docs_tsv.str());
  write_file((dir / "counts.tsv").string(), counts_tsv.str());
  write_file((dir / "corpora.tsv").string(), corpora_tsv.str());
  write_file((dir / "vocab.tsv").string(), vocab.to_tsv());

  for (std::size_t m = 0; m < corpora.size(); m++) {
    std::vector<std::vector<std::string>> corpus_train;
    for (std::size_t i = 0; i < corpora[m].documents.size(); i++)
      if (corpora[m].documents[i].split == Split::train) corpus_train.push_back(tokens[m][i]);
    SkipGramConfig sc = cfg.skipgram;
    sc.seed = cfg.skipgram.seed + m;
    EmbeddingMatrix E = train_skipgram(corpus_train, vocab, sc);
    E.provenance = "corpus:" + corpora[m].name;
    write_file((dir / ("emb_corpus" + std::to_string(m) + ".vec")).string(),
               to_word2vec_text(E, vocab));
    log << "prepare: embeddings for corpus " << corpora[m].name << "\n";
  }
  EmbeddingMatrix all = train_skipgram(train_tokens, vocab, cfg.skipgram);
  all.provenance = "all";
  write_file((dir / "emb_all.vec").string(), to_word2vec_text(all, vocab));
  log << "prepare: pooled embeddings\n";

  // stamp manifest covering the strict-format files
  std::ostringstream st;
  st << stamp(cfg);
  for (const char* f : {"docs.tsv", "counts.tsv", "corpora.tsv", "vocab.tsv", "emb_all.vec"})
    st << f << ' ' << hex64(fnv1a64(read_file((dir / f).string()))) << '\n';
  write_file((dir / "stamp.txt").string(), st.str());
  write_file(hash_file.string(), input_hash + "\n");
  log << "prepare: done (input hash " << input_hash << ")\n";
  return true;
}

PreparedData load_prepared(const ExperimentConfig& cfg) {
  const fs::path dir = fs::path(cfg.out_dir) / "prepared";
  if (!fs::is_regular_file(dir / "input_hash.txt"))
    throw error("prepared data not found under " + dir.string() + "; run prepare first");
  PreparedData data;
  data.vocab = Vocabulary::from_tsv(read_file((dir / "vocab.tsv").string()));

  {
    std::istringstream is(read_file((dir / "corpora.tsv").string()));
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (!header) {
        header = true;
        continue;
      }
      const auto cols = split_char(line, '\t');
      if (cols.size() != 5) throw error("corpora.tsv: expected 5 columns: " + line);
      data.corpus_names.push_back(cols[1]);
    }
  }
  const int M = static_cast<int>(data.corpus_names.size());
  if (M == 0) throw error("corpora.tsv lists no corpora");
  data.docs.resize(M);
  data.counts.resize(M);

  {
    std::istringstream is(read_file((dir / "docs.tsv").string()));
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (!header) {
        header = true;
        continue;
      }
      const auto cols = split_char(line, '\t');
      if (cols.size() != 7) throw error("docs.tsv: expected 7 columns: " + line);
      const int m = std::stoi(cols[0]);
      if (m < 0 || m >= M) throw error("docs.tsv: corpus id out of range: " + line);
      TfIdfDoc d;
      d.corpus_id = m;
      d.split = split_from_name(cols[3]);
      d.label = std::stoi(cols[4]);
      d.degenerate = cols[5] == "1";
      d.weights = parse_weights(cols[6]);
      data.docs[m].push_back(std::move(d));
    }
  }
  {
    std::istringstream is(read_file((dir / "counts.tsv").string()));
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (!header) {
        header = true;
        continue;
      }
      const auto cols = split_char(line, '\t');
      if (cols.size() != 3) throw error("counts.tsv: expected 3 columns: " + line);
      const int m = std::stoi(cols[0]);
      if (m < 0 || m >= M) throw error("counts.tsv: corpus id out of range: " + line);
      data.counts[m].push_back(parse_counts(cols[2]));
    }
  }
  for (int m = 0; m < M; m++)
    if (data.counts[m].size() != data.docs[m].size())
      throw error("prepared data: docs and counts disagree for corpus " + std::to_string(m));

  for (int m = 0; m < M; m++) {
    data.per_corpus.push_back(load_embeddings(
        (dir / ("emb_corpus" + std::to_string(m) + ".vec")).string(), data.vocab, 0, 1));
    data.per_corpus.back().provenance = "corpus:" + data.corpus_names[m];
  }
  data.all_docs = load_embeddings((dir / "emb_all.vec").string(), data.vocab, 0, 1);
  data.all_docs.provenance = "all";
  return data;
}

void cmd_train(const ExperimentConfig& cfg, const std::string& model, std::ostream& log) {
  if (model != "wegan" && model != "degan")
    throw error("train: unknown model " + model + " (wegan or degan)");
  const PreparedData data = load_prepared(cfg);
  const auto train = data.split_docs(Split::train);

  Matrix lda_log;
  if (model == "degan") lda_log = load_or_fit_lda(cfg, data, log);

  for (const std::uint64_t seed : cfg.seeds) {
    const fs::path dir = fs::path(cfg.out_dir) / "train" / model / ("seed" + std::to_string(seed));
    ensure_dir(dir);
    const std::string spath = state_path(cfg, model, seed);

    if (model == "wegan") {
      WeganConfig wc = cfg.wegan;
      wc.seed = seed;
      WeganState st;
      if (fs::is_regular_file(spath)) {
        std::ifstream is(spath);
        st = read_wegan_state(is);
        if (st.epochs_done >= wc.epochs) {
          log << "wegan seed " << seed << ": up to date (" << st.epochs_done << " epochs)\n";
          continue;
        }
        log << "wegan seed " << seed << ": resuming from epoch " << st.epochs_done << "\n";
      } else {
        st = wegan_init(train, data.per_corpus, data.all_docs, wc);
      }
      while (st.epochs_done < wc.epochs) {
        const int until = std::min(wc.epochs, st.epochs_done + cfg.checkpoint_every);
        wegan_run(st, train, data.per_corpus, wc, until);
        std::ofstream os(spath);
        write_wegan_state(os, st);
        os << stamp(cfg, seed);
        write_file((dir / "metrics.csv").string(), stamp(cfg, seed) + wegan_metrics_csv(st));
      }
      log << "wegan seed " << seed << ": trained to epoch " << st.epochs_done << "\n";
    } else {
      DeganConfig dc = cfg.degan;
      dc.seed = seed;
      DeganState st;
      if (fs::is_regular_file(spath)) {
        std::ifstream is(spath);
        st = read_degan_state(is);
        if (st.epochs_done >= dc.epochs) {
          log << "degan seed " << seed << ": up to date (" << st.epochs_done << " epochs)\n";
          continue;
        }
        log << "degan seed " << seed << ": resuming from epoch " << st.epochs_done << "\n";
      } else {
        st = degan_init(train, lda_log, data.all_docs, dc);
      }
      while (st.epochs_done < dc.epochs) {
        const int until = std::min(dc.epochs, st.epochs_done + cfg.checkpoint_every);
        degan_run(st, train, dc, until);
        std::ofstream os(spath);
        write_degan_state(os, st);
        os << stamp(cfg, seed);
        write_file((dir / "metrics.csv").string(), stamp(cfg, seed) + degan_metrics_csv(st));
      }
      write_file((dir / "topterms.tsv").string(),
                 stamp(cfg, seed) + degan_top_terms_tsv(st, data.vocab, 200, 10, seed));
      log << "degan seed " << seed << ": trained to epoch " << st.epochs_done << "\n";
    }
  }
}

void cmd_evaluate(const ExperimentConfig& cfg, std::ostream& log) {
  const PreparedData data = load_prepared(cfg);
  const int M = data.corpora();
  const int K = M;  // classification task: corpus membership
  const fs::path dir = fs::path(cfg.out_dir) / "eval";
  ensure_dir(dir);

  // clustering ground truth over non-degenerate documents (all splits)
  std::vector<const TfIdfDoc*> cluster_docs;
  std::vector<int> cluster_truth;
  for (int m = 0; m < M; m++)
    for (const TfIdfDoc& d : data.docs[m])
      if (!d.degenerate) {
        cluster_docs.push_back(&d);
        cluster_truth.push_back(m);
      }

  const auto embed_rep = [](const EmbeddingMatrix& E) {
    return [&E](const TfIdfDoc& d) { return doc_embed(d.weights, E, Squash::tanh_squash); };
  };
  const int V = data.vocab.size();
  const auto dense_rep = [V](const TfIdfDoc& d) { return dense_weights(d.weights, V); };

  std::vector<CsvRow> rows;
  std::vector<std::uint64_t> wegan_seeds, degan_seeds;
  std::ostringstream drift_txt;
  drift_txt << stamp(cfg);

  for (const std::uint64_t seed : cfg.seeds) {
    // ---- word2vec baseline arm ----
    {
      auto rep = embed_rep(data.all_docs);
      std::vector<Vector> points;
      points.reserve(cluster_docs.size());
      for (const TfIdfDoc* d : cluster_docs) points.push_back(rep(*d));
      const ClusteringResult cl = kmeans(points, M, seed, cfg.kmeans_iters);
      CsvRow r;
      r.seed = seed;
      r.arm = "w2v";
      r.ri = rand_index(cluster_truth, cl.assignments);

      Rng init_rng(seed);
      const MlpParams ffnn =
          make_mlp({data.all_docs.dim(), cfg.wegan.classifier_hidden, K},
                   {Activation::tanh_act, Activation::softmax}, true, init_rng);
      FinetuneConfig fc = cfg.finetune;
      fc.seed = seed;
      const FinetuneReport ft = finetune_classifier(
          ffnn, make_set(data.docs, Split::train, rep), make_set(data.docs, Split::validation, rep),
          make_set(data.docs, Split::test, rep), fc);
      r.accuracy = ft.test_accuracy;
      r.best_epoch = ft.best_epoch;
      rows.push_back(r);
      log << "eval seed " << seed << " w2v: RI " << format_double(r.ri) << " accuracy "
          << format_double(r.accuracy) << "\n";
    }

    // ---- weGAN arm ----
    const std::string wpath = state_path(cfg, "wegan", seed);
    if (fs::is_regular_file(wpath)) {
      wegan_seeds.push_back(seed);
      std::ifstream is(wpath);
      const WeganState st = read_wegan_state(is);
      auto rep = embed_rep(st.G);
      std::vector<Vector> points;
      points.reserve(cluster_docs.size());
      for (const TfIdfDoc* d : cluster_docs) points.push_back(rep(*d));
      const ClusteringResult cl = kmeans(points, M, seed, cfg.kmeans_iters);
      CsvRow r;
      r.seed = seed;
      r.arm = "wegan";
      r.ri = rand_index(cluster_truth, cl.assignments);

      FinetuneConfig fc = cfg.finetune;
      fc.seed = seed;
      const FinetuneReport ft = finetune_classifier(
          st.C, make_set(data.docs, Split::train, rep), make_set(data.docs, Split::validation, rep),
          make_set(data.docs, Split::test, rep), fc);
      r.accuracy = ft.test_accuracy;
      r.best_epoch = ft.best_epoch;
      rows.push_back(r);

      const SynonymDrift drift = synonym_drift(data.all_docs, st.G, cfg.synonym_k);
      drift_txt << "seed " << seed << ": mean differing top-" << cfg.synonym_k << " neighbors "
                << format_double(drift.mean_differing) << ", changed fraction "
                << format_double(drift.changed_fraction) << "\n";
      log << "eval seed " << seed << " wegan: RI " << format_double(r.ri) << " accuracy "
          << format_double(r.accuracy) << "\n";
    }

    // ---- deGAN arm ----
    const std::string dpath = state_path(cfg, "degan", seed);
    if (fs::is_regular_file(dpath)) {
      degan_seeds.push_back(seed);
      std::ifstream is(dpath);
      const DeganState st = read_degan_state(is);
      // warm start: trained discriminator's first two layers, fresh output head
      MlpParams warm;
      warm.layers.push_back(st.D.layers[0]);
      warm.layers.push_back(st.D.layers[1]);
      Rng head_rng(seed);
      const int disc_hidden = static_cast<int>(st.D.layers[1].W.rows());
      const MlpParams head = make_mlp({disc_hidden, K}, {Activation::softmax}, true, head_rng);
      warm.layers.push_back(head.layers[0]);
      validate_mlp(warm);

      FinetuneConfig fc = cfg.finetune;
      fc.seed = seed;
      const FinetuneReport ft =
          finetune_classifier(warm, make_set(data.docs, Split::train, dense_rep),
                              make_set(data.docs, Split::validation, dense_rep),
                              make_set(data.docs, Split::test, dense_rep), fc);
      CsvRow r;
      r.seed = seed;
      r.arm = "degan";
      r.accuracy = ft.test_accuracy;
      r.best_epoch = ft.best_epoch;
      rows.push_back(r);
      log << "eval seed " << seed << " degan: accuracy " << format_double(r.accuracy) << "\n";
    }
  }

  write_file((dir / "metrics.csv").string(), metrics_csv(cfg, rows));
  const auto cols = collect_columns(rows);
  write_file((dir / "table.txt").string(), stamp(cfg) + summary_table(cols));
  write_file((dir / "significance.txt").string(), stamp(cfg) + significance_blocks(cols));
  write_file((dir / "synonym_drift.txt").string(), drift_txt.str());

  if (!wegan_seeds.empty()) {
    const std::uint64_t s0 = wegan_seeds.front();
    std::ifstream is(state_path(cfg, "wegan", s0));
    const WeganState st = read_wegan_state(is);
    std::vector<std::string> terms = cfg.synonym_terms;
    if (terms.empty())
      for (int i = 0; i < std::min(5, data.vocab.size()); i++)
        terms.push_back(data.vocab.terms[i]);
    write_file((dir / "synonyms_wegan.tsv").string(),
               stamp(cfg, s0) + synonym_report_tsv(st.G, data.vocab, terms, cfg.synonym_k));
  }

  if (!degan_seeds.empty()) {
    const std::uint64_t first_degan_seed = degan_seeds.front();
    std::ifstream is(state_path(cfg, "degan", first_degan_seed));
    const DeganState st = read_degan_state(is);
    std::vector<Vector> vec;
    std::vector<int> grp;
    for (int m = 0; m < M; m++)
      for (const TfIdfDoc& d : data.docs[m])
        if (!d.degenerate) {
          vec.push_back(dense_rep(d));
          grp.push_back(m);
        }
    Rng noise_rng(first_degan_seed + 0x7f4a7c15ull);
    for (int m = 0; m < M; m++)
      for (int i = 0; i < cfg.projection_samples; i++) {
        Vector n(st.gen.noise_dim());
        for (int j = 0; j < st.gen.noise_dim(); j++) n[j] = noise_rng.uniform(-1.0, 1.0);
        vec.push_back(degan_generate(st.gen, m, n));
        grp.push_back(M + m);
      }
    const ProjectionResult proj =
        export_projection(vec, grp, cfg.projection_samples, first_degan_seed);
    write_file((dir / "projection.tsv").string(),
               stamp(cfg, first_degan_seed) + projection_tsv(proj));
    write_file((dir / "projection_raw.tsv").string(),
               stamp(cfg, first_degan_seed) + projection_raw_tsv(proj));
  }
  log << "eval: wrote " << (dir / "metrics.csv").string() << "\n";
}

std::string cmd_report(const ExperimentConfig& cfg) {
  const fs::path csv = fs::path(cfg.out_dir) / "eval" / "metrics.csv";
  if (!fs::is_regular_file(csv))
    throw error("report: " + csv.string() + " not found; run evaluate first");
  const auto rows = parse_metrics_csv(read_file(csv.string()));
  const auto cols = collect_columns(rows);
  return summary_table(cols) + "\n" + significance_blocks(cols);
}

ConvergenceReport run_convergence_fixture(const ExperimentConfig& cfg, const std::string& fixture,
                              std::ostream& log) {
  ConvergenceConfig pc;
  pc.degan.seed = cfg.degan.seed;
  std::vector<DiscreteDistribution> p;
  auto dist = [](std::initializer_list<double> mass) {
    DiscreteDistribution d;
    d.mass.resize(static_cast<long>(mass.size()));
    int i = 0;
    for (double v : mass) d.mass[i++] = v;
    return d;
  };
  if (fixture == "two-point") {
    p = {dist({0.6, 0.4})};
    pc.degan.epochs = 200;
    pc.degan.noise_dim = 8;
    pc.degan.hidden = 8;
    pc.degan.batch_per_corpus = 50;
    pc.degan.lr_d = 0.1;
    pc.degan.lr_g = 0.05;
    pc.checkpoints = 5;
    pc.docs_per_corpus = 500;
    pc.sample_draws = 2000;
  } else if (fixture == "three-point") {
    p = {dist({0.5, 0.3, 0.2})};
    pc.degan.epochs = 400;
    pc.degan.noise_dim = 8;
    pc.degan.hidden = 8;
    pc.degan.batch_per_corpus = 50;
    pc.degan.lr_d = 0.1;
    pc.degan.lr_g = 0.1;
    pc.checkpoints = 5;
    pc.docs_per_corpus = 500;
    pc.sample_draws = 2000;
  } else if (fixture == "oracle-pair") {
    p = {dist({0.4, 0.3, 0.2, 0.1}), dist({0.1, 0.2, 0.3, 0.4})};
    pc.degan.epochs = 40;
    pc.degan.noise_dim = 4;
    pc.degan.hidden = 6;
    pc.degan.batch_per_corpus = 50;
    pc.degan.lr_d = 0.1;
    pc.checkpoints = 4;
    pc.docs_per_corpus = 2000;
    pc.oracle_q = p;
  } else {
    throw error("verify-convergence: unknown fixture " + fixture +
                " (two-point, three-point, oracle-pair)");
  }
  const ConvergenceReport rep = verify_convergence(p, pc);
  const fs::path dir = fs::path(cfg.out_dir) / "convergence";
  ensure_dir(dir);
  const std::string body = "{\"config\":\"" + hex64(cfg.hash) + "\",\"seed\":" +
                           std::to_string(pc.degan.seed) + ",\"fixture\":\"" + fixture +
                           "\",\"report\":" + rep.to_json() + "}\n";
  write_file((dir / (fixture + ".json")).string(), body);
  log << "verify-convergence " << fixture << ": first TV " << format_double(rep.first().mean_tv)
      << " last TV " << format_double(rep.last().mean_tv) << " last gap "
      << format_double(rep.last().supnorm_gap) << "\n";
  return rep;
}

}  // namespace corpusgan
