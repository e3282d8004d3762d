// Acceptance gate: runs every repository-level criterion at its stated
// tolerance and time budget and prints exactly one PASS/FAIL line per
// criterion (indented lines break down multi-clause criteria). The process
// exit code is the number of failed criteria, so the suite runner reports
// this binary red whenever any criterion is not met.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "corpusgan/degan.hpp"
#include "corpusgan/eval.hpp"
#include "corpusgan/experiment.hpp"
#include "corpusgan/lda.hpp"
#include "corpusgan/neural.hpp"
#include "corpusgan/wegan.hpp"
#include "synthetic.hpp"

using namespace corpusgan;
namespace fs = std::filesystem;

namespace {

struct Clock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

int failures = 0;

void report(int id, bool pass, double seconds, double budget, const std::string& detail) {
  const bool in_budget = budget <= 0.0 || seconds <= budget;
  const bool ok = pass && in_budget;
  if (!ok) failures++;
  std::printf("criterion %d: %s (%.1fs%s) %s\n", id, ok ? "PASS" : "FAIL", seconds,
              budget > 0.0 && !in_budget ? ", over budget" : "", detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// ---------------------------------------------------------------- criterion 1
// Analytic gradients of all five training losses match central finite
// differences within 1e-4 relative error on randomized small fixtures.

MlpParams rand_mlp(const std::vector<int>& dims, const std::vector<Activation>& acts,
                   std::uint64_t seed) {
  Rng rng(seed);
  return make_mlp(dims, acts, true, rng);
}

std::vector<Vector> rand_batch(int n, int dim, Rng& rng) {
  std::vector<Vector> out;
  for (int i = 0; i < n; i++) {
    Vector v(dim);
    for (int j = 0; j < dim; j++) v[j] = rng.uniform(-1.0, 1.0);
    out.push_back(v);
  }
  return out;
}

DeganGenerator rand_generator(int M, int V, int T, int d_n, Rng& rng) {
  DeganGenerator gen;
  auto fill = [&](int r, int c, double s) {
    Matrix w(r, c);
    for (int i = 0; i < r; i++)
      for (int j = 0; j < c; j++) w(i, j) = rng.uniform(-s, s);
    return w;
  };
  for (int m = 0; m < M; m++) {
    gen.W_h.push_back(fill(T, d_n, 0.8));
    gen.W_o.push_back(fill(V, T, 0.5));
  }
  gen.W_h0 = fill(T, d_n, 0.8);
  gen.W_o0 = fill(V, T, 0.5);
  return gen;
}

void criterion1() {
  Clock clock;
  const int fixtures = 20;
  double worst = 0.0;
  std::string worst_at;
  auto track = [&](const GradCheckReport& r, const char* loss, int f) {
    if (r.max_rel_error > worst) {
      worst = r.max_rel_error;
      worst_at = std::string(loss) + " fixture " + std::to_string(f) + " (" +
                 r.worst_parameter + ")";
    }
  };

  for (int f = 0; f < fixtures; f++) {
    Rng rng(9000 + f);
    const int d = 2 + static_cast<int>(rng.uniform_index(4));       // 2..5
    const int h = 2 + static_cast<int>(rng.uniform_index(4));       // 2..5
    const int K = 2 + static_cast<int>(rng.uniform_index(3));       // 2..4
    const int M = 1 + static_cast<int>(rng.uniform_index(3));       // 1..3
    const int V = 3 + static_cast<int>(rng.uniform_index(4));       // 3..6
    const int T = 2 + static_cast<int>(rng.uniform_index(3));       // 2..4
    const int dn = 2 + static_cast<int>(rng.uniform_index(3));      // 2..4

    {  // cross-corpus discriminator loss
      MlpParams D = rand_mlp({d, h, 1}, {Activation::tanh_act, Activation::sigmoid}, 9100 + f);
      auto g = rand_batch(3, d, rng), fk = rand_batch(2, d, rng);
      auto r = wegan_disc_loss(D, g, fk);
      track(grad_check([&] { return wegan_disc_loss(D, g, fk).loss; }, D, r.grads),
            "cross-corpus disc", f);
    }
    {  // corpus-membership classifier loss
      MlpParams C = rand_mlp({d, h, K}, {Activation::tanh_act, Activation::softmax}, 9200 + f);
      auto xs = rand_batch(4, d, rng);
      std::vector<int> labels;
      for (int i = 0; i < 4; i++) labels.push_back(static_cast<int>(rng.uniform_index(K)));
      auto r = classifier_nll(C, xs, labels);
      track(grad_check([&] { return classifier_nll(C, xs, labels).loss; }, C, r.grads),
            "classifier nll", f);
    }
    {  // embedding-generator loss through the tf-idf document embedding
      MlpParams D = rand_mlp({d, h, 1}, {Activation::tanh_act, Activation::sigmoid}, 9300 + f);
      MlpParams C = rand_mlp({d, h, K}, {Activation::tanh_act, Activation::softmax}, 9400 + f);
      EmbeddingMatrix G;
      G.data.resize(V, d);
      for (int i = 0; i < V; i++)
        for (int j = 0; j < d; j++) G.data(i, j) = rng.uniform(-1.0, 1.0);
      std::vector<TfIdfDoc> docs(3);
      for (auto& doc : docs) {
        const int terms = 1 + static_cast<int>(rng.uniform_index(3));
        double total = 0.0;
        for (int t = 0; t < terms; t++) {
          const int idx = static_cast<int>(rng.uniform_index(V));
          doc.weights[idx] = rng.uniform(0.1, 1.0);
        }
        for (auto& [idx, w] : doc.weights) total += w;
        for (auto& [idx, w] : doc.weights) w /= total;
        doc.label = static_cast<int>(rng.uniform_index(K));
      }
      auto r = wegan_gen_loss(D, C, G, docs);
      Matrix dense = Matrix::Zero(V, d);
      for (auto& [idx, grad] : r.g_grads) dense.row(idx) = grad.transpose();
      std::vector<ParamRef> refs = {
          {"G", G.data.data(), static_cast<long>(G.data.size()), dense.data()}};
      track(grad_check([&] { return wegan_gen_loss(D, C, G, docs).loss; }, refs),
            "embedding gen", f);
    }
    {  // document discriminator loss over 2M classes
      MlpParams D = rand_mlp({V, d, h, 2 * M},
                             {Activation::tanh_act, Activation::tanh_act, Activation::softmax},
                             9500 + f);
      std::vector<std::vector<Vector>> real(M), fake(M);
      for (int m = 0; m < M; m++) {
        real[m] = rand_batch(2, V, rng);
        fake[m] = rand_batch(2, V, rng);
      }
      auto r = degan_disc_loss(D, real, fake);
      track(grad_check([&] { return degan_disc_loss(D, real, fake).loss; }, D, r.grads),
            "document disc", f);
    }
    {  // document-generator loss through the full generator network
      MlpParams D =
          rand_mlp({V, h, 2 * M}, {Activation::tanh_act, Activation::softmax}, 9600 + f);
      DeganGenerator gen = rand_generator(M, V, T, dn, rng);
      std::vector<std::vector<Vector>> noise(M);
      for (int m = 0; m < M; m++) noise[m] = rand_batch(2, dn, rng);
      DeganGenGrads grads = zero_gen_grads(gen);
      degan_gen_loss(D, gen, noise, &grads);
      track(grad_check([&] { return degan_gen_loss(D, gen, noise, nullptr); },
                       degan_param_refs(gen, grads)),
            "document gen", f);
    }
  }
  report(1, worst < 1e-4, clock.seconds(), 60.0,
         "gradients of all 5 losses vs central differences on " + std::to_string(fixtures) +
             " random fixtures: max rel err " + fmt("%.2e", worst) + " at " + worst_at +
             " (tolerance 1e-4)");
}

// ---------------------------------------------------------------- criterion 2
// (a) the closed-form discriminator optimum on discrete supports is never
// beaten by more than 1e-9 by 1000 random candidates; (b) adversarial training
// on a two-point support reaches TV < 0.15 with monotone-decreasing checkpoint
// TV in at least 4 of 5 seeds.

DiscreteDistribution rand_dist(int S, Rng& rng) {
  DiscreteDistribution d;
  d.mass.resize(S);
  double total = 0.0;
  for (int i = 0; i < S; i++) {
    d.mass[i] = rng.uniform(0.05, 1.0);
    total += d.mass[i];
  }
  d.mass /= total;
  return d;
}

double pairing_objective(const std::vector<DiscreteDistribution>& p,
                         const std::vector<DiscreteDistribution>& q,
                         const std::vector<int>& points, const Matrix& rows) {
  const int M = static_cast<int>(p.size());
  double total = 0.0;
  for (std::size_t r = 0; r < points.size(); r++) {
    for (int m = 0; m < M; m++) {
      if (p[m].mass[points[r]] > 0)
        total += p[m].mass[points[r]] * std::log(rows(static_cast<long>(r), m));
      if (q[m].mass[points[r]] > 0)
        total += q[m].mass[points[r]] * std::log(rows(static_cast<long>(r), M + m));
    }
  }
  return total;
}

void criterion2() {
  Clock clock;

  // (a) closed form vs 1000 random candidates per support
  double min_margin = 1e300;
  Rng rng(777);
  for (int M = 1; M <= 3; M++) {
    for (int trial = 0; trial < 3; trial++) {
      const int S = 2 + static_cast<int>(rng.uniform_index(15));  // 2..16
      std::vector<DiscreteDistribution> p, q;
      for (int m = 0; m < M; m++) {
        p.push_back(rand_dist(S, rng));
        q.push_back(rand_dist(S, rng));
      }
      const OptimalDiscriminator opt = optimal_discriminator(p, q);
      const double best = pairing_objective(p, q, opt.points, opt.d);
      for (int c = 0; c < 1000; c++) {
        Matrix cand(opt.points.size(), 2 * M);
        for (long r = 0; r < cand.rows(); r++) {
          double total = 0.0;
          for (int k = 0; k < 2 * M; k++) {
            cand(r, k) = std::exp(rng.uniform(-3.0, 3.0));
            total += cand(r, k);
          }
          for (int k = 0; k < 2 * M; k++) cand(r, k) /= total;
        }
        min_margin = std::min(min_margin, best - pairing_objective(p, q, opt.points, cand));
      }
    }
  }
  const bool closed_form_ok = min_margin >= -1e-9;
  std::printf("  2a %s closed-form discriminator vs 9000 random candidates: min margin %s "
              "(tolerance -1e-9)\n",
              closed_form_ok ? "PASS" : "FAIL", fmt("%.3e", min_margin).c_str());

  // (b) two-point convergence across 5 seeds
  DiscreteDistribution p2;
  p2.mass.resize(2);
  p2.mass << 0.6, 0.4;
  int tv_ok = 0, monotone_ok = 0, both_ok = 0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 5; seed++) {
    ConvergenceConfig cc;
    cc.degan.epochs = 200;
    cc.degan.noise_dim = 8;
    cc.degan.hidden = 8;
    cc.degan.batch_per_corpus = 50;
    cc.degan.lr_d = 0.1;
    cc.degan.lr_g = 0.05;
    cc.degan.seed = seed;
    cc.checkpoints = 5;
    cc.docs_per_corpus = 500;
    cc.sample_draws = 2000;
    const ConvergenceReport rep = verify_convergence({p2}, cc);
    const bool tv = rep.last().mean_tv < 0.15;
    bool monotone = true;
    for (std::size_t i = 1; i < rep.checkpoints.size(); i++)
      if (rep.checkpoints[i].mean_tv >= rep.checkpoints[i - 1].mean_tv) monotone = false;
    tv_ok += tv;
    monotone_ok += monotone;
    both_ok += tv && monotone;
    per_seed += " seed" + std::to_string(seed) + "(tv=" + fmt("%.3f", rep.last().mean_tv) +
                (monotone ? ",monotone)" : ",non-monotone)");
  }
  std::printf("  2b %s final TV < 0.15 in %d/5 seeds:%s\n", tv_ok == 5 ? "PASS" : "FAIL", tv_ok,
              per_seed.c_str());
  std::printf(
      "  2c %s monotone-decreasing checkpoint TV in %d/5 seeds (need >= 4): the generator "
      "network is odd in the noise (no biases), which pins two-point supports at the TV floor "
      "|p0-p1|/2 = 0.1, so checkpoint TV is flat there plus sampling noise\n",
      monotone_ok >= 4 ? "PASS" : "FAIL", monotone_ok);

  report(2, closed_form_ok && both_ok >= 4, clock.seconds(), 300.0,
         "discrete-support optimum unbeaten: " + std::string(closed_form_ok ? "yes" : "NO") +
             "; TV < 0.15 with monotone decrease in " + std::to_string(both_ok) +
             "/5 seeds (need 4)");
}

// ---------------------------------------------------------------- criterion 3
// Rand index equals an all-pairs brute force exactly on 200 random labelings
// and the textbook 4-point fixture equals 1/3.

double brute_force_ri(const std::vector<int>& a, const std::vector<int>& b) {
  const int n = static_cast<int>(a.size());
  long agree = 0, total = 0;
  for (int i = 0; i < n; i++)
    for (int j = i + 1; j < n; j++) {
      total++;
      const bool same_a = a[i] == a[j], same_b = b[i] == b[j];
      if (same_a == same_b) agree++;
    }
  return static_cast<double>(agree) / static_cast<double>(total);
}

void criterion3() {
  Clock clock;
  Rng rng(555);
  int exact = 0;
  const int trials = 200;
  for (int t = 0; t < trials; t++) {
    const int n = 2 + static_cast<int>(rng.uniform_index(49));  // 2..50
    const int ka = 1 + static_cast<int>(rng.uniform_index(6));
    const int kb = 1 + static_cast<int>(rng.uniform_index(6));
    std::vector<int> a(n), b(n);
    for (int i = 0; i < n; i++) {
      a[i] = static_cast<int>(rng.uniform_index(ka));
      b[i] = static_cast<int>(rng.uniform_index(kb));
    }
    if (rand_index(a, b) == brute_force_ri(a, b)) exact++;
  }
  const double fixture = rand_index({0, 0, 1, 1}, {0, 1, 0, 1});
  const bool fixture_ok = fixture == 1.0 / 3.0;
  report(3, exact == trials && fixture_ok, clock.seconds(), 0.0,
         "rand index == brute-force all-pairs on " + std::to_string(exact) + "/" +
             std::to_string(trials) + " random labelings (n <= 50); split-pair fixture = " +
             fmt("%.6f", fixture) + (fixture_ok ? " == 1/3 exactly" : " != 1/3"));
}

// ---------------------------------------------------------------- criterion 4
// Generated documents are probability vectors: 10,000 draws nonnegative and
// sum-1 within 1e-6; the all-zero generator maps zero noise to exactly 1/V.

void criterion4() {
  Clock clock;
  Rng rng(666);
  double worst_sum = 0.0, worst_min = 1.0;
  int draws_done = 0;
  for (int cfg = 0; cfg < 10; cfg++) {
    const int M = 1 + static_cast<int>(rng.uniform_index(3));
    const int V = 2 + static_cast<int>(rng.uniform_index(59));
    const int T = 2 + static_cast<int>(rng.uniform_index(6));
    const int dn = 2 + static_cast<int>(rng.uniform_index(6));
    DeganGenerator gen = rand_generator(M, V, T, dn, rng);
    for (int i = 0; i < 1000; i++) {
      Vector n(dn);
      for (int j = 0; j < dn; j++) n[j] = rng.uniform(-1.0, 1.0);
      const Vector y = degan_generate(gen, static_cast<int>(rng.uniform_index(M)), n);
      worst_sum = std::max(worst_sum, std::abs(y.sum() - 1.0));
      worst_min = std::min(worst_min, y.minCoeff());
      draws_done++;
    }
  }

  const int V0 = 7;
  DeganGenerator zero;
  zero.W_h = {Matrix::Zero(3, 4)};
  zero.W_o = {Matrix::Zero(V0, 3)};
  zero.W_h0 = Matrix::Zero(3, 4);
  zero.W_o0 = Matrix::Zero(V0, 3);
  const Vector u = degan_generate(zero, 0, Vector::Zero(4));
  bool uniform_exact = true;
  for (int j = 0; j < V0; j++)
    if (u[j] != 1.0 / V0) uniform_exact = false;

  report(4, worst_sum <= 1e-6 && worst_min >= -1e-6 && uniform_exact, clock.seconds(), 0.0,
         std::to_string(draws_done) + " generated documents: max |sum-1| " +
             fmt("%.2e", worst_sum) + ", min coordinate " + fmt("%.2e", worst_min) +
             " (tolerance 1e-6); zero generator + zero noise = exactly 1/V: " +
             (uniform_exact ? "yes" : "NO"));
}

// ---------------------------------------------------------------- criterion 5
// Synthetic separability at the stated scale: 2 corpora, 400 documents,
// V = 200 with disjoint slices. The embedding-side classifier reaches 0.95
// test accuracy, the document-side discriminator reaches 0.95 real-corpus
// accuracy, and the generated-document real-class score rises over training.

void criterion5() {
  Clock clock;
  synth::SyntheticData data = synth::make_synthetic(2, 200, 200, 30, 11);
  const int V = data.vocab.size();
  const int dim = 16;

  EmbeddingMatrix g_init = synth::random_embeddings(V, dim, 12, "cross");
  std::vector<EmbeddingMatrix> fixed = {synth::random_embeddings(V, dim, 13, "c0"),
                                        synth::random_embeddings(V, dim, 14, "c1")};
  WeganConfig wc;
  wc.epochs = 100;
  wc.batch_per_corpus = 50;
  wc.seed = 7;
  const WeganState wst = train_wegan(data.train, fixed, g_init, wc);
  const double wacc = wegan_classifier_accuracy(wst, data.test);

  std::vector<std::map<int, int>> counts;
  for (int m = 0; m < 2; m++)
    for (const auto& toks : data.train_tokens[m]) {
      std::map<int, int> c;
      for (const auto& t : toks) {
        const int i = data.vocab.lookup(t);
        if (i >= 0) c[i]++;
      }
      counts.push_back(c);
    }
  LdaConfig lc;
  lc.topics = 10;
  lc.iters = 100;
  lc.seed = 3;
  const TopicWordMatrix tw = fit_lda(counts, V, lc);
  const Matrix lda_log = log_init(tw, 1e-12);
  DeganConfig dc;
  dc.epochs = 600;
  dc.batch_per_corpus = 50;
  dc.hidden = lc.topics;
  dc.noise_dim = 16;
  dc.disc_hidden = 20;
  dc.lr_d = 0.01;
  dc.lr_g = 1.0;
  dc.seed = 7;
  const DeganState dst =
      train_degan(data.train, lda_log, synth::random_embeddings(V, dim, 15, "all"), dc);
  const DeganEpochMetrics& first = dst.history.front();
  const DeganEpochMetrics& last = dst.history.back();
  const double dacc = (last.class_accuracy[0] + last.class_accuracy[1]) / 2.0;
  const bool rising = last.real_score > first.real_score;

  report(5, wacc >= 0.95 && dacc >= 0.95 && rising, clock.seconds(), 600.0,
         "2 corpora x 200 docs, V=" + std::to_string(V) +
             " disjoint: classifier test acc " + fmt("%.3f", wacc) +
             " (need 0.95); discriminator real-corpus acc " + fmt("%.3f", dacc) +
             " (need 0.95); generated-doc real-class score " + fmt("%.4f", first.real_score) +
             " -> " + fmt("%.4f", last.real_score) + (rising ? " rising" : " NOT rising"));
}

// ---------------------------------------------------------------- criterion 6
// Newsgroup-scale finetuning: 6 top-level categories, V = 2000, at most 300
// training documents per corpus, 5 seeds; the adversarially finetuned
// classifier must match or beat the fixed-embedding baseline in >= 4 of 5
// seeds. Requires the raw corpus on disk; this environment cannot fetch it.

struct ArmRow {
  std::uint64_t seed;
  std::string arm;
  double accuracy = -1.0;
};

std::vector<ArmRow> parse_rows(const std::string& csv) {
  std::vector<ArmRow> rows;
  std::istringstream is(csv);
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    const auto cols = split_char(line, ',');
    if (cols.size() != 6) continue;
    ArmRow r;
    r.seed = std::stoull(cols[1]);
    r.arm = cols[2];
    if (!cols[4].empty()) r.accuracy = std::stod(cols[4]);
    rows.push_back(r);
  }
  return rows;
}

void criterion6() {
  Clock clock;
  const char* env = std::getenv("CORPUSGAN_20NG_ROOT");
  const fs::path root = env ? fs::path(env) : fs::path("data/20newsgroups");

  std::vector<std::string> subdirs;
  if (fs::is_directory(root))
    for (const auto& e : fs::directory_iterator(root))
      if (e.is_directory()) subdirs.push_back(e.path().filename().string());
  std::sort(subdirs.begin(), subdirs.end());

  // top-level category of a newsgroup name ("comp.sys.mac" -> "comp")
  auto super = [](const std::string& name) { return name.substr(0, name.find('.')); };
  std::map<std::string, std::vector<std::string>> groups;
  for (const std::string& s : subdirs)
    if (super(s) != "misc") groups[super(s)].push_back(s);

  if (groups.size() < 2) {
    report(6, false, clock.seconds(), 0.0,
           "BLOCKED: newsgroup corpus not found under " + root.string() +
               " (set CORPUSGAN_20NG_ROOT); this environment has no network access to fetch "
               "it, so the criterion cannot run here. It runs unchanged once the corpus "
               "directory (one subdirectory per newsgroup, one file per post) is provided; "
               "the mechanism itself is exercised by criterion 5 on synthetic corpora.");
    return;
  }

  // Desk-scale copy: round-robin across each category's newsgroups up to 375
  // documents per category, so the hash split leaves <= 300 training docs.
  const fs::path capped = fs::temp_directory_path() / "corpusgan_acceptance_20ng";
  fs::remove_all(capped);
  for (const auto& [cat, dirs] : groups) {
    std::vector<std::vector<fs::path>> files(dirs.size());
    for (std::size_t d = 0; d < dirs.size(); d++) {
      for (const auto& e : fs::directory_iterator(root / dirs[d]))
        if (e.is_regular_file()) files[d].push_back(e.path());
      std::sort(files[d].begin(), files[d].end());
    }
    int copied = 0;
    for (std::size_t i = 0; copied < 375; i++) {
      bool any = false;
      for (std::size_t d = 0; d < dirs.size() && copied < 375; d++)
        if (i < files[d].size()) {
          const fs::path dst = capped / cat / (dirs[d] + "_" + files[d][i].filename().string());
          fs::create_directories(dst.parent_path());
          fs::copy_file(files[d][i], dst);
          copied++;
          any = true;
        }
      if (!any) break;
    }
  }

  ConfigFile file;
  file.set("data", "root", capped.string());
  file.set("data", "v_max", "2000");
  file.set("embedding", "dim", "100");
  file.set("embedding", "epochs", "3");
  file.set("wegan", "epochs", "100");
  file.set("wegan", "batch", "50");
  file.set("eval", "seeds", "1 2 3 4 5");
  file.set("eval", "finetune_epochs", "50");
  file.set("train", "checkpoint_every", "50");
  file.set("output", "dir", (fs::temp_directory_path() / "corpusgan_acceptance_20ng_out").string());
  const ExperimentConfig cfg = experiment_from_config(file);
  fs::remove_all(cfg.out_dir);

  std::ostringstream log;
  cmd_prepare(cfg, log);
  cmd_train(cfg, "wegan", log);
  cmd_evaluate(cfg, log);

  const auto rows = parse_rows(read_file((fs::path(cfg.out_dir) / "eval" / "metrics.csv").string()));
  std::map<std::uint64_t, double> base, tuned;
  for (const ArmRow& r : rows) {
    if (r.arm == "w2v") base[r.seed] = r.accuracy;
    if (r.arm == "wegan") tuned[r.seed] = r.accuracy;
  }
  int wins = 0, seeds = 0;
  std::string detail;
  for (const auto& [seed, acc] : base) {
    if (!tuned.count(seed)) continue;
    seeds++;
    const bool win = tuned[seed] >= acc;
    wins += win;
    detail += " seed" + std::to_string(seed) + "(" + fmt("%.3f", tuned[seed]) + " vs " +
              fmt("%.3f", acc) + ")";
  }
  report(6, seeds == 5 && wins >= 4, clock.seconds(), 1800.0,
         "adversarially finetuned classifier >= fixed-embedding baseline in " +
             std::to_string(wins) + "/" + std::to_string(seeds) + " seeds (need 4/5):" + detail);
}

// ---------------------------------------------------------------- criterion 7
// Determinism: retraining with an identical config and seed reproduces the
// metrics CSV and the serialized state bit for bit.

template <typename State>
std::string serialize(const State& st, void (*writer)(std::ostream&, const State&)) {
  std::ostringstream os;
  writer(os, st);
  return os.str();
}

void criterion7() {
  Clock clock;
  synth::SyntheticData data = synth::make_synthetic(2, 30, 40, 20, 17);
  const int V = data.vocab.size();
  EmbeddingMatrix g_init = synth::random_embeddings(V, 6, 18, "cross");
  std::vector<EmbeddingMatrix> fixed = {synth::random_embeddings(V, 6, 19, "c0"),
                                        synth::random_embeddings(V, 6, 20, "c1")};
  WeganConfig wc;
  wc.epochs = 8;
  wc.batch_per_corpus = 7;
  wc.seed = 5;
  const WeganState w1 = train_wegan(data.train, fixed, g_init, wc);
  const WeganState w2 = train_wegan(data.train, fixed, g_init, wc);
  const bool wegan_csv = wegan_metrics_csv(w1) == wegan_metrics_csv(w2);
  const bool wegan_state =
      serialize<WeganState>(w1, write_wegan_state) == serialize<WeganState>(w2, write_wegan_state);

  Rng trng(21);
  Matrix lda_log(3, V);
  for (int t = 0; t < 3; t++) {
    Vector row(V);
    for (int v = 0; v < V; v++) row[v] = trng.uniform(0.5, 1.5);
    row /= row.sum();
    lda_log.row(t) = row.array().log().matrix().transpose();
  }
  DeganConfig dc;
  dc.epochs = 6;
  dc.batch_per_corpus = 7;
  dc.hidden = 3;
  dc.noise_dim = 4;
  dc.disc_hidden = 5;
  dc.seed = 5;
  const EmbeddingMatrix we = synth::random_embeddings(V, 6, 22, "all");
  const DeganState d1 = train_degan(data.train, lda_log, we, dc);
  const DeganState d2 = train_degan(data.train, lda_log, we, dc);
  const bool degan_csv = degan_metrics_csv(d1) == degan_metrics_csv(d2);
  const bool degan_state =
      serialize<DeganState>(d1, write_degan_state) == serialize<DeganState>(d2, write_degan_state);

  report(7, wegan_csv && wegan_state && degan_csv && degan_state, clock.seconds(), 0.0,
         std::string("identical config + seed reproduce bit-identical outputs: ") +
             "embedding-model metrics " + (wegan_csv ? "yes" : "NO") + ", state " +
             (wegan_state ? "yes" : "NO") + "; document-model metrics " +
             (degan_csv ? "yes" : "NO") + ", state " + (degan_state ? "yes" : "NO"));
}

}  // namespace

int main() {
  std::printf("acceptance gate: 7 criteria\n");
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  std::printf("acceptance: %d/7 criteria passed\n", 7 - failures);
  return failures;
}
