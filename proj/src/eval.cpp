#include "corpusgan/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace corpusgan {
namespace {

double sq_dist(const Vector& a, const Vector& b) { return (a - b).squaredNorm(); }

// Continued fraction for the regularized incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-14;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; m++) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double ibeta_reg(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log(1.0 - x));
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

// P(|T_df| > |t|), two-sided.
double student_t_two_sided(double t, double df) {
  if (!std::isfinite(t)) return 0.0;
  if (t == 0.0) return 1.0;
  return ibeta_reg(df / 2.0, 0.5, df / (df + t * t));
}

long long pairs_of(long long n) { return n * (n - 1) / 2; }

}  // namespace

ClusteringResult kmeans(const std::vector<Vector>& vectors, int M, std::uint64_t seed,
                        int max_iters) {
  const int n = static_cast<int>(vectors.size());
  if (n == 0) throw error("kmeans: no vectors");
  if (M < 1) throw error("kmeans: M must be >= 1");
  if (max_iters < 1) throw error("kmeans: max_iters must be >= 1");
  const long dim = vectors[0].size();
  for (const Vector& v : vectors)
    if (v.size() != dim) throw error("kmeans: inconsistent vector dimensions");

  int distinct = 0;
  for (int i = 0; i < n && distinct < M; i++) {
    bool fresh = true;
    for (int j = 0; j < i && fresh; j++)
      if (vectors[j] == vectors[i]) fresh = false;
    if (fresh) distinct++;
  }
  if (distinct < M) throw error("kmeans: fewer distinct vectors than clusters");

  Rng rng(seed);
  std::vector<Vector> centers;
  centers.push_back(vectors[static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n)))]);
  std::vector<double> d2(static_cast<std::size_t>(n));
  while (static_cast<int>(centers.size()) < M) {
    double total = 0.0;
    for (int i = 0; i < n; i++) {
      double best = sq_dist(vectors[i], centers[0]);
      for (std::size_t c = 1; c < centers.size(); c++)
        best = std::min(best, sq_dist(vectors[i], centers[c]));
      d2[i] = best;
      total += best;
    }
    const double r = rng.uniform01() * total;
    double acc = 0.0;
    int pick = -1;
    for (int i = 0; i < n; i++) {
      acc += d2[i];
      if (d2[i] > 0.0) {
        pick = i;
        if (acc >= r) break;
      }
    }
    if (pick < 0) throw error("kmeans: seeding ran out of distinct points");
    centers.push_back(vectors[pick]);
  }

  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  int iters = 0;
  for (int pass = 0; pass < max_iters; pass++) {
    iters = pass + 1;
    bool changed = false;
    for (int i = 0; i < n; i++) {
      int best = 0;
      double bd = sq_dist(vectors[i], centers[0]);
      for (int c = 1; c < M; c++) {
        const double d = sq_dist(vectors[i], centers[c]);
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    // reseed any emptied cluster to the point currently farthest from its
    // center (strictly reduces the objective)
    std::vector<int> count(static_cast<std::size_t>(M), 0);
    for (int a : assign) count[a]++;
    for (int c = 0; c < M; c++) {
      if (count[c] > 0) continue;
      int far = -1;
      double fd = -1.0;
      for (int i = 0; i < n; i++) {
        if (count[assign[i]] <= 1) continue;  // don't empty another cluster
        const double d = sq_dist(vectors[i], centers[assign[i]]);
        if (d > fd) {
          fd = d;
          far = i;
        }
      }
      if (far < 0) throw error("kmeans: cannot reseed empty cluster");
      count[assign[far]]--;
      assign[far] = c;
      count[c] = 1;
      centers[c] = vectors[far];
      changed = true;
    }
    for (int c = 0; c < M; c++) {
      centers[c].setZero();
      for (int i = 0; i < n; i++)
        if (assign[i] == c) centers[c] += vectors[i];
      centers[c] /= static_cast<double>(count[c]);
    }
    if (!changed) break;
  }

  ClusteringResult res;
  res.assignments = assign;
  res.iterations_used = iters;
  for (int i = 0; i < n; i++) res.inertia += sq_dist(vectors[i], centers[assign[i]]);
  return res;
}

double rand_index(const std::vector<int>& labels_a, const std::vector<int>& labels_b) {
  if (labels_a.size() != labels_b.size()) throw error("rand_index: length mismatch");
  const long long n = static_cast<long long>(labels_a.size());
  if (n < 2) throw error("rand_index: need at least 2 labels");
  std::map<int, long long> ca, cb;
  std::map<std::pair<int, int>, long long> joint;
  for (std::size_t i = 0; i < labels_a.size(); i++) {
    ca[labels_a[i]]++;
    cb[labels_b[i]]++;
    joint[{labels_a[i], labels_b[i]}]++;
  }
  long long same_both = 0, same_a = 0, same_b = 0;
  for (const auto& kv : joint) same_both += pairs_of(kv.second);
  for (const auto& kv : ca) same_a += pairs_of(kv.second);
  for (const auto& kv : cb) same_b += pairs_of(kv.second);
  const long long total = pairs_of(n);
  // agreements = same-in-both + different-in-both
  const long long agree = total + 2 * same_both - same_a - same_b;
  return static_cast<double>(agree) / static_cast<double>(total);
}

double classification_accuracy(const MlpParams& net, const LabeledSet& set) {
  if (set.x.empty()) throw error("classification_accuracy: empty set");
  int hits = 0;
  for (std::size_t i = 0; i < set.x.size(); i++) {
    const Vector out = mlp_forward(net, set.x[i]);
    int best = 0;
    for (int j = 1; j < out.size(); j++)
      if (out[j] > out[best]) best = j;
    if (best == set.y[i]) hits++;
  }
  return static_cast<double>(hits) / static_cast<double>(set.x.size());
}

namespace {

void check_set(const LabeledSet& s, const char* name, int input_dim, int classes) {
  if (s.x.empty()) throw error(std::string("finetune_classifier: empty split: ") + name);
  if (s.x.size() != s.y.size())
    throw error(std::string("finetune_classifier: label count mismatch: ") + name);
  for (std::size_t i = 0; i < s.x.size(); i++) {
    if (s.x[i].size() != input_dim)
      throw error(std::string("finetune_classifier: input dimension mismatch: ") + name);
    if (s.y[i] < 0 || s.y[i] >= classes)
      throw error(std::string("finetune_classifier: label out of range: ") + name);
  }
}

}  // namespace

FinetuneReport finetune_classifier(const MlpParams& init, const LabeledSet& train,
                                   const LabeledSet& val, const LabeledSet& test,
                                   const FinetuneConfig& cfg) {
  validate_mlp(init);
  if (cfg.epochs < 1) throw error("finetune_classifier: epochs must be >= 1");
  if (cfg.batch < 1) throw error("finetune_classifier: batch must be >= 1");
  if (init.layers.back().act != Activation::softmax)
    throw error("finetune_classifier: final activation must be softmax");
  const int classes = init.output_dim();
  check_set(train, "train", init.input_dim(), classes);
  check_set(val, "validation", init.input_dim(), classes);
  check_set(test, "test", init.input_dim(), classes);

  MlpParams net = init;
  MlpParams best_net = net;
  Rng rng(cfg.seed);
  BatchQueue queue(train.size());
  const int steps = (train.size() + cfg.batch - 1) / cfg.batch;

  FinetuneReport rep;
  double best = -1.0;
  for (int epoch = 1; epoch <= cfg.epochs; epoch++) {
    for (int s = 0; s < steps; s++) {
      const std::vector<int> idx = queue.draw(cfg.batch, rng);
      std::vector<Vector> bx;
      std::vector<int> by;
      bx.reserve(idx.size());
      by.reserve(idx.size());
      for (int i : idx) {
        bx.push_back(train.x[i]);
        by.push_back(train.y[i]);
      }
      LossGrads lg = classifier_nll(net, bx, by);
      scale_grads(lg.grads, 1.0 / static_cast<double>(idx.size()));
      sgd_step(net, lg.grads, cfg.lr);
    }
    const double va = classification_accuracy(net, val);
    rep.validation_accuracy.push_back(va);
    if (va > best) {
      best = va;
      rep.best_epoch = epoch;
      best_net = net;
    }
  }
  rep.best_validation_accuracy = best;
  rep.test_accuracy = classification_accuracy(best_net, test);
  return rep;
}

RunStats compare_runs(const std::vector<double>& treatment, const std::vector<double>& baseline) {
  if (treatment.size() < 2 || baseline.size() < 2)
    throw error("compare_runs: need at least 2 observations per arm");
  RunStats s;
  s.treatment = treatment;
  s.baseline = baseline;
  const double n1 = static_cast<double>(treatment.size());
  const double n2 = static_cast<double>(baseline.size());
  for (double v : treatment) s.mean_treatment += v;
  s.mean_treatment /= n1;
  for (double v : baseline) s.mean_baseline += v;
  s.mean_baseline /= n2;
  double v1 = 0.0, v2 = 0.0;
  for (double v : treatment) v1 += (v - s.mean_treatment) * (v - s.mean_treatment);
  for (double v : baseline) v2 += (v - s.mean_baseline) * (v - s.mean_baseline);
  v1 /= n1 - 1.0;
  v2 /= n2 - 1.0;
  s.sd_treatment = std::sqrt(v1);
  s.sd_baseline = std::sqrt(v2);

  if (v1 == 0.0 && v2 == 0.0) {
    s.zero_variance = true;
    if (s.mean_treatment == s.mean_baseline) {
      s.welch_t = 0.0;
      s.p_two_sided = 1.0;
    } else {
      s.welch_t = s.mean_treatment > s.mean_baseline
                      ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
      s.p_two_sided = 0.0;
    }
    s.df = 0.0;
    return s;
  }

  const double a = v1 / n1, b = v2 / n2;
  s.welch_t = (s.mean_treatment - s.mean_baseline) / std::sqrt(a + b);
  s.df = (a + b) * (a + b) / (a * a / (n1 - 1.0) + b * b / (n2 - 1.0));
  s.p_two_sided = student_t_two_sided(s.welch_t, s.df);
  return s;
}

std::string significance_report(const std::string& metric, const RunStats& s) {
  char buf[256];
  std::ostringstream os;
  os << "metric: " << metric << "\n";
  std::snprintf(buf, sizeof buf, "treatment: mean %.6f sd %.6f (n=%zu)\n", s.mean_treatment,
                s.sd_treatment, s.treatment.size());
  os << buf;
  std::snprintf(buf, sizeof buf, "baseline: mean %.6f sd %.6f (n=%zu)\n", s.mean_baseline,
                s.sd_baseline, s.baseline.size());
  os << buf;
  if (s.zero_variance) {
    os << "welch t: undefined (zero variance in both arms)\n";
    std::snprintf(buf, sizeof buf, "p (two-sided): %.6g\n", s.p_two_sided);
    os << buf;
  } else {
    std::snprintf(buf, sizeof buf, "welch t %.6f df %.4f p (two-sided) %.6g\n", s.welch_t, s.df,
                  s.p_two_sided);
    os << buf;
  }
  os << "significant at 0.05: " << (s.p_two_sided < 0.05 ? "yes" : "no") << "\n";
  return os.str();
}

ProjectionResult export_projection(const std::vector<Vector>& vectors,
                                   const std::vector<int>& labels, int n_per_group,
                                   std::uint64_t seed) {
  if (vectors.empty()) throw error("export_projection: no vectors");
  if (vectors.size() != labels.size()) throw error("export_projection: label count mismatch");
  if (n_per_group < 1) throw error("export_projection: n_per_group must be >= 1");
  const long dim = vectors[0].size();
  for (const Vector& v : vectors)
    if (v.size() != dim) throw error("export_projection: inconsistent vector dimensions");

  std::map<int, std::vector<int>> groups;
  for (std::size_t i = 0; i < labels.size(); i++)
    groups[labels[i]].push_back(static_cast<int>(i));

  Rng rng(seed);
  ProjectionResult res;
  for (auto& [g, idx] : groups) {
    std::vector<int> take = idx;
    if (static_cast<int>(take.size()) > n_per_group) {
      rng.shuffle(take);
      take.resize(static_cast<std::size_t>(n_per_group));
      std::sort(take.begin(), take.end());
    }
    for (int i : take) {
      res.group.push_back(g);
      res.sampled.push_back(vectors[i]);
    }
  }

  const long n = static_cast<long>(res.sampled.size());
  Matrix X(n, dim);
  for (long i = 0; i < n; i++) X.row(i) = res.sampled[i].transpose();
  const Eigen::RowVectorXd mu = X.colwise().mean();
  X.rowwise() -= mu;

  Matrix basis = Matrix::Zero(dim, 2);
  if (dim == 1) {
    basis(0, 0) = 1.0;
  } else {
    const Matrix cov = X.transpose() * X / std::max(1.0, static_cast<double>(n - 1));
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
    basis.col(0) = es.eigenvectors().col(dim - 1);
    basis.col(1) = es.eigenvectors().col(dim - 2);
  }
  for (int c = 0; c < 2; c++) {
    int big = 0;
    for (long r = 1; r < dim; r++)
      if (std::abs(basis(r, c)) > std::abs(basis(big, c))) big = static_cast<int>(r);
    if (basis(big, c) < 0.0) basis.col(c) = -basis.col(c);
  }
  res.coords = X * basis;
  return res;
}

std::string projection_tsv(const ProjectionResult& p) {
  std::ostringstream os;
  os << "group\tx\ty\n";
  for (std::size_t i = 0; i < p.group.size(); i++)
    os << p.group[i] << "\t" << format_double(p.coords(static_cast<long>(i), 0)) << "\t"
       << format_double(p.coords(static_cast<long>(i), 1)) << "\n";
  return os.str();
}

std::string projection_raw_tsv(const ProjectionResult& p) {
  std::ostringstream os;
  os << "group";
  const long dim = p.sampled.empty() ? 0 : p.sampled[0].size();
  for (long j = 0; j < dim; j++) os << "\tv" << j;
  os << "\n";
  for (std::size_t i = 0; i < p.group.size(); i++) {
    os << p.group[i];
    for (long j = 0; j < dim; j++) os << "\t" << format_double(p.sampled[i][j]);
    os << "\n";
  }
  return os.str();
}

}  // namespace corpusgan
