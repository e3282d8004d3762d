#pragma once
#include <string>
#include <vector>

#include "corpusgan/common.hpp"
#include "corpusgan/dense.hpp"
#include "corpusgan/neural.hpp"

namespace corpusgan {

struct ClusteringResult {
  std::vector<int> assignments;  // per-document cluster id in 0..M-1
  double inertia = 0.0;
  int iterations_used = 0;
};

// Lloyd's algorithm with k-means++ seeding. Converged when assignments stop
// changing or max_iters is hit; an emptied cluster is reseeded to the point
// farthest from its assigned center. Throws when fewer than M distinct
// vectors exist.
ClusteringResult kmeans(const std::vector<Vector>& vectors, int M, std::uint64_t seed,
                        int max_iters = 100);

// (agreeing pairs) / (total pairs): a pair agrees when both labelings place
// it same-cluster or both place it different-cluster. Invariant to label
// permutation. Throws on length mismatch or length < 2.
double rand_index(const std::vector<int>& labels_a, const std::vector<int>& labels_b);

struct LabeledSet {
  std::vector<Vector> x;
  std::vector<int> y;
  int size() const { return static_cast<int>(x.size()); }
};

// Fraction of examples whose argmax class matches the label.
double classification_accuracy(const MlpParams& net, const LabeledSet& set);

struct FinetuneConfig {
  int epochs = 500;
  int batch = 50;
  double lr = 0.05;
  std::uint64_t seed = 1;
};

struct FinetuneReport {
  int best_epoch = 0;  // 1-based; earliest epoch on validation ties
  double best_validation_accuracy = 0.0;
  double test_accuracy = 0.0;                // at the best-validation epoch
  std::vector<double> validation_accuracy;   // index e = epoch e+1
};

// Minibatch SGD from the given initial network; validation accuracy recorded
// after every epoch, test accuracy reported at the argmax-validation epoch
// (weights snapshotted, no retraining pass). Deterministic given the seed.
FinetuneReport finetune_classifier(const MlpParams& init, const LabeledSet& train,
                                   const LabeledSet& val, const LabeledSet& test,
                                   const FinetuneConfig& cfg);

struct RunStats {
  std::vector<double> treatment;
  std::vector<double> baseline;
  double mean_treatment = 0.0, sd_treatment = 0.0;
  double mean_baseline = 0.0, sd_baseline = 0.0;
  double welch_t = 0.0;
  double df = 0.0;
  double p_two_sided = 1.0;
  // Both sample variances are zero: t is undefined; p reported as 1.0 for
  // equal means and 0.0 otherwise.
  bool zero_variance = false;
};

// Welch's unequal-variance t statistic with Welch-Satterthwaite degrees of
// freedom; two-sided p from the t-distribution tail. Requires >= 2
// observations per arm.
RunStats compare_runs(const std::vector<double>& treatment, const std::vector<double>& baseline);

// Human-readable significance block (means, sds, t, df, p, verdict at 0.05).
std::string significance_report(const std::string& metric, const RunStats& s);

struct ProjectionResult {
  std::vector<int> group;        // group label per sampled row
  std::vector<Vector> sampled;   // raw sampled vectors, same order
  Matrix coords;                 // n x 2 principal-component coordinates
};

// Samples up to n_per_group vectors per group (without replacement), centers
// the sample, and projects onto the top-2 principal components. Signs are
// canonicalized so the largest-magnitude loading of each component is
// positive. One-dimensional or degenerate data yields zero second coordinates.
ProjectionResult export_projection(const std::vector<Vector>& vectors,
                                   const std::vector<int>& labels, int n_per_group,
                                   std::uint64_t seed);

// TSV "group\tx\ty" rows, header included.
std::string projection_tsv(const ProjectionResult& p);
// TSV "group\tv0\tv1..." raw sampled vectors for external projection tools.
std::string projection_raw_tsv(const ProjectionResult& p);

}  // namespace corpusgan
