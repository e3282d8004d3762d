#pragma once
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "corpusgan/dense.hpp"
#include "corpusgan/embedding.hpp"
#include "corpusgan/text.hpp"

namespace corpusgan {

enum class Activation { identity, tanh_act, sigmoid, softmax };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

// Probabilities are clamped to this interval before any log.
constexpr double kProbClampLo = 1e-7;
constexpr double kProbClampHi = 1.0 - 1e-7;
double clamp_prob(double p);

struct Layer {
  Matrix W;  // out x in
  Vector b;  // size 0 when the layer has no bias
  Activation act = Activation::identity;
  bool has_bias() const { return b.size() > 0; }
};

struct MlpParams {
  std::vector<Layer> layers;
  int input_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().W.cols()); }
  int output_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.back().W.rows()); }
};

// Checks dimension chaining, finiteness, and that softmax appears only as the
// final activation.
void validate_mlp(const MlpParams& p);

// dims = {input, hidden..., output}, acts has one entry per layer.
// Weights uniform(-s, s) with s = sqrt(6/(fan_in+fan_out)), biases zero.
MlpParams make_mlp(const std::vector<int>& dims, const std::vector<Activation>& acts,
                   bool with_bias, Rng& rng);

struct ForwardCache {
  Vector input;
  std::vector<Vector> post;  // activation output per layer
};

Vector mlp_forward(const MlpParams& p, const Vector& x);
Vector mlp_forward(const MlpParams& p, const Vector& x, ForwardCache* cache);

struct MlpGrads {
  std::vector<Matrix> dW;
  std::vector<Vector> db;
};

MlpGrads zero_grads(const MlpParams& p);
void accumulate(MlpGrads& into, const MlpGrads& g);
void scale_grads(MlpGrads& g, double s);

// Backpropagates dL/dy (gradient w.r.t. the network output). Parameter
// gradients are accumulated into *grads when non-null; returns dL/dx.
Vector mlp_backward(const MlpParams& p, const ForwardCache& cache, Vector dy, MlpGrads* grads);

struct LossGrads {
  double loss = 0.0;
  MlpGrads grads;
};

// -sum[log D(g) + log(1 - D(f))] over originals g and mapped embeddings f.
// D: scalar sigmoid output.
LossGrads wegan_disc_loss(const MlpParams& D, const std::vector<Vector>& originals,
                          const std::vector<Vector>& fakes);

// -sum log(e_label^T C(x)) over (input, label) pairs. C: softmax output.
LossGrads classifier_nll(const MlpParams& C, const std::vector<Vector>& inputs,
                         const std::vector<int>& labels);

struct WeganGenLoss {
  double loss = 0.0;
  std::map<int, Vector> g_grads;  // term index -> d loss / d G.row(term)
};

// sum[log(1 - D(f_G(d))) - log(e_label^T C(f_G(d)))], where f_G(d) is the
// tanh tf-idf document embedding under G. Gradients w.r.t. the G rows the
// batch touches; D and C parameters are left alone.
WeganGenLoss wegan_gen_loss(const MlpParams& D, const MlpParams& C, const EmbeddingMatrix& G,
                            const std::vector<TfIdfDoc>& docs);

// -sum_m sum[log(e_m^T D(real))] - sum_m sum[log(e_{M+m}^T D(fake))].
// D: softmax over 2M classes; batch vectors indexed by corpus.
LossGrads degan_disc_loss(const MlpParams& D, const std::vector<std::vector<Vector>>& real_batches,
                          const std::vector<std::vector<Vector>>& fake_batches);

struct InputGradLoss {
  double loss = 0.0;
  Vector dx;
};

// One generator pairing term: log(p_{M+m} / (p_{M+m} + p_m)) with p = D(x).
// D's parameters are held fixed; returns the gradient w.r.t. x so callers can
// chain into generator parameters.
InputGradLoss degan_pair_loss(const MlpParams& D, const Vector& x, int m, int M);

// p <- p - lr * g. Throws (naming the tensor) on any non-finite gradient.
void sgd_step(MlpParams& p, const MlpGrads& g, double lr);

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_parameter;  // e.g. "layer0.W(2,1)"
};

struct ParamRef {
  std::string name;
  double* data = nullptr;
  long size = 0;
  const double* grad = nullptr;  // analytic gradient, same layout
};

// Central differences per parameter entry: (f(p+e) - f(p-e)) / 2e with
// e = eps_scale * max(1, |p|); rel err = |a - n| / max(|a|, |n|, 1e-8).
// loss_fn re-reads the referenced parameters on every call.
GradCheckReport grad_check(const std::function<double()>& loss_fn,
                           const std::vector<ParamRef>& params, double eps_scale = 1e-5);

// Convenience overload over a full MLP and its analytic gradients.
GradCheckReport grad_check(const std::function<double()>& loss_fn, MlpParams& p,
                           const MlpGrads& analytic, double eps_scale = 1e-5);

std::vector<ParamRef> param_refs(MlpParams& p, const MlpGrads& analytic);

// Text container for checkpoints: layer dims, activation tags, row-major
// weights, every value exact round-trip.
void write_mlp(std::ostream& os, const MlpParams& p);
MlpParams read_mlp(std::istream& is);

void write_matrix(std::ostream& os, const Matrix& m);
Matrix read_matrix(std::istream& is);

}  // namespace corpusgan
