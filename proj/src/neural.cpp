#include "corpusgan/neural.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

namespace corpusgan {

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::tanh_act: return "tanh";
    case Activation::sigmoid: return "sigmoid";
    case Activation::softmax: return "softmax";
  }
  return "?";
}

Activation activation_from_name(const std::string& name) {
  if (name == "identity") return Activation::identity;
  if (name == "tanh") return Activation::tanh_act;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "softmax") return Activation::softmax;
  throw error("unknown activation: " + name);
}

double clamp_prob(double p) { return std::clamp(p, kProbClampLo, kProbClampHi); }

void validate_mlp(const MlpParams& p) {
  if (p.layers.empty()) throw error("mlp: no layers");
  for (std::size_t l = 0; l < p.layers.size(); l++) {
    const Layer& layer = p.layers[l];
    if (layer.W.size() == 0) throw error("mlp: empty weight matrix in layer " + std::to_string(l));
    if (!layer.W.allFinite()) throw error("mlp: non-finite weight in layer " + std::to_string(l));
    if (layer.has_bias()) {
      if (layer.b.size() != layer.W.rows())
        throw error("mlp: bias size mismatch in layer " + std::to_string(l));
      if (!layer.b.allFinite()) throw error("mlp: non-finite bias in layer " + std::to_string(l));
    }
    if (l + 1 < p.layers.size()) {
      if (layer.act == Activation::softmax)
        throw error("mlp: softmax before the final layer");
      if (p.layers[l + 1].W.cols() != layer.W.rows())
        throw error("mlp: dimension mismatch between layers " + std::to_string(l) + " and " +
                    std::to_string(l + 1));
    }
  }
}

MlpParams make_mlp(const std::vector<int>& dims, const std::vector<Activation>& acts,
                   bool with_bias, Rng& rng) {
  if (dims.size() < 2) throw error("make_mlp: need at least input and output dims");
  if (acts.size() != dims.size() - 1) throw error("make_mlp: one activation per layer required");
  MlpParams p;
  for (std::size_t l = 0; l + 1 < dims.size(); l++) {
    Layer layer;
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    const double s = std::sqrt(6.0 / (fan_in + fan_out));
    layer.W.resize(fan_out, fan_in);
    for (int i = 0; i < fan_out; i++)
      for (int j = 0; j < fan_in; j++) layer.W(i, j) = rng.uniform(-s, s);
    if (with_bias) layer.b = Vector::Zero(fan_out);
    layer.act = acts[l];
    p.layers.push_back(std::move(layer));
  }
  validate_mlp(p);
  return p;
}

namespace {

Vector apply_activation(Activation act, Vector z) {
  switch (act) {
    case Activation::identity:
      return z;
    case Activation::tanh_act:
      return z.array().tanh();
    case Activation::sigmoid:
      for (long i = 0; i < z.size(); i++) z[i] = clamp_prob(1.0 / (1.0 + std::exp(-z[i])));
      return z;
    case Activation::softmax: {
      const double m = z.maxCoeff();
      Vector e = (z.array() - m).exp();
      return e / e.sum();
    }
  }
  throw error("apply_activation: bad tag");
}

// dL/dz from dL/dy and the activation output y
Vector activation_backward(Activation act, const Vector& y, const Vector& dy) {
  switch (act) {
    case Activation::identity:
      return dy;
    case Activation::tanh_act:
      return dy.array() * (1.0 - y.array().square());
    case Activation::sigmoid:
      return dy.array() * y.array() * (1.0 - y.array());
    case Activation::softmax:
      return y.array() * (dy.array() - dy.dot(y));
  }
  throw error("activation_backward: bad tag");
}

}  // namespace

Vector mlp_forward(const MlpParams& p, const Vector& x) { return mlp_forward(p, x, nullptr); }

Vector mlp_forward(const MlpParams& p, const Vector& x, ForwardCache* cache) {
  if (p.layers.empty()) throw error("mlp_forward: no layers");
  if (x.size() != p.layers.front().W.cols())
    throw error("mlp_forward: input size " + std::to_string(x.size()) + " != layer input " +
                std::to_string(p.layers.front().W.cols()));
  if (cache) {
    cache->input = x;
    cache->post.clear();
  }
  Vector h = x;
  for (const Layer& layer : p.layers) {
    Vector z = layer.W * h;
    if (layer.has_bias()) z += layer.b;
    h = apply_activation(layer.act, std::move(z));
    if (cache) cache->post.push_back(h);
  }
  return h;
}

MlpGrads zero_grads(const MlpParams& p) {
  MlpGrads g;
  for (const Layer& layer : p.layers) {
    g.dW.push_back(Matrix::Zero(layer.W.rows(), layer.W.cols()));
    g.db.push_back(layer.has_bias() ? Vector::Zero(layer.b.size()) : Vector());
  }
  return g;
}

void accumulate(MlpGrads& into, const MlpGrads& g) {
  if (into.dW.size() != g.dW.size()) throw error("accumulate: layer count mismatch");
  for (std::size_t l = 0; l < g.dW.size(); l++) {
    into.dW[l] += g.dW[l];
    if (g.db[l].size()) into.db[l] += g.db[l];
  }
}

void scale_grads(MlpGrads& g, double s) {
  for (auto& m : g.dW) m *= s;
  for (auto& v : g.db)
    if (v.size()) v *= s;
}

Vector mlp_backward(const MlpParams& p, const ForwardCache& cache, Vector dy, MlpGrads* grads) {
  if (cache.post.size() != p.layers.size()) throw error("mlp_backward: stale cache");
  for (int l = static_cast<int>(p.layers.size()) - 1; l >= 0; l--) {
    const Layer& layer = p.layers[l];
    const Vector& y = cache.post[l];
    const Vector& x = l == 0 ? cache.input : cache.post[l - 1];
    Vector dz = activation_backward(layer.act, y, dy);
    if (grads) {
      grads->dW[l] += dz * x.transpose();
      if (layer.has_bias()) grads->db[l] += dz;
    }
    dy = layer.W.transpose() * dz;
  }
  return dy;
}

LossGrads wegan_disc_loss(const MlpParams& D, const std::vector<Vector>& originals,
                          const std::vector<Vector>& fakes) {
  if (D.output_dim() != 1 || D.layers.back().act != Activation::sigmoid)
    throw error("wegan_disc_loss: discriminator must end in a scalar sigmoid");
  LossGrads out;
  out.grads = zero_grads(D);
  ForwardCache cache;
  for (const Vector& g : originals) {
    const double y = mlp_forward(D, g, &cache)[0];
    out.loss -= std::log(clamp_prob(y));
    Vector dy(1);
    dy[0] = (y <= kProbClampLo || y >= kProbClampHi) ? 0.0 : -1.0 / y;
    mlp_backward(D, cache, dy, &out.grads);
  }
  for (const Vector& f : fakes) {
    const double y = mlp_forward(D, f, &cache)[0];
    const double q = 1.0 - y;
    out.loss -= std::log(clamp_prob(q));
    Vector dy(1);
    dy[0] = (q <= kProbClampLo || q >= kProbClampHi) ? 0.0 : 1.0 / q;
    mlp_backward(D, cache, dy, &out.grads);
  }
  return out;
}

LossGrads classifier_nll(const MlpParams& C, const std::vector<Vector>& inputs,
                         const std::vector<int>& labels) {
  if (C.layers.back().act != Activation::softmax)
    throw error("classifier_nll: classifier must end in softmax");
  if (inputs.size() != labels.size()) throw error("classifier_nll: inputs/labels length mismatch");
  const int K = C.output_dim();
  LossGrads out;
  out.grads = zero_grads(C);
  ForwardCache cache;
  for (std::size_t i = 0; i < inputs.size(); i++) {
    const int k = labels[i];
    if (k < 0 || k >= K) throw error("classifier_nll: label out of range");
    Vector y = mlp_forward(C, inputs[i], &cache);
    const double pk = y[k];
    out.loss -= std::log(clamp_prob(pk));
    Vector dy = Vector::Zero(K);
    if (pk > kProbClampLo && pk < kProbClampHi) dy[k] = -1.0 / pk;
    mlp_backward(C, cache, dy, &out.grads);
  }
  return out;
}

WeganGenLoss wegan_gen_loss(const MlpParams& D, const MlpParams& C, const EmbeddingMatrix& G,
                            const std::vector<TfIdfDoc>& docs) {
  WeganGenLoss out;
  ForwardCache dcache, ccache;
  for (const TfIdfDoc& doc : docs) {
    const Vector y = doc_embed(doc.weights, G, Squash::tanh_squash);

    const double dval = mlp_forward(D, y, &dcache)[0];
    const double q = 1.0 - dval;
    out.loss += std::log(clamp_prob(q));
    Vector d_dy(1);
    d_dy[0] = (q <= kProbClampLo || q >= kProbClampHi) ? 0.0 : -1.0 / q;
    Vector dx = mlp_backward(D, dcache, d_dy, nullptr);

    Vector cy = mlp_forward(C, y, &ccache);
    const int k = doc.label;
    if (k < 0 || k >= C.output_dim()) throw error("wegan_gen_loss: label out of range");
    const double pk = cy[k];
    out.loss -= std::log(clamp_prob(pk));
    Vector c_dy = Vector::Zero(C.output_dim());
    if (pk > kProbClampLo && pk < kProbClampHi) c_dy[k] = -1.0 / pk;
    dx += mlp_backward(C, ccache, c_dy, nullptr);

    // through the tanh document embedding into the touched rows of G
    const Vector ds = dx.array() * (1.0 - y.array().square());
    for (const auto& [idx, w] : doc.weights) {
      auto it = out.g_grads.find(idx);
      if (it == out.g_grads.end())
        out.g_grads.emplace(idx, w * ds);
      else
        it->second += w * ds;
    }
  }
  return out;
}

LossGrads degan_disc_loss(const MlpParams& D, const std::vector<std::vector<Vector>>& real_batches,
                          const std::vector<std::vector<Vector>>& fake_batches) {
  const int M = static_cast<int>(real_batches.size());
  if (static_cast<int>(fake_batches.size()) != M)
    throw error("degan_disc_loss: real/fake corpus count mismatch");
  if (D.output_dim() != 2 * M)
    throw error("degan_disc_loss: discriminator must output 2M classes");
  if (D.layers.back().act != Activation::softmax)
    throw error("degan_disc_loss: discriminator must end in softmax");

  LossGrads out;
  out.grads = zero_grads(D);
  ForwardCache cache;
  auto take = [&](const Vector& x, int target) {
    Vector y = mlp_forward(D, x, &cache);
    const double pk = y[target];
    out.loss -= std::log(clamp_prob(pk));
    Vector dy = Vector::Zero(2 * M);
    if (pk > kProbClampLo && pk < kProbClampHi) dy[target] = -1.0 / pk;
    mlp_backward(D, cache, dy, &out.grads);
  };
  for (int m = 0; m < M; m++) {
    for (const Vector& x : real_batches[m]) take(x, m);
    for (const Vector& x : fake_batches[m]) take(x, M + m);
  }
  return out;
}

InputGradLoss degan_pair_loss(const MlpParams& D, const Vector& x, int m, int M) {
  if (m < 0 || m >= M) throw error("degan_pair_loss: corpus index out of range");
  if (D.output_dim() != 2 * M) throw error("degan_pair_loss: discriminator must output 2M classes");
  ForwardCache cache;
  Vector y = mlp_forward(D, x, &cache);
  const double p = y[m];
  const double q = y[M + m];
  const double den = std::max(p + q, 1e-300);
  const double ratio = q / den;

  InputGradLoss out;
  out.loss = std::log(clamp_prob(ratio));
  Vector dy = Vector::Zero(2 * M);
  if (ratio > kProbClampLo && ratio < kProbClampHi) {
    // d log(q/(p+q)) / dq = p / (q (p+q)),  d/dp = -1 / (p+q)
    dy[M + m] = p / std::max(q * den, 1e-300);
    dy[m] = -1.0 / den;
  }
  out.dx = mlp_backward(D, cache, dy, nullptr);
  return out;
}

void sgd_step(MlpParams& p, const MlpGrads& g, double lr) {
  if (lr < 0) throw error("sgd_step: negative learning rate");
  if (g.dW.size() != p.layers.size()) throw error("sgd_step: gradient/parameter layer mismatch");
  for (std::size_t l = 0; l < p.layers.size(); l++) {
    if (!g.dW[l].allFinite())
      throw error("sgd_step: non-finite gradient for layer " + std::to_string(l) + " weights");
    if (g.db[l].size() && !g.db[l].allFinite())
      throw error("sgd_step: non-finite gradient for layer " + std::to_string(l) + " bias");
  }
  for (std::size_t l = 0; l < p.layers.size(); l++) {
    p.layers[l].W -= lr * g.dW[l];
    if (p.layers[l].has_bias() && g.db[l].size()) p.layers[l].b -= lr * g.db[l];
  }
}

std::vector<ParamRef> param_refs(MlpParams& p, const MlpGrads& analytic) {
  if (analytic.dW.size() != p.layers.size()) throw error("param_refs: layer count mismatch");
  std::vector<ParamRef> refs;
  for (std::size_t l = 0; l < p.layers.size(); l++) {
    refs.push_back({"layer" + std::to_string(l) + ".W", p.layers[l].W.data(),
                    static_cast<long>(p.layers[l].W.size()), analytic.dW[l].data()});
    if (p.layers[l].has_bias())
      refs.push_back({"layer" + std::to_string(l) + ".b", p.layers[l].b.data(),
                      static_cast<long>(p.layers[l].b.size()), analytic.db[l].data()});
  }
  return refs;
}

GradCheckReport grad_check(const std::function<double()>& loss_fn,
                           const std::vector<ParamRef>& params, double eps_scale) {
  GradCheckReport report;
  for (const ParamRef& ref : params) {
    for (long i = 0; i < ref.size; i++) {
      const double saved = ref.data[i];
      const double eps = eps_scale * std::max(1.0, std::abs(saved));
      ref.data[i] = saved + eps;
      const double up = loss_fn();
      ref.data[i] = saved - eps;
      const double down = loss_fn();
      ref.data[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double analytic = ref.grad[i];
      const double rel =
          std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_parameter = ref.name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return report;
}

GradCheckReport grad_check(const std::function<double()>& loss_fn, MlpParams& p,
                           const MlpGrads& analytic, double eps_scale) {
  return grad_check(loss_fn, param_refs(p, analytic), eps_scale);
}

void write_matrix(std::ostream& os, const Matrix& m) {
  os << m.rows() << ' ' << m.cols() << '\n';
  for (long i = 0; i < m.rows(); i++) {
    for (long j = 0; j < m.cols(); j++) {
      if (j) os << ' ';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

Matrix read_matrix(std::istream& is) {
  long rows = -1, cols = -1;
  is >> rows >> cols;
  if (!is || rows < 0 || cols < 0) throw error("read_matrix: malformed header");
  Matrix m(rows, cols);
  for (long i = 0; i < rows; i++)
    for (long j = 0; j < cols; j++) {
      if (!(is >> m(i, j))) throw error("read_matrix: truncated data");
    }
  return m;
}

void write_mlp(std::ostream& os, const MlpParams& p) {
  os << "mlp " << p.layers.size() << '\n';
  for (const Layer& layer : p.layers) {
    os << "layer " << layer.W.rows() << ' ' << layer.W.cols() << ' ' << (layer.has_bias() ? 1 : 0)
       << ' ' << activation_name(layer.act) << '\n';
    write_matrix(os, layer.W);
    if (layer.has_bias()) {
      for (long i = 0; i < layer.b.size(); i++) {
        if (i) os << ' ';
        os << format_double(layer.b[i]);
      }
      os << '\n';
    }
  }
}

MlpParams read_mlp(std::istream& is) {
  std::string tag;
  std::size_t n_layers = 0;
  is >> tag >> n_layers;
  if (!is || tag != "mlp") throw error("read_mlp: missing mlp header");
  MlpParams p;
  for (std::size_t l = 0; l < n_layers; l++) {
    long rows = 0, cols = 0;
    int has_bias = 0;
    std::string act;
    is >> tag >> rows >> cols >> has_bias >> act;
    if (!is || tag != "layer") throw error("read_mlp: malformed layer header");
    Layer layer;
    layer.act = activation_from_name(act);
    layer.W = read_matrix(is);
    if (layer.W.rows() != rows || layer.W.cols() != cols)
      throw error("read_mlp: weight shape disagrees with layer header");
    if (has_bias) {
      layer.b.resize(rows);
      for (long i = 0; i < rows; i++) {
        if (!(is >> layer.b[i])) throw error("read_mlp: truncated bias");
      }
    }
    p.layers.push_back(std::move(layer));
  }
  validate_mlp(p);
  return p;
}

}  // namespace corpusgan
