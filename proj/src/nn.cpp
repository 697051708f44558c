#include "wsgeo/nn.hpp"

#include <cmath>
#include <numeric>

#include "wsgeo/error.hpp"
#include "wsgeo/rng.hpp"

namespace wsgeo {

using WeightMap = Eigen::Map<const RowMatrix>;

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::Tanh;
  if (s == "relu") return Activation::Relu;
  if (s == "identity") return Activation::Identity;
  raise(ErrorKind::Config, "unknown activation '" + s + "' (tanh|relu|identity)");
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Tanh: return "tanh";
    case Activation::Relu: return "relu";
    case Activation::Identity: return "identity";
  }
  return "?";
}

OutputActivation output_activation_from_string(const std::string& s) {
  if (s == "identity") return OutputActivation::Identity;
  if (s == "softmax_eval") return OutputActivation::SoftmaxEval;
  raise(ErrorKind::Config, "unknown output activation '" + s + "' (identity|softmax_eval)");
}

std::string to_string(OutputActivation a) {
  return a == OutputActivation::Identity ? "identity" : "softmax_eval";
}

NetworkSpec NetworkSpec::dense(std::vector<int> sizes, Activation hidden, OutputActivation out) {
  NetworkSpec spec;
  spec.layer_sizes = std::move(sizes);
  if (spec.layer_sizes.size() >= 2)
    spec.hidden_activations.assign(spec.layer_sizes.size() - 2, hidden);
  spec.output_activation = out;
  spec.validate();
  return spec;
}

void NetworkSpec::validate() const {
  if (layer_sizes.size() < 2) raise(ErrorKind::Config, "network needs at least 2 layer sizes");
  for (int s : layer_sizes)
    if (s < 1) raise(ErrorKind::Config, "layer sizes must be >= 1");
  if (hidden_activations.size() != layer_sizes.size() - 2)
    raise(ErrorKind::Config, "need one hidden activation per hidden layer (" +
                                 std::to_string(layer_sizes.size() - 2) + " expected, " +
                                 std::to_string(hidden_activations.size()) + " given)");
}

int64_t NetworkSpec::param_count() const { return weight_offset(num_layers()); }

int64_t NetworkSpec::weight_offset(int layer) const {
  int64_t off = 0;
  for (int l = 0; l < layer; ++l)
    off += (static_cast<int64_t>(layer_sizes[l]) + 1) * layer_sizes[l + 1];
  return off;
}

int64_t NetworkSpec::bias_offset(int layer) const {
  return weight_offset(layer) + static_cast<int64_t>(layer_sizes[layer]) * layer_sizes[layer + 1];
}

CoordInfo locate_coord(const NetworkSpec& spec, int64_t idx) {
  if (idx < 0 || idx >= spec.param_count()) raise(ErrorKind::Dimension, "coordinate out of range");
  for (int l = 0; l < spec.num_layers(); ++l) {
    const int64_t next = spec.weight_offset(l + 1);
    if (idx < next) {
      const int64_t boff = spec.bias_offset(l);
      const int fi = spec.layer_sizes[l];
      if (idx < boff) {
        const int64_t rel = idx - spec.weight_offset(l);
        return {l, false, static_cast<int>(rel / fi), static_cast<int>(rel % fi)};
      }
      return {l, true, static_cast<int>(idx - boff), 0};
    }
  }
  raise(ErrorKind::Dimension, "coordinate out of range");
}

void check_weights(const NetworkSpec& spec, const Vector& w) {
  if (w.size() != spec.param_count())
    raise(ErrorKind::Dimension, "weight vector length " + std::to_string(w.size()) +
                                    " does not match spec parameter count " +
                                    std::to_string(spec.param_count()));
  if (!w.allFinite()) raise(ErrorKind::Numeric, "weight vector contains non-finite entries");
}

namespace {

inline double act_eval(Activation a, double z) {
  switch (a) {
    case Activation::Tanh: return std::tanh(z);
    case Activation::Relu: return z > 0 ? z : 0.0;
    case Activation::Identity: return z;
  }
  return z;
}

inline double act_deriv(Activation a, double z) {
  switch (a) {
    case Activation::Tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::Relu: return z > 0 ? 1.0 : 0.0;
    case Activation::Identity: return 1.0;
  }
  return 1.0;
}

struct ForwardTrace {
  std::vector<Vector> activations;     // a[0] = x, ..., a[L] = f(x)
  std::vector<Vector> preactivations;  // z per layer
};

ForwardTrace forward_trace(const NetworkSpec& spec, const Vector& w, const Vector& x) {
  ForwardTrace t;
  const int L = spec.num_layers();
  t.activations.reserve(static_cast<size_t>(L) + 1);
  t.preactivations.reserve(static_cast<size_t>(L));
  t.activations.push_back(x);
  for (int l = 0; l < L; ++l) {
    const int fi = spec.layer_sizes[l];
    const int fo = spec.layer_sizes[l + 1];
    WeightMap W(w.data() + spec.weight_offset(l), fo, fi);
    Eigen::Map<const Vector> b(w.data() + spec.bias_offset(l), fo);
    Vector z = W * t.activations.back() + b;
    t.preactivations.push_back(z);
    if (l + 1 < L) {
      const Activation a = spec.hidden_activations[static_cast<size_t>(l)];
      Vector out(fo);
      for (int i = 0; i < fo; ++i) out[i] = act_eval(a, z[i]);
      t.activations.push_back(std::move(out));
    } else {
      t.activations.push_back(std::move(z));
    }
  }
  return t;
}

Vector softmax(const Vector& z) {
  const double m = z.maxCoeff();
  Vector e = (z.array() - m).exp();
  return e / e.sum();
}

// Backpropagates an output-side seed vector through the trace, writing the
// gradient w.r.t. every weight into grad (length n, overwritten).
void backprop_into(const NetworkSpec& spec, const Vector& w, const ForwardTrace& t,
                   const Vector& seed, double* grad) {
  const int L = spec.num_layers();
  Vector delta = seed;
  for (int l = L - 1; l >= 0; --l) {
    const int fi = spec.layer_sizes[l];
    const int fo = spec.layer_sizes[l + 1];
    Eigen::Map<RowMatrix> gW(grad + spec.weight_offset(l), fo, fi);
    Eigen::Map<Vector> gb(grad + spec.bias_offset(l), fo);
    gW.noalias() = delta * t.activations[static_cast<size_t>(l)].transpose();
    gb = delta;
    if (l > 0) {
      WeightMap W(w.data() + spec.weight_offset(l), fo, fi);
      Vector up = W.transpose() * delta;
      const Activation a = spec.hidden_activations[static_cast<size_t>(l - 1)];
      const Vector& z = t.preactivations[static_cast<size_t>(l - 1)];
      for (int i = 0; i < fi; ++i) up[i] *= act_deriv(a, z[i]);
      delta = std::move(up);
    }
  }
}

}  // namespace

Vector forward(const NetworkSpec& spec, const Vector& w, const Vector& x) {
  check_weights(spec, w);
  if (x.size() != spec.input_dim())
    raise(ErrorKind::Dimension, "input length " + std::to_string(x.size()) +
                                    " does not match network input dim " +
                                    std::to_string(spec.input_dim()));
  return forward_trace(spec, w, x).activations.back();
}

Vector JacobianBatch::apply(int i, const Vector& u) const {
  return stacked.middleRows(static_cast<Eigen::Index>(i) * m, m) * u;
}

Vector JacobianBatch::apply_t(int i, const Vector& r) const {
  return stacked.middleRows(static_cast<Eigen::Index>(i) * m, m).transpose() * r;
}

JacobianBatch jacobian(const NetworkSpec& spec, const Vector& w, const Matrix& inputs,
                       std::vector<int> indices) {
  check_weights(spec, w);
  if (inputs.rows() == 0) raise(ErrorKind::Dimension, "jacobian needs a nonempty batch");
  if (inputs.cols() != spec.input_dim())
    raise(ErrorKind::Dimension, "jacobian batch input dim mismatch");
  const int B = static_cast<int>(inputs.rows());
  const int m = spec.output_dim();
  const Eigen::Index n = spec.param_count();

  JacobianBatch jb;
  jb.m = m;
  jb.batch = B;
  jb.n = n;
  jb.indices = std::move(indices);
  jb.stacked.resize(static_cast<Eigen::Index>(B) * m, n);

  Vector seed = Vector::Zero(m);
  for (int i = 0; i < B; ++i) {
    const ForwardTrace t = forward_trace(spec, w, inputs.row(i).transpose());
    if (!t.activations.back().allFinite())
      raise(ErrorKind::Numeric, "non-finite activations at example " + std::to_string(i));
    for (int r = 0; r < m; ++r) {
      seed[r] = 1.0;
      backprop_into(spec, w, t, seed, jb.stacked.row(static_cast<Eigen::Index>(i) * m + r).data());
      seed[r] = 0.0;
    }
  }
  return jb;
}

EvalResult loss_and_accuracy(const NetworkSpec& spec, const Vector& w, const Dataset& ds) {
  check_weights(spec, w);
  ds.validate();
  if (ds.input_dim() != spec.input_dim() || ds.target_dim() != spec.output_dim())
    raise(ErrorKind::Dimension, "dataset dimensions do not match network spec");
  double loss = 0.0;
  int hits = 0;
  for (int i = 0; i < ds.size(); ++i) {
    Vector y = forward(spec, w, ds.inputs.row(i).transpose());
    if (spec.output_activation == OutputActivation::SoftmaxEval) y = softmax(y);
    const Vector target = ds.targets.row(i).transpose();
    loss += (y - target).squaredNorm();
    if (argmax_index(y) == argmax_index(target)) ++hits;
  }
  return {loss / ds.size(), static_cast<double>(hits) / ds.size()};
}

Vector loss_gradient(const NetworkSpec& spec, const Vector& w, const Dataset& ds,
                     const std::vector<int>& rows) {
  check_weights(spec, w);
  if (rows.empty()) raise(ErrorKind::Dimension, "loss_gradient needs a nonempty row set");
  Vector grad = Vector::Zero(spec.param_count());
  Vector g_one(spec.param_count());
  for (int row : rows) {
    const ForwardTrace t = forward_trace(spec, w, ds.inputs.row(row).transpose());
    const Vector seed = 2.0 * (t.activations.back() - ds.targets.row(row).transpose());
    backprop_into(spec, w, t, seed, g_one.data());
    grad += g_one;
  }
  return grad / static_cast<double>(rows.size());
}

TrainResult sgd_train(const NetworkSpec& spec, const Vector& w0, const Dataset& train,
                      const TrainConfig& cfg) {
  check_weights(spec, w0);
  train.validate();
  if (cfg.lr < 0) raise(ErrorKind::Config, "sgd_train needs lr >= 0");
  if (cfg.epochs < 1) raise(ErrorKind::Config, "sgd_train needs epochs >= 1");
  if (cfg.batch_size < 1) raise(ErrorKind::Config, "sgd_train needs batch_size >= 1");
  if (!cfg.mask.empty() && static_cast<int64_t>(cfg.mask.size()) != spec.param_count())
    raise(ErrorKind::Dimension, "mask length does not match parameter count");

  TrainResult res;
  res.weights = w0;
  const auto apply_mask = [&](Vector& w) {
    if (cfg.mask.empty()) return;
    for (Eigen::Index i = 0; i < w.size(); ++i)
      if (!cfg.mask[static_cast<size_t>(i)]) w[i] = 0.0;
  };
  apply_mask(res.weights);

  Rng rng(derive_seed(cfg.seed, "sgd"));
  std::vector<int> order(static_cast<size_t>(train.size()));
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> rows;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(cfg.batch_size)) {
      const size_t end = std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
      rows.assign(order.begin() + static_cast<long>(start), order.begin() + static_cast<long>(end));
      const Vector g = loss_gradient(spec, res.weights, train, rows);
      res.weights -= cfg.lr * g;
      apply_mask(res.weights);
      res.example_grad_evals += static_cast<int64_t>(rows.size());
    }
    const EvalResult ev = loss_and_accuracy(spec, res.weights, train);
    res.history.push_back({epoch, ev.loss, ev.accuracy});
    if (!std::isfinite(ev.loss))
      raise(ErrorKind::Numeric, "training diverged at epoch " + std::to_string(epoch));
  }
  return res;
}

Vector random_init(const NetworkSpec& spec, uint64_t seed) {
  spec.validate();
  Rng rng(derive_seed(seed, "init"));
  Vector w = Vector::Zero(spec.param_count());
  for (int l = 0; l < spec.num_layers(); ++l) {
    const int fi = spec.layer_sizes[l];
    const int fo = spec.layer_sizes[l + 1];
    const double scale = 1.0 / std::sqrt(static_cast<double>(fi));
    double* base = w.data() + spec.weight_offset(l);
    for (int i = 0; i < fi * fo; ++i) base[i] = scale * rng.gaussian();
    // biases stay zero
  }
  return w;
}

}  // namespace wsgeo
