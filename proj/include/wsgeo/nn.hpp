#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wsgeo/dataset.hpp"

namespace wsgeo {

enum class Activation { Tanh, Relu, Identity };
enum class OutputActivation { Identity, SoftmaxEval };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);
OutputActivation output_activation_from_string(const std::string& s);
std::string to_string(OutputActivation a);

// Flat weight layout: layers in order; within a layer the weight matrix
// (fan_out x fan_in, row-major) comes first, then the bias vector.
inline constexpr const char* kFlattenOrderId = "layer-major/row-major/bias-after-weight/v1";

struct NetworkSpec {
  std::vector<int> layer_sizes;                // length >= 2, entries >= 1
  std::vector<Activation> hidden_activations;  // one per hidden layer
  OutputActivation output_activation = OutputActivation::Identity;

  static NetworkSpec dense(std::vector<int> sizes, Activation hidden = Activation::Tanh,
                           OutputActivation out = OutputActivation::Identity);

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  int num_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
  int num_hidden() const { return num_layers() - 1; }
  int64_t param_count() const;
  int64_t weight_offset(int layer) const;  // start of layer's weight block
  int64_t bias_offset(int layer) const;    // start of layer's bias block
  void validate() const;

  bool operator==(const NetworkSpec&) const = default;
};

// Locates a flat coordinate: which layer, weight cell or bias slot.
struct CoordInfo {
  int layer;     // 0-based layer index
  bool is_bias;
  int row;       // output unit index
  int col;       // input unit index (weights only)
};
CoordInfo locate_coord(const NetworkSpec& spec, int64_t idx);

void check_weights(const NetworkSpec& spec, const Vector& w);

// Raw network function f(x, w); the output activation is applied only by the
// evaluation helpers, never here, so f stays the smooth map the metric sees.
Vector forward(const NetworkSpec& spec, const Vector& w, const Vector& x);

// Per-example output-weight Jacobians, stacked row-wise into one
// (batch*m) x n matrix. Row block i holds J_i with J_i(r, c) = df_r/dw_c.
struct JacobianBatch {
  int m = 0;
  int batch = 0;
  Eigen::Index n = 0;
  RowMatrix stacked;         // (batch*m) x n, rows contiguous
  std::vector<int> indices;  // dataset rows the batch was built from

  Matrix jacobian_of(int i) const { return stacked.middleRows(static_cast<Eigen::Index>(i) * m, m); }
  Vector apply(int i, const Vector& u) const;    // J_i u
  Vector apply_t(int i, const Vector& r) const;  // J_i^T r
};

// Reverse-mode accumulation, one backward pass per output row. indices, when
// provided, are recorded in the result for bookkeeping (rows of inputs are
// used in the given order either way).
JacobianBatch jacobian(const NetworkSpec& spec, const Vector& w, const Matrix& inputs,
                       std::vector<int> indices = {});

struct EvalResult {
  double loss = 0.0;      // mean over examples of |f(x) - y|^2
  double accuracy = 0.0;  // fraction of argmax matches
};
EvalResult loss_and_accuracy(const NetworkSpec& spec, const Vector& w, const Dataset& ds);

// Gradient of the per-example squared error, averaged over the given rows.
Vector loss_gradient(const NetworkSpec& spec, const Vector& w, const Dataset& ds,
                     const std::vector<int>& rows);

struct TrainConfig {
  double lr = 0.1;
  int epochs = 50;
  int batch_size = 32;
  uint64_t seed = 0;
  std::vector<uint8_t> mask;  // empty = unmasked; else length n, 0 = pinned to zero
};

struct EpochRecord {
  int epoch;
  double loss;
  double accuracy;
};

struct TrainResult {
  Vector weights;
  std::vector<EpochRecord> history;
  int64_t example_grad_evals = 0;  // one per example visit (one backward pass each)
};

// Plain minibatch SGD on the squared-error loss. With a mask, pinned
// coordinates are zeroed at entry and after every update. Reproducible from
// the seed. Throws ErrorKind::Numeric with the epoch index on divergence.
TrainResult sgd_train(const NetworkSpec& spec, const Vector& w0, const Dataset& train,
                      const TrainConfig& cfg);

// Weights ~ N(0, 1/fan_in), biases zero.
Vector random_init(const NetworkSpec& spec, uint64_t seed);

}  // namespace wsgeo
