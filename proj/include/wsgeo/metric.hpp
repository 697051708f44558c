#pragma once

#include <cstdint>
#include <vector>

#include "wsgeo/nn.hpp"

namespace wsgeo {

// Pullback metric g_w = (1/B) sum_i J_i^T J_i at a weight point, applied
// through Jacobian products; the n x n matrix is materialized only for small
// networks. Immutable after construction and safe to share across threads.
class MetricOperator {
 public:
  static constexpr int kDefaultDenseCap = 200;

  // batch_rows selects the metric batch from the dataset (index order is the
  // reduction order and is part of the contract).
  MetricOperator(const NetworkSpec& spec, const Vector& w, const Dataset& data,
                 const std::vector<int>& batch_rows);
  explicit MetricOperator(JacobianBatch jb);

  Eigen::Index dim() const { return jb_.n; }
  int batch_size() const { return jb_.batch; }
  const JacobianBatch& jacobians() const { return jb_; }

  Vector apply(const Vector& u) const;  // g u
  double inner(const Vector& u, const Vector& v) const;  // u^T g v

  // Dense n x n materialization; refuses above the cap (the operator form is
  // the production path).
  Matrix dense(int cap = kDefaultDenseCap) const;

 private:
  void consistency_check() const;
  JacobianBatch jb_;
  double inv_b_ = 0.0;
};

// Deterministic metric-batch selection shared by the walker and the path
// quadrature: fixed policy draws one batch per run seed, the resampling
// policy re-draws per segment index.
struct BatchPolicy {
  int batch_size = 64;
  bool resample = false;
  uint64_t seed = 0;
};
std::vector<int> metric_batch_rows(const BatchPolicy& policy, int dataset_size, int segment_index);

MetricOperator metric_at(const NetworkSpec& spec, const Vector& w, const Dataset& data,
                         const std::vector<int>& batch_rows);

double inner(const MetricOperator& g, const Vector& u, const Vector& v);

struct QuadratureResult {
  std::vector<double> segment_energy;
  std::vector<double> segment_length;
  double energy = 0.0;  // sum of segment <dw,dw> at the midpoint metric
  double length = 0.0;  // sum of sqrt(max(segment energy, 0))
};

// Midpoint-metric quadrature over a checkpoint polyline. Both the energy
// (integrand as printed, squared speed) and the conventional square-root
// length are reported.
QuadratureResult path_energy_and_length(const NetworkSpec& spec,
                                        const std::vector<Vector>& checkpoints,
                                        const Dataset& data, const BatchPolicy& policy);

}  // namespace wsgeo
