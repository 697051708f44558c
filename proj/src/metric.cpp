#include "wsgeo/metric.hpp"

#include <cmath>
#include <string>

#include "wsgeo/error.hpp"
#include "wsgeo/rng.hpp"

namespace wsgeo {

namespace {

Matrix gather_rows(const Dataset& data, const std::vector<int>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), data.inputs.cols());
  for (size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = data.inputs.row(rows[i]);
  return out;
}

}  // namespace

MetricOperator::MetricOperator(const NetworkSpec& spec, const Vector& w, const Dataset& data,
                               const std::vector<int>& batch_rows)
    : MetricOperator(jacobian(spec, w, gather_rows(data, batch_rows), batch_rows)) {}

MetricOperator::MetricOperator(JacobianBatch jb) : jb_(std::move(jb)) {
  if (jb_.batch == 0) raise(ErrorKind::Dimension, "metric needs a nonempty batch");
  inv_b_ = 1.0 / jb_.batch;
  consistency_check();
}

void MetricOperator::consistency_check() const {
  // One random probe: the stacked-product path must match the per-example
  // J^T(J u) accumulation in index order.
  Rng rng(derive_seed(0x6d657472u, "metric-probe"));
  Vector u(jb_.n);
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = rng.gaussian();
  const Vector fast = apply(u);
  Vector slow = Vector::Zero(jb_.n);
  for (int i = 0; i < jb_.batch; ++i) slow += jb_.apply_t(i, jb_.apply(i, u));
  slow *= inv_b_;
  const double denom = std::max(fast.norm(), 1e-300);
  if ((fast - slow).norm() > 1e-10 * denom)
    raise(ErrorKind::Numeric, "Jacobian batch failed the metric consistency probe");
}

Vector MetricOperator::apply(const Vector& u) const {
  if (u.size() != jb_.n) raise(ErrorKind::Dimension, "metric apply: vector length mismatch");
  return inv_b_ * (jb_.stacked.transpose() * (jb_.stacked * u));
}

double MetricOperator::inner(const Vector& u, const Vector& v) const {
  if (u.size() != jb_.n || v.size() != jb_.n)
    raise(ErrorKind::Dimension, "metric inner: vector length mismatch");
  return u.dot(apply(v));
}

Matrix MetricOperator::dense(int cap) const {
  if (jb_.n > cap)
    raise(ErrorKind::SizeCap, "dense metric materialization refused: n = " +
                                  std::to_string(jb_.n) + " exceeds cap " + std::to_string(cap));
  Matrix g = Matrix::Zero(jb_.n, jb_.n);
  g.selfadjointView<Eigen::Lower>().rankUpdate(jb_.stacked.transpose(), inv_b_);
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return g;
}

std::vector<int> metric_batch_rows(const BatchPolicy& policy, int dataset_size, int segment_index) {
  if (policy.batch_size < 1) raise(ErrorKind::Config, "metric batch size must be >= 1");
  uint64_t seed = derive_seed(policy.seed, "metric-batch");
  if (policy.resample) seed = derive_seed(seed, std::to_string(segment_index));
  Rng rng(seed);
  return rng.sample_indices(dataset_size, policy.batch_size);
}

MetricOperator metric_at(const NetworkSpec& spec, const Vector& w, const Dataset& data,
                         const std::vector<int>& batch_rows) {
  return MetricOperator(spec, w, data, batch_rows);
}

double inner(const MetricOperator& g, const Vector& u, const Vector& v) { return g.inner(u, v); }

QuadratureResult path_energy_and_length(const NetworkSpec& spec,
                                        const std::vector<Vector>& checkpoints,
                                        const Dataset& data, const BatchPolicy& policy) {
  if (checkpoints.size() < 2)
    raise(ErrorKind::Dimension, "path quadrature needs at least 2 checkpoints");
  const Eigen::Index n = spec.param_count();
  for (const auto& w : checkpoints)
    if (w.size() != n) raise(ErrorKind::Dimension, "checkpoint dimension mismatch");

  QuadratureResult res;
  res.segment_energy.reserve(checkpoints.size() - 1);
  res.segment_length.reserve(checkpoints.size() - 1);
  for (size_t j = 0; j + 1 < checkpoints.size(); ++j) {
    const Vector mid = 0.5 * (checkpoints[j] + checkpoints[j + 1]);
    const Vector delta = checkpoints[j + 1] - checkpoints[j];
    const auto rows = metric_batch_rows(policy, data.size(), static_cast<int>(j));
    const MetricOperator g(spec, mid, data, rows);
    const double e = g.inner(delta, delta);
    res.segment_energy.push_back(e);
    res.segment_length.push_back(std::sqrt(std::max(e, 0.0)));
    res.energy += e;
    res.length += res.segment_length.back();
  }
  return res;
}

}  // namespace wsgeo
