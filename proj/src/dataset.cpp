#include "wsgeo/dataset.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "wsgeo/error.hpp"
#include "wsgeo/rng.hpp"

namespace wsgeo {

void Dataset::validate() const {
  if (inputs.rows() == 0) raise(ErrorKind::Dimension, "dataset has no examples");
  if (targets.rows() != inputs.rows())
    raise(ErrorKind::Dimension, "dataset inputs/targets cardinality mismatch: " +
                                    std::to_string(inputs.rows()) + " vs " +
                                    std::to_string(targets.rows()));
  if (!inputs.allFinite() || !targets.allFinite())
    raise(ErrorKind::Numeric, "dataset contains non-finite entries");
}

int argmax_index(const Eigen::Ref<const Vector>& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

Dataset two_moons(int n, double noise, uint64_t seed) {
  if (n < 2) raise(ErrorKind::Config, "two_moons needs n >= 2");
  if (noise < 0) raise(ErrorKind::Config, "two_moons needs noise >= 0");
  const int n0 = n / 2;
  const int n1 = n - n0;
  Dataset ds;
  ds.inputs.resize(n, 2);
  ds.targets = Matrix::Zero(n, 2);
  Rng rng(seed);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < n0; ++i) {
    const double t = n0 > 1 ? pi * i / (n0 - 1) : 0.0;
    ds.inputs(i, 0) = std::cos(t) + noise * rng.gaussian();
    ds.inputs(i, 1) = std::sin(t) + noise * rng.gaussian();
    ds.targets(i, 0) = 1.0;
  }
  for (int i = 0; i < n1; ++i) {
    const double t = n1 > 1 ? pi * i / (n1 - 1) : 0.0;
    ds.inputs(n0 + i, 0) = 1.0 - std::cos(t) + noise * rng.gaussian();
    ds.inputs(n0 + i, 1) = 0.5 - std::sin(t) + noise * rng.gaussian();
    ds.targets(n0 + i, 1) = 1.0;
  }
  return ds;
}

Dataset gaussian_blobs(int n, double noise, uint64_t seed, int classes, double box) {
  if (n < 2) raise(ErrorKind::Config, "gaussian_blobs needs n >= 2");
  if (noise < 0) raise(ErrorKind::Config, "gaussian_blobs needs noise >= 0");
  if (classes < 1) raise(ErrorKind::Config, "gaussian_blobs needs classes >= 1");
  Rng rng(seed);
  std::vector<std::pair<double, double>> centers(static_cast<size_t>(classes));
  for (auto& c : centers) c = {rng.uniform(-box, box), rng.uniform(-box, box)};
  Dataset ds;
  ds.inputs.resize(n, 2);
  ds.targets = Matrix::Zero(n, classes);
  for (int i = 0; i < n; ++i) {
    const int c = i % classes;  // as even a split as n allows
    ds.inputs(i, 0) = centers[static_cast<size_t>(c)].first + noise * rng.gaussian();
    ds.inputs(i, 1) = centers[static_cast<size_t>(c)].second + noise * rng.gaussian();
    ds.targets(i, c) = 1.0;
  }
  return ds;
}

namespace {

Dataset select_rows(const Dataset& ds, const std::vector<int>& rows, std::string tag) {
  Dataset out;
  out.inputs.resize(static_cast<Eigen::Index>(rows.size()), ds.inputs.cols());
  out.targets.resize(static_cast<Eigen::Index>(rows.size()), ds.targets.cols());
  for (size_t i = 0; i < rows.size(); ++i) {
    out.inputs.row(static_cast<Eigen::Index>(i)) = ds.inputs.row(rows[i]);
    out.targets.row(static_cast<Eigen::Index>(i)) = ds.targets.row(rows[i]);
  }
  out.tag = std::move(tag);
  return out;
}

}  // namespace

std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, double test_fraction, uint64_t seed) {
  if (test_fraction < 0 || test_fraction >= 1)
    raise(ErrorKind::Config, "test_fraction must be in [0, 1)");
  std::vector<int> order(static_cast<size_t>(ds.size()));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, "split"));
  rng.shuffle(order);
  const int n_test = static_cast<int>(std::llround(test_fraction * ds.size()));
  const int n_train = ds.size() - n_test;
  std::vector<int> train_rows(order.begin(), order.begin() + n_train);
  std::vector<int> test_rows(order.begin() + n_train, order.end());
  return {select_rows(ds, train_rows, "train"), select_rows(ds, test_rows, "test")};
}

Dataset permute_inputs(const Dataset& ds, uint64_t seed) {
  std::vector<int> perm(static_cast<size_t>(ds.input_dim()));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(derive_seed(seed, "pixel-permutation"));
  rng.shuffle(perm);
  Dataset out = ds;
  for (int j = 0; j < ds.input_dim(); ++j) out.inputs.col(j) = ds.inputs.col(perm[static_cast<size_t>(j)]);
  return out;
}

Dataset take_prefix(const Dataset& ds, int n) {
  if (n <= 0 || n >= ds.size()) return ds;
  Dataset out;
  out.inputs = ds.inputs.topRows(n);
  out.targets = ds.targets.topRows(n);
  out.tag = ds.tag;
  return out;
}

}  // namespace wsgeo
