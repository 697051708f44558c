#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>

namespace wsgeo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Inputs are one example per row; targets are real vectors of the network's
// output dimension (one-hot for classification tasks, so squared output
// distance and task loss live in the same space).
struct Dataset {
  Matrix inputs;   // N x k
  Matrix targets;  // N x m
  std::string tag = "train";

  int size() const { return static_cast<int>(inputs.rows()); }
  int input_dim() const { return static_cast<int>(inputs.cols()); }
  int target_dim() const { return static_cast<int>(targets.cols()); }
  void validate() const;  // nonempty, matching cardinalities, finite entries
};

// Two interleaved half circles, 2 classes, points evenly spaced along each
// arc before noise so that noise=0 lands exactly on the canonical loci.
Dataset two_moons(int n, double noise, uint64_t seed);

// Isotropic Gaussian clusters around seeded centers in [-box, box]^2.
Dataset gaussian_blobs(int n, double noise, uint64_t seed, int classes = 3, double box = 5.0);

// Seeded shuffle followed by a contiguous split; fraction is the test share.
std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, double test_fraction, uint64_t seed);

// Applies one fixed seeded permutation to every input vector. Used to build a
// second task with identical dimensions but unrelated pixel layout.
Dataset permute_inputs(const Dataset& ds, uint64_t seed);

// First n examples (whole dataset when n <= 0 or n >= size).
Dataset take_prefix(const Dataset& ds, int n);

int argmax_index(const Eigen::Ref<const Vector>& v);

}  // namespace wsgeo
