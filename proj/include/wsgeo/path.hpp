#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "wsgeo/nn.hpp"

namespace wsgeo {

// Per-checkpoint evaluation snapshot. accuracy2 is used by two-task walks;
// fields left NaN were not evaluated at that checkpoint.
struct CheckpointRecord {
  double loss = std::numeric_limits<double>::quiet_NaN();
  double accuracy = std::numeric_limits<double>::quiet_NaN();
  double accuracy2 = std::numeric_limits<double>::quiet_NaN();
  double distance_to_goal = std::numeric_limits<double>::quiet_NaN();
};

// An ordered polyline of weight checkpoints with per-segment energy/length
// and per-checkpoint evaluation records. Cumulative sums are accumulated in
// segment order.
struct Path {
  NetworkSpec spec;
  std::vector<Vector> checkpoints;
  std::vector<CheckpointRecord> records;
  std::vector<double> step_energies;  // size checkpoints-1
  std::vector<double> step_lengths;
  double cumulative_energy = 0.0;
  double cumulative_length = 0.0;
  bool converged = false;

  int size() const { return static_cast<int>(checkpoints.size()); }

  void append(Vector w, CheckpointRecord rec);
  // segment between the two most recent checkpoints
  void add_segment(double energy);
  void validate() const;
};

// Equally spaced interpolation between two endpoints with `count` checkpoints
// (count >= 2). The conventional baseline path.
std::vector<Vector> straight_line(const Vector& a, const Vector& b, int count);

}  // namespace wsgeo
