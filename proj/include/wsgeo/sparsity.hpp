#pragma once

#include <cstdint>
#include <vector>

#include "wsgeo/walk.hpp"

namespace wsgeo {

enum class SparsityRule { Magnitude, ByUnit, ExplicitList };

SparsityRule sparsity_rule_from_string(const std::string& s);
std::string to_string(SparsityRule r);

// A fixed goal hyperplane: the set of weight vectors whose masked coordinates
// are zero. Immutable once constructed; the mask is never re-ranked during a
// walk so that distance-to-plane stays meaningful.
struct SparsityPlane {
  std::vector<uint8_t> mask;  // 1 = free, 0 = pinned to zero
  double p = 0.0;
  SparsityRule rule = SparsityRule::Magnitude;
  // Masked coordinates grouped in pruning order, least important first. For
  // the magnitude rule each group is one coordinate; for by-unit one hidden
  // unit (its incoming row, bias and outgoing column).
  std::vector<std::vector<int64_t>> prune_groups;
  int64_t candidate_count = 0;  // coordinates that were eligible for masking

  int64_t masked_count() const;
  double masked_fraction() const;  // over the eligible candidates
  bool on_plane(const Vector& w) const;
};

struct PlaneOptions {
  bool exempt_biases = true;  // magnitude rule only
};

// Magnitude: zeroes the round(p * candidates) smallest-|w| coordinates, ties
// broken toward the lower coordinate index. ByUnit: ranks hidden units by the
// norm of their incoming weights, bias and outgoing weights, and zeroes whole
// units. Throws ErrorKind::Degenerate if a layer would lose all units.
SparsityPlane make_sparsity_plane(const NetworkSpec& spec, const Vector& w, double p,
                                  SparsityRule rule, const PlaneOptions& opts = {});

SparsityPlane explicit_plane(const NetworkSpec& spec, const std::vector<int64_t>& zero_coords);

Vector project_onto_plane(const Vector& w, const SparsityPlane& plane);
double distance_to_plane(const Vector& w, const SparsityPlane& plane);

// Unit direction toward the Euclidean-nearest point of the plane.
class SparsityField : public DirectionField {
 public:
  explicit SparsityField(SparsityPlane plane) : plane_(std::move(plane)) {}
  FieldQuery query(const Vector& w) const override;
  Vector finish(const Vector& w) const override { return project_onto_plane(w, plane_); }
  std::string describe() const override;
  const SparsityPlane& plane() const { return plane_; }

 private:
  SparsityPlane plane_;
};

// Affine goal set: the named coordinates pinned to given values, everything
// else free. Covers sparsification (values all zero) and unit restoration
// (re-initialized anchors).
class PinnedCoordsField : public DirectionField {
 public:
  PinnedCoordsField(std::vector<int64_t> indices, Vector values);
  FieldQuery query(const Vector& w) const override;
  Vector finish(const Vector& w) const override;
  std::string describe() const override;

 private:
  std::vector<int64_t> indices_;
  Vector values_;
};

struct PruneTrainConfig {
  int prune_per_cycle = 1;  // units (ByUnit) or coordinates (Magnitude) per cycle
  int epochs_per_cycle = 10;
  double lr = 0.1;
  int batch_size = 32;
  uint64_t seed = 0;
};

struct PruneTrainResult {
  Path path;  // one checkpoint per cycle, plus the starting point
  int cycles = 0;
  int total_epochs = 0;
  int64_t example_grad_evals = 0;
};

// The conventional comparator: alternately zero the next group of masked
// coordinates and fine-tune under the accumulated mask until the full plane
// mask is applied.
PruneTrainResult prune_train_baseline(const NetworkSpec& spec, const Vector& w,
                                      const SparsityPlane& plane, const Dataset& train,
                                      const PruneTrainConfig& cfg, const Evaluator& eval);

struct TransitionResult {
  std::vector<WalkResult> legs;
  bool completed = false;  // false when a leg failed to converge (sequence aborted)
};

// Chains geodesic walks through a list of sparsity configurations; each
// endpoint seeds the next leg. Coordinates that were pinned to zero by the
// previous configuration but are free again are walked toward small seeded
// anchors (0.1x the RMS of the layer's surviving weights).
TransitionResult transition_sequence(const NetworkSpec& spec, const Vector& w0,
                                     const std::vector<SparsityPlane>& planes,
                                     const WalkConfig& cfg, const Dataset& metric_data,
                                     const Evaluator& eval, uint64_t restore_seed);

}  // namespace wsgeo
