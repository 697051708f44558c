#pragma once

#include <memory>
#include <string>
#include <vector>

#include "wsgeo/metric.hpp"
#include "wsgeo/path.hpp"
#include "wsgeo/trs.hpp"

namespace wsgeo {

// A rule producing the goal direction at any weight point. `finish` is the
// exact projection onto the goal set, applied once the stop rule fires so the
// endpoint lies exactly in the goal set.
struct FieldQuery {
  Vector direction;  // unit norm unless arrived
  double distance = 0.0;
  bool arrived = false;
};

class DirectionField {
 public:
  virtual ~DirectionField() = default;
  virtual FieldQuery query(const Vector& w) const = 0;
  virtual Vector finish(const Vector& w) const = 0;
  virtual std::string describe() const = 0;
};

struct WalkConfig {
  std::vector<double> beta = {10.0};  // per-step schedule; the last entry repeats
  double radius = 0.1;                // theta^T theta <= radius^2
  double eps_rel = 1e-3;              // stop threshold = eps_rel * ||w_start||
  double eps_abs = 0.0;               // overrides eps_rel when > 0
  int max_steps = 500;
  int metric_batch = 64;
  bool resample = false;  // re-draw the metric batch every step
  uint64_t seed = 0;
  int eval_every = 1;  // checkpoint evaluation cadence
  // Near the goal the full radius would overshoot the nearest goal point;
  // shrinking to the remaining distance keeps steps aimed.
  bool clamp_radius_to_distance = true;
  TrsOptions trs;

  double beta_at(int step) const {
    if (beta.empty()) return 0.0;
    return beta[std::min(static_cast<size_t>(step), beta.size() - 1)];
  }
};

struct WorkCounters {
  int64_t metric_builds = 0;
  int64_t jacobian_rows = 0;  // backward passes spent building metrics
  int64_t cg_iterations = 0;
};

struct WalkResult {
  Path path;
  int steps = 0;  // tangent steps taken (excludes the finishing projection)
  WorkCounters work;
  std::vector<double> lambdas;  // multiplier per tangent step
};

// Loss/accuracy recorder for walk checkpoints. eval2, when given, fills the
// second accuracy column (two-task walks).
class Evaluator {
 public:
  Evaluator(const NetworkSpec& spec, const Dataset* eval1, const Dataset* eval2 = nullptr)
      : spec_(&spec), eval1_(eval1), eval2_(eval2) {}
  CheckpointRecord evaluate(const Vector& w, double distance) const;

 private:
  const NetworkSpec* spec_;
  const Dataset* eval1_;
  const Dataset* eval2_;
};

// The approximate-geodesic walker: build the metric per batch policy, query
// the field, solve the tangent step, advance, repeat until the stop rule
// fires or max_steps is exhausted (returned path is then flagged
// not-converged; that is not an error).
WalkResult walk(const NetworkSpec& spec, const Vector& w_start, const DirectionField& field,
                const WalkConfig& cfg, const Dataset& metric_data, const Evaluator& eval);

struct WalkVariantOutcome {
  int config_index = 0;
  bool converged = false;
  double energy = 0.0;
  double length = 0.0;
  int steps = 0;
};

struct BestOfWalksResult {
  WalkResult best;
  int best_index = -1;
  std::vector<WalkVariantOutcome> leaderboard;
};

// Runs every variant and returns the converged path with minimal cumulative
// energy (ties: cumulative length, then config index). Throws
// ErrorKind::NotConverged when no variant converges.
BestOfWalksResult best_of_walks(const NetworkSpec& spec, const Vector& w_start,
                                const DirectionField& field,
                                const std::vector<WalkConfig>& variants,
                                const Dataset& metric_data, const Evaluator& eval);

}  // namespace wsgeo
