#pragma once

#include "wsgeo/walk.hpp"

namespace wsgeo {

// Goal set is a single target network; the walk between two trained networks
// is the catastrophic-forgetting mitigation path.
class TargetField : public DirectionField {
 public:
  explicit TargetField(Vector target) : target_(std::move(target)) {}
  FieldQuery query(const Vector& w) const override;
  Vector finish(const Vector&) const override { return target_; }
  std::string describe() const override { return "target-network"; }
  const Vector& target() const { return target_; }

 private:
  Vector target_;
};

struct TwoTaskSetup {
  Vector w_t1;
  Vector w_t2;
  const Dataset* test1 = nullptr;
  const Dataset* test2 = nullptr;
};

struct DualEvalRow {
  int index;
  double acc1;
  double acc2;
};

struct DualEvalResult {
  std::vector<DualEvalRow> rows;
  int recommended_index = 0;  // argmax of min(acc1, acc2), ties toward lower index
};

// Evaluates every checkpoint on both test sets; deterministic ordered output.
DualEvalResult evaluate_dual_task(const NetworkSpec& spec, const std::vector<Vector>& checkpoints,
                                  const Dataset& test1, const Dataset& test2);

}  // namespace wsgeo
