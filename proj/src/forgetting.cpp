#include "wsgeo/forgetting.hpp"

#include <algorithm>

#include "wsgeo/error.hpp"

namespace wsgeo {

FieldQuery TargetField::query(const Vector& w) const {
  if (w.size() != target_.size()) raise(ErrorKind::Dimension, "target field: length mismatch");
  FieldQuery q;
  const Vector delta = target_ - w;
  q.distance = delta.norm();
  q.arrived = q.distance == 0.0;
  q.direction = q.arrived ? Vector::Zero(w.size()) : Vector(delta / q.distance);
  return q;
}

DualEvalResult evaluate_dual_task(const NetworkSpec& spec, const std::vector<Vector>& checkpoints,
                                  const Dataset& test1, const Dataset& test2) {
  if (checkpoints.empty()) raise(ErrorKind::Dimension, "dual evaluation needs checkpoints");
  DualEvalResult res;
  res.rows.reserve(checkpoints.size());
  double best = -1.0;
  for (size_t i = 0; i < checkpoints.size(); ++i) {
    const double a1 = loss_and_accuracy(spec, checkpoints[i], test1).accuracy;
    const double a2 = loss_and_accuracy(spec, checkpoints[i], test2).accuracy;
    res.rows.push_back({static_cast<int>(i), a1, a2});
    const double worst = std::min(a1, a2);
    if (worst > best) {
      best = worst;
      res.recommended_index = static_cast<int>(i);
    }
  }
  return res;
}

}  // namespace wsgeo
