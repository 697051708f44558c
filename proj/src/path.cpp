#include "wsgeo/path.hpp"

#include "wsgeo/error.hpp"

namespace wsgeo {

void Path::append(Vector w, CheckpointRecord rec) {
  checkpoints.push_back(std::move(w));
  records.push_back(rec);
}

void Path::add_segment(double energy) {
  if (checkpoints.size() < 2) raise(ErrorKind::Dimension, "add_segment before two checkpoints");
  step_energies.push_back(energy);
  step_lengths.push_back(std::sqrt(std::max(energy, 0.0)));
  cumulative_energy += energy;
  cumulative_length += step_lengths.back();
}

void Path::validate() const {
  if (checkpoints.empty()) raise(ErrorKind::Dimension, "path has no checkpoints");
  if (records.size() != checkpoints.size())
    raise(ErrorKind::Dimension, "path records/checkpoints mismatch");
  if (step_energies.size() + 1 != checkpoints.size() || step_lengths.size() != step_energies.size())
    raise(ErrorKind::Dimension, "path segment bookkeeping mismatch");
  const Eigen::Index n = spec.param_count();
  for (const auto& w : checkpoints)
    if (w.size() != n) raise(ErrorKind::Dimension, "path checkpoint dimension mismatch");
  double e = 0.0, len = 0.0;
  for (size_t j = 0; j < step_energies.size(); ++j) {
    e += step_energies[j];
    len += step_lengths[j];
  }
  if (e != cumulative_energy || len != cumulative_length)
    raise(ErrorKind::Numeric, "path cumulative sums do not match segment data");
}

std::vector<Vector> straight_line(const Vector& a, const Vector& b, int count) {
  if (count < 2) raise(ErrorKind::Config, "straight_line needs count >= 2");
  std::vector<Vector> pts;
  pts.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / (count - 1);
    pts.push_back((1.0 - t) * a + t * b);
  }
  return pts;
}

}  // namespace wsgeo
