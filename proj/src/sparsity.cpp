#include "wsgeo/sparsity.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "wsgeo/error.hpp"
#include "wsgeo/rng.hpp"

namespace wsgeo {

SparsityRule sparsity_rule_from_string(const std::string& s) {
  if (s == "magnitude") return SparsityRule::Magnitude;
  if (s == "by_unit") return SparsityRule::ByUnit;
  if (s == "explicit") return SparsityRule::ExplicitList;
  raise(ErrorKind::Config, "unknown sparsity rule '" + s + "' (magnitude|by_unit|explicit)");
}

std::string to_string(SparsityRule r) {
  switch (r) {
    case SparsityRule::Magnitude: return "magnitude";
    case SparsityRule::ByUnit: return "by_unit";
    case SparsityRule::ExplicitList: return "explicit";
  }
  return "?";
}

int64_t SparsityPlane::masked_count() const {
  int64_t c = 0;
  for (uint8_t b : mask)
    if (!b) ++c;
  return c;
}

double SparsityPlane::masked_fraction() const {
  return candidate_count > 0 ? static_cast<double>(masked_count()) / candidate_count : 0.0;
}

bool SparsityPlane::on_plane(const Vector& w) const {
  for (size_t i = 0; i < mask.size(); ++i)
    if (!mask[i] && w[static_cast<Eigen::Index>(i)] != 0.0) return false;
  return true;
}

namespace {

void check_no_dead_layer(const NetworkSpec& spec, const std::vector<uint8_t>& mask) {
  for (int l = 0; l < spec.num_layers(); ++l) {
    const int64_t begin = spec.weight_offset(l);
    const int64_t end = spec.bias_offset(l);
    bool alive = false;
    for (int64_t i = begin; i < end && !alive; ++i) alive = mask[static_cast<size_t>(i)] != 0;
    if (!alive)
      raise(ErrorKind::Degenerate,
            "sparsity plane zeroes every weight of layer " + std::to_string(l));
  }
}

}  // namespace

SparsityPlane make_sparsity_plane(const NetworkSpec& spec, const Vector& w, double p,
                                  SparsityRule rule, const PlaneOptions& opts) {
  check_weights(spec, w);
  if (p < 0.0 || p > 1.0) raise(ErrorKind::Config, "sparsity level p must be in [0, 1]");
  const int64_t n = spec.param_count();

  SparsityPlane plane;
  plane.p = p;
  plane.rule = rule;
  plane.mask.assign(static_cast<size_t>(n), 1);

  if (rule == SparsityRule::Magnitude) {
    std::vector<int64_t> candidates;
    for (int l = 0; l < spec.num_layers(); ++l) {
      const int64_t wbeg = spec.weight_offset(l);
      const int64_t wend = spec.bias_offset(l);
      for (int64_t i = wbeg; i < wend; ++i) candidates.push_back(i);
      if (!opts.exempt_biases)
        for (int64_t i = wend; i < spec.weight_offset(l + 1); ++i) candidates.push_back(i);
    }
    plane.candidate_count = static_cast<int64_t>(candidates.size());
    const int64_t count = std::llround(p * static_cast<double>(candidates.size()));
    // ties in |w| resolved toward the lower coordinate index
    std::sort(candidates.begin(), candidates.end(), [&](int64_t a, int64_t b) {
      const double ma = std::abs(w[a]), mb = std::abs(w[b]);
      return ma != mb ? ma < mb : a < b;
    });
    for (int64_t i = 0; i < count; ++i) {
      plane.mask[static_cast<size_t>(candidates[static_cast<size_t>(i)])] = 0;
      plane.prune_groups.push_back({candidates[static_cast<size_t>(i)]});
    }
  } else if (rule == SparsityRule::ByUnit) {
    struct Unit {
      int hidden_layer;  // 1-based position in layer_sizes
      int unit;
      double importance;
      std::vector<int64_t> coords;
    };
    std::vector<Unit> units;
    int total_units = 0;
    for (int hl = 1; hl + 1 < static_cast<int>(spec.layer_sizes.size()); ++hl) {
      const int in_layer = hl - 1;   // maps sizes[hl-1] -> sizes[hl]
      const int out_layer = hl;      // maps sizes[hl] -> sizes[hl+1]
      const int fi = spec.layer_sizes[static_cast<size_t>(in_layer)];
      const int fo_next = spec.layer_sizes[static_cast<size_t>(hl + 1)];
      const int width = spec.layer_sizes[static_cast<size_t>(hl)];
      total_units += width;
      for (int u = 0; u < width; ++u) {
        Unit unit{hl, u, 0.0, {}};
        double sq = 0.0;
        const int64_t row = spec.weight_offset(in_layer) + static_cast<int64_t>(u) * fi;
        for (int c = 0; c < fi; ++c) {
          unit.coords.push_back(row + c);
          sq += w[row + c] * w[row + c];
        }
        const int64_t bias = spec.bias_offset(in_layer) + u;
        unit.coords.push_back(bias);
        sq += w[bias] * w[bias];
        for (int r = 0; r < fo_next; ++r) {
          const int64_t out =
              spec.weight_offset(out_layer) + static_cast<int64_t>(r) * width + u;
          unit.coords.push_back(out);
          sq += w[out] * w[out];
        }
        unit.importance = std::sqrt(sq);
        units.push_back(std::move(unit));
      }
    }
    if (total_units == 0) raise(ErrorKind::Config, "by_unit rule needs at least one hidden layer");
    plane.candidate_count = n;  // whole-coordinate masks; sparsity is reported per unit too
    const int64_t count = std::llround(p * total_units);
    std::sort(units.begin(), units.end(), [](const Unit& a, const Unit& b) {
      if (a.importance != b.importance) return a.importance < b.importance;
      if (a.hidden_layer != b.hidden_layer) return a.hidden_layer < b.hidden_layer;
      return a.unit < b.unit;
    });
    std::vector<int> pruned_per_layer(spec.layer_sizes.size(), 0);
    for (int64_t i = 0; i < count; ++i) {
      const Unit& u = units[static_cast<size_t>(i)];
      if (++pruned_per_layer[static_cast<size_t>(u.hidden_layer)] >=
          spec.layer_sizes[static_cast<size_t>(u.hidden_layer)])
        raise(ErrorKind::Degenerate, "sparsity level would remove every unit of hidden layer " +
                                         std::to_string(u.hidden_layer));
      for (int64_t c : u.coords) plane.mask[static_cast<size_t>(c)] = 0;
      plane.prune_groups.push_back(u.coords);
    }
  } else {
    raise(ErrorKind::Config, "use explicit_plane for explicit coordinate lists");
  }

  check_no_dead_layer(spec, plane.mask);
  return plane;
}

SparsityPlane explicit_plane(const NetworkSpec& spec, const std::vector<int64_t>& zero_coords) {
  const int64_t n = spec.param_count();
  SparsityPlane plane;
  plane.rule = SparsityRule::ExplicitList;
  plane.candidate_count = n;
  plane.mask.assign(static_cast<size_t>(n), 1);
  std::set<int64_t> seen;
  for (int64_t c : zero_coords) {
    if (c < 0 || c >= n) raise(ErrorKind::Dimension, "explicit plane coordinate out of range");
    if (seen.insert(c).second) {
      plane.mask[static_cast<size_t>(c)] = 0;
      plane.prune_groups.push_back({c});
    }
  }
  plane.p = n > 0 ? static_cast<double>(plane.masked_count()) / n : 0.0;
  check_no_dead_layer(spec, plane.mask);
  return plane;
}

Vector project_onto_plane(const Vector& w, const SparsityPlane& plane) {
  if (static_cast<size_t>(w.size()) != plane.mask.size())
    raise(ErrorKind::Dimension, "projection: weight/mask length mismatch");
  Vector out = w;
  for (size_t i = 0; i < plane.mask.size(); ++i)
    if (!plane.mask[i]) out[static_cast<Eigen::Index>(i)] = 0.0;
  return out;
}

double distance_to_plane(const Vector& w, const SparsityPlane& plane) {
  if (static_cast<size_t>(w.size()) != plane.mask.size())
    raise(ErrorKind::Dimension, "distance: weight/mask length mismatch");
  double sq = 0.0;
  for (size_t i = 0; i < plane.mask.size(); ++i)
    if (!plane.mask[i]) sq += w[static_cast<Eigen::Index>(i)] * w[static_cast<Eigen::Index>(i)];
  return std::sqrt(sq);
}

FieldQuery SparsityField::query(const Vector& w) const {
  FieldQuery q;
  q.distance = distance_to_plane(w, plane_);
  q.arrived = q.distance == 0.0;
  if (q.arrived) {
    q.direction = Vector::Zero(w.size());
    return q;
  }
  q.direction = Vector::Zero(w.size());
  for (size_t i = 0; i < plane_.mask.size(); ++i)
    if (!plane_.mask[i])
      q.direction[static_cast<Eigen::Index>(i)] = -w[static_cast<Eigen::Index>(i)] / q.distance;
  return q;
}

std::string SparsityField::describe() const {
  return "sparsity-plane rule=" + to_string(plane_.rule) + " p=" + std::to_string(plane_.p);
}

PinnedCoordsField::PinnedCoordsField(std::vector<int64_t> indices, Vector values)
    : indices_(std::move(indices)), values_(std::move(values)) {
  if (static_cast<Eigen::Index>(indices_.size()) != values_.size())
    raise(ErrorKind::Dimension, "pinned field: indices/values length mismatch");
}

FieldQuery PinnedCoordsField::query(const Vector& w) const {
  FieldQuery q;
  double sq = 0.0;
  for (size_t j = 0; j < indices_.size(); ++j) {
    const double d = values_[static_cast<Eigen::Index>(j)] - w[indices_[j]];
    sq += d * d;
  }
  q.distance = std::sqrt(sq);
  q.arrived = q.distance == 0.0;
  q.direction = Vector::Zero(w.size());
  if (!q.arrived)
    for (size_t j = 0; j < indices_.size(); ++j)
      q.direction[indices_[j]] =
          (values_[static_cast<Eigen::Index>(j)] - w[indices_[j]]) / q.distance;
  return q;
}

Vector PinnedCoordsField::finish(const Vector& w) const {
  Vector out = w;
  for (size_t j = 0; j < indices_.size(); ++j) out[indices_[j]] = values_[static_cast<Eigen::Index>(j)];
  return out;
}

std::string PinnedCoordsField::describe() const {
  return "pinned-coords count=" + std::to_string(indices_.size());
}

PruneTrainResult prune_train_baseline(const NetworkSpec& spec, const Vector& w,
                                      const SparsityPlane& plane, const Dataset& train,
                                      const PruneTrainConfig& cfg, const Evaluator& eval) {
  if (cfg.prune_per_cycle < 1) raise(ErrorKind::Config, "prune_per_cycle must be >= 1");
  if (cfg.epochs_per_cycle < 0) raise(ErrorKind::Config, "epochs_per_cycle must be >= 0");

  PruneTrainResult res;
  res.path.spec = spec;
  Vector cur = w;
  res.path.append(cur, eval.evaluate(cur, distance_to_plane(cur, plane)));

  std::vector<uint8_t> mask(plane.mask.size(), 1);
  size_t cursor = 0;
  while (cursor < plane.prune_groups.size()) {
    for (int g = 0; g < cfg.prune_per_cycle && cursor < plane.prune_groups.size(); ++g, ++cursor)
      for (int64_t c : plane.prune_groups[cursor]) {
        mask[static_cast<size_t>(c)] = 0;
        cur[c] = 0.0;
      }
    if (cfg.epochs_per_cycle > 0) {
      TrainConfig tc;
      tc.lr = cfg.lr;
      tc.epochs = cfg.epochs_per_cycle;
      tc.batch_size = cfg.batch_size;
      tc.seed = derive_seed(cfg.seed, "prune-cycle-" + std::to_string(res.cycles));
      tc.mask = mask;
      try {
        TrainResult tr = sgd_train(spec, cur, train, tc);
        cur = std::move(tr.weights);
        res.example_grad_evals += tr.example_grad_evals;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Numeric) throw;
        raise(ErrorKind::Numeric,
              std::string(e.what()) + " (prune-train cycle " + std::to_string(res.cycles) + ")");
      }
    }
    ++res.cycles;
    res.total_epochs += cfg.epochs_per_cycle;
    const Vector prev = res.path.checkpoints.back();
    res.path.append(cur, eval.evaluate(cur, distance_to_plane(cur, plane)));
    // baseline segments carry plain Euclidean step sizes, not metric energies
    res.path.add_segment((cur - prev).squaredNorm());
  }
  res.path.converged = plane.on_plane(cur);
  return res;
}

TransitionResult transition_sequence(const NetworkSpec& spec, const Vector& w0,
                                     const std::vector<SparsityPlane>& planes,
                                     const WalkConfig& cfg, const Dataset& metric_data,
                                     const Evaluator& eval, uint64_t restore_seed) {
  if (planes.empty()) raise(ErrorKind::Config, "transition_sequence needs at least one plane");
  TransitionResult res;
  Vector w = w0;
  std::vector<uint8_t> prev_zero(static_cast<size_t>(spec.param_count()), 0);

  for (size_t leg = 0; leg < planes.size(); ++leg) {
    const SparsityPlane& plane = planes[leg];
    if (plane.mask.size() != prev_zero.size())
      raise(ErrorKind::Dimension, "transition plane mask length mismatch");

    std::vector<int64_t> pinned;
    std::vector<double> values;
    Rng rng(derive_seed(restore_seed, "restore-leg-" + std::to_string(leg)));
    for (size_t i = 0; i < plane.mask.size(); ++i) {
      if (!plane.mask[i]) {
        pinned.push_back(static_cast<int64_t>(i));
        values.push_back(0.0);
      } else if (prev_zero[i]) {
        // previously-zeroed coordinate being restored: small seeded anchor
        // scaled by the layer's surviving weight RMS
        const CoordInfo info = locate_coord(spec, static_cast<int64_t>(i));
        const int64_t wbeg = spec.weight_offset(info.layer);
        const int64_t wend = spec.bias_offset(info.layer);
        double sq = 0.0;
        int64_t cnt = 0;
        for (int64_t j = wbeg; j < wend; ++j)
          if (w[j] != 0.0) {
            sq += w[j] * w[j];
            ++cnt;
          }
        const double rms = cnt > 0 ? std::sqrt(sq / static_cast<double>(cnt))
                                   : 1.0 / std::sqrt(static_cast<double>(
                                               spec.layer_sizes[static_cast<size_t>(info.layer)]));
        pinned.push_back(static_cast<int64_t>(i));
        values.push_back(0.1 * rms * rng.gaussian());
      }
    }
    Vector value_vec = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
    PinnedCoordsField field(pinned, std::move(value_vec));

    WalkConfig leg_cfg = cfg;
    leg_cfg.seed = derive_seed(cfg.seed, "transition-leg-" + std::to_string(leg));
    WalkResult wr = walk(spec, w, field, leg_cfg, metric_data, eval);
    const bool ok = wr.path.converged;
    w = wr.path.checkpoints.back();
    res.legs.push_back(std::move(wr));
    if (!ok) return res;  // aborted; completed legs returned

    for (size_t i = 0; i < plane.mask.size(); ++i) prev_zero[i] = plane.mask[i] ? 0 : 1;
  }
  res.completed = true;
  return res;
}

}  // namespace wsgeo
