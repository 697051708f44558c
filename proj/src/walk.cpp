#include "wsgeo/walk.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "wsgeo/error.hpp"

namespace wsgeo {

CheckpointRecord Evaluator::evaluate(const Vector& w, double distance) const {
  CheckpointRecord rec;
  rec.distance_to_goal = distance;
  if (eval1_) {
    const EvalResult r = loss_and_accuracy(*spec_, w, *eval1_);
    rec.loss = r.loss;
    rec.accuracy = r.accuracy;
  }
  if (eval2_) rec.accuracy2 = loss_and_accuracy(*spec_, w, *eval2_).accuracy;
  return rec;
}

WalkResult walk(const NetworkSpec& spec, const Vector& w_start, const DirectionField& field,
                const WalkConfig& cfg, const Dataset& metric_data, const Evaluator& eval) {
  check_weights(spec, w_start);
  if (cfg.max_steps < 1) raise(ErrorKind::Config, "walk needs max_steps >= 1");
  if (cfg.radius <= 0) raise(ErrorKind::Config, "walk needs radius > 0");
  const double eps =
      cfg.eps_abs > 0 ? cfg.eps_abs : cfg.eps_rel * std::max(w_start.norm(), 1e-300);

  const BatchPolicy policy{cfg.metric_batch, cfg.resample, cfg.seed};
  const int m = spec.output_dim();

  WalkResult res;
  res.path.spec = spec;

  Vector w = w_start;
  FieldQuery q = field.query(w);
  res.path.append(w, eval.evaluate(w, q.distance));

  const auto build_metric = [&](const Vector& at, int segment) {
    const auto rows = metric_batch_rows(policy, metric_data.size(), segment);
    res.work.metric_builds += 1;
    res.work.jacobian_rows += static_cast<int64_t>(rows.size()) * m;
    return MetricOperator(spec, at, metric_data, rows);
  };

  const auto finish = [&](int segment) {
    const Vector wf = field.finish(w);
    if ((wf - w).norm() > 0) {
      const MetricOperator gmid = build_metric(0.5 * (w + wf), segment);
      const Vector delta = wf - w;
      const double fq = field.query(wf).distance;
      res.path.append(wf, eval.evaluate(wf, fq));
      res.path.add_segment(gmid.inner(delta, delta));
    }
    res.path.converged = true;
  };

  for (int k = 0; k < cfg.max_steps; ++k) {
    if (q.arrived || q.distance <= eps) {
      finish(k);
      break;
    }
    const MetricOperator g = build_metric(w, k);
    const double rad =
        cfg.clamp_radius_to_distance ? std::min(cfg.radius, q.distance) : cfg.radius;
    TrsResult trs;
    try {
      trs = solve_tangent_step(g, q.direction, cfg.beta_at(k), rad, cfg.trs);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SolverFailure) throw;
      raise(ErrorKind::SolverFailure,
            std::string(e.what()) + " (walk step " + std::to_string(k) + ")");
    }
    res.work.cg_iterations += trs.cg_iters;
    res.lambdas.push_back(trs.lambda);

    const Vector w_next = w + trs.theta;
    const MetricOperator gmid = build_metric(w + 0.5 * trs.theta, k);
    const double energy = gmid.inner(trs.theta, trs.theta);

    w = w_next;
    q = field.query(w);
    ++res.steps;
    const bool do_eval = cfg.eval_every <= 1 || res.steps % cfg.eval_every == 0;
    CheckpointRecord rec;
    rec.distance_to_goal = q.distance;
    if (do_eval) rec = eval.evaluate(w, q.distance);
    res.path.append(w, rec);
    res.path.add_segment(energy);

    if (k + 1 == cfg.max_steps && (q.arrived || q.distance <= eps)) {
      finish(k + 1);
      break;
    }
  }
  return res;
}

BestOfWalksResult best_of_walks(const NetworkSpec& spec, const Vector& w_start,
                                const DirectionField& field,
                                const std::vector<WalkConfig>& variants,
                                const Dataset& metric_data, const Evaluator& eval) {
  if (variants.empty()) raise(ErrorKind::Config, "best_of_walks needs at least one variant");

  std::vector<WalkResult> results;
  results.reserve(variants.size());
  if (variants.size() == 1) {
    results.push_back(walk(spec, w_start, field, variants[0], metric_data, eval));
  } else {
    std::vector<std::future<WalkResult>> futures;
    futures.reserve(variants.size());
    for (const auto& cfg : variants)
      futures.push_back(std::async(std::launch::async, [&, cfg] {
        return walk(spec, w_start, field, cfg, metric_data, eval);
      }));
    for (auto& f : futures) results.push_back(f.get());  // merged in config order
  }

  BestOfWalksResult out;
  out.leaderboard.reserve(results.size());
  for (size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    out.leaderboard.push_back({static_cast<int>(i), r.path.converged, r.path.cumulative_energy,
                               r.path.cumulative_length, r.steps});
    if (!r.path.converged) continue;
    if (out.best_index < 0) {
      out.best_index = static_cast<int>(i);
      continue;
    }
    const auto& best = results[static_cast<size_t>(out.best_index)];
    const double e = r.path.cumulative_energy, be = best.path.cumulative_energy;
    const double l = r.path.cumulative_length, bl = best.path.cumulative_length;
    if (e < be || (e == be && l < bl)) out.best_index = static_cast<int>(i);
  }
  if (out.best_index < 0) {
    std::ostringstream msg;
    msg << "no walk variant converged;";
    for (const auto& row : out.leaderboard)
      msg << " [" << row.config_index << "] steps=" << row.steps << " energy=" << row.energy;
    raise(ErrorKind::NotConverged, msg.str());
  }
  out.best = std::move(results[static_cast<size_t>(out.best_index)]);
  return out;
}

}  // namespace wsgeo
