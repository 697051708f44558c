#include "wsgeo/trs.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "wsgeo/error.hpp"

namespace wsgeo {

namespace {

struct CgOutcome {
  Vector x;
  double rel_residual = 0.0;
  int iters = 0;
  bool converged = false;
  bool hit_radius = false;     // iterate norm crossed the watch radius (x0 = 0 only)
  bool null_curvature = false; // search direction with (numerically) zero curvature
};

// CG on (A + lam I) x = b. With x0 = 0 the iterate norm is monotonically
// increasing, so radius_watch > 0 gives a sound early boundary detection.
CgOutcome cg_solve(const LinearOperator& A, double lam, const Vector& b, const Vector& x0,
                   double tol_rel, int max_iters, double radius_watch, int& iter_accum) {
  CgOutcome out;
  const double bnorm = b.norm();
  out.x = x0;
  if (bnorm == 0.0) {
    out.converged = true;
    return out;
  }
  Vector r = b - (A(out.x) + lam * out.x);
  Vector p = r;
  double rr = r.squaredNorm();
  const double stop = tol_rel * bnorm;
  if (std::sqrt(rr) <= stop) {
    out.converged = true;
    out.rel_residual = std::sqrt(rr) / bnorm;
    return out;
  }
  for (int k = 0; k < max_iters; ++k) {
    const Vector Ap = A(p) + lam * p;
    const double pAp = p.dot(Ap);
    ++out.iters;
    ++iter_accum;
    if (pAp <= 1e-14 * p.squaredNorm()) {
      out.null_curvature = true;
      break;
    }
    const double alpha = rr / pAp;
    out.x += alpha * p;
    if (radius_watch > 0 && out.x.norm() >= radius_watch) {
      out.hit_radius = true;
      break;
    }
    r -= alpha * Ap;
    const double rr_new = r.squaredNorm();
    if (std::sqrt(rr_new) <= stop) {
      out.converged = true;
      rr = rr_new;
      break;
    }
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  out.rel_residual = std::sqrt(rr) / bnorm;
  return out;
}

}  // namespace

TrsResult solve_tangent_step(const LinearOperator& g, Eigen::Index n, const Vector& v_goal,
                             double beta, double radius, const TrsOptions& opts) {
  if (radius <= 0) raise(ErrorKind::Config, "tangent step radius must be > 0");
  if (beta < 0) raise(ErrorKind::Config, "tangent step beta must be >= 0");
  if (v_goal.size() != n) raise(ErrorKind::Dimension, "goal vector length mismatch");

  TrsResult res;
  res.theta = Vector::Zero(n);
  const Vector b = (beta / 2.0) * v_goal;
  const double bnorm = b.norm();
  if (bnorm == 0.0) return res;  // unique minimizer of a PSD quadratic with no linear term

  const Vector zero = Vector::Zero(n);

  // Interior attempt: g theta = b from theta = 0, watching the radius.
  const CgOutcome interior =
      cg_solve(g, 0.0, b, zero, opts.cg_tol, opts.max_cg_iters, radius, res.cg_iters);
  if (interior.converged && interior.x.norm() <= radius) {
    res.theta = interior.x;
    res.lambda = 0.0;
    res.on_boundary = std::abs(interior.x.norm() - radius) <= 1e-12 * radius;
    const Vector kkt = 2.0 * g(res.theta) - beta * v_goal;
    res.kkt_residual = kkt.norm() / (beta * v_goal.norm());
    if (res.kkt_residual > opts.kkt_tol)
      raise(ErrorKind::SolverFailure,
            "tangent step: interior KKT residual " + std::to_string(res.kkt_residual));
    return res;
  }

  // Boundary case: find lambda > 0 with ||theta(lambda)|| = radius.
  // 1/||theta(lambda)|| is concave increasing, so Newton from the right
  // converges monotonically; a bracket plus bisection guards CG inexactness.
  double lo = 0.0;
  double hi = bnorm / radius;  // ||theta(hi)|| <= radius by the operator-norm bound
  double lam = hi;
  Vector x = interior.hit_radius || interior.null_curvature || !interior.converged
                 ? interior.x
                 : zero;
  const double boundary_tol = 1e-10 * radius;

  for (int it = 0; it < opts.max_outer_iters; ++it) {
    ++res.outer_iters;
    const CgOutcome sol =
        cg_solve(g, lam, b, x, opts.cg_tol, opts.max_cg_iters, 0.0, res.cg_iters);
    if (!sol.converged)
      raise(ErrorKind::SolverFailure,
            "tangent step: CG stalled at lambda = " + std::to_string(lam) +
                " with relative residual " + std::to_string(sol.rel_residual));
    x = sol.x;
    const double norm = x.norm();
    if (std::abs(norm - radius) <= boundary_tol) break;
    if (norm > radius)
      lo = lam;
    else
      hi = std::min(hi, lam);

    // Newton on phi(lam) = 1/||theta|| - 1/radius, phi' = x^T z / ||theta||^3
    // with z = (g + lam)^{-1} x.
    const CgOutcome zsol =
        cg_solve(g, lam, x, zero, opts.cg_tol, opts.max_cg_iters, 0.0, res.cg_iters);
    double next = std::numeric_limits<double>::quiet_NaN();
    if (zsol.converged) {
      const double dphi = x.dot(zsol.x) / (norm * norm * norm);
      if (dphi > 0) next = lam - (1.0 / norm - 1.0 / radius) / dphi;
    }
    if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
    lam = next;
    if (it + 1 == opts.max_outer_iters)
      raise(ErrorKind::SolverFailure,
            "tangent step: lambda search exhausted, |norm - radius| = " +
                std::to_string(std::abs(norm - radius)));
  }

  res.theta = x;
  res.lambda = lam;
  res.on_boundary = true;
  const Vector kkt = 2.0 * (g(res.theta) + lam * res.theta) - beta * v_goal;
  res.kkt_residual = kkt.norm() / (beta * v_goal.norm());
  if (res.kkt_residual > opts.kkt_tol)
    raise(ErrorKind::SolverFailure,
          "tangent step: boundary KKT residual " + std::to_string(res.kkt_residual));
  return res;
}

TrsResult solve_tangent_step(const MetricOperator& g, const Vector& v_goal, double beta,
                             double radius, const TrsOptions& opts) {
  if (std::abs(v_goal.norm() - 1.0) > 1e-12)
    raise(ErrorKind::Config, "goal direction must be unit norm");
  return solve_tangent_step([&g](const Vector& u) { return g.apply(u); }, g.dim(), v_goal, beta,
                            radius, opts);
}

}  // namespace wsgeo
