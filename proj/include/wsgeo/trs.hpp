#pragma once

#include <functional>

#include "wsgeo/metric.hpp"

namespace wsgeo {

// Norm-constrained tangent-step subproblem at one weight point:
//
//   argmin_theta  theta^T g theta - beta theta^T v    s.t.  theta^T theta <= radius^2
//
// KKT structure: theta = (beta/2) (g + lambda I)^{-1} v with lambda >= 0,
// ||theta|| <= radius and lambda (||theta|| - radius) = 0. Solved matrix-free:
// conjugate-gradient inner solves plus a safeguarded Newton/bisection search
// on lambda for the boundary case. g only enters through products.
struct TrsOptions {
  double kkt_tol = 1e-8;    // relative tolerance on ||2(g+lambda)theta - beta v||
  double cg_tol = 1e-12;    // relative residual per inner CG solve
  int max_cg_iters = 4000;  // per inner solve
  int max_outer_iters = 80;
};

struct TrsResult {
  Vector theta;
  double lambda = 0.0;
  double kkt_residual = 0.0;  // relative
  bool on_boundary = false;
  int cg_iters = 0;    // total across inner solves
  int outer_iters = 0; // lambda search iterations
};

using LinearOperator = std::function<Vector(const Vector&)>;

TrsResult solve_tangent_step(const LinearOperator& g, Eigen::Index n, const Vector& v_goal,
                             double beta, double radius, const TrsOptions& opts = {});

// Metric-backed convenience overload; validates that v_goal is unit norm.
TrsResult solve_tangent_step(const MetricOperator& g, const Vector& v_goal, double beta,
                             double radius, const TrsOptions& opts = {});

}  // namespace wsgeo
