#include "wsgeo/christoffel.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <string>

#include "wsgeo/error.hpp"

namespace wsgeo {

ChristoffelTensor::ChristoffelTensor(int n, double h, double lambda)
    : n_(n), h_(h), lambda_(lambda), data_(static_cast<size_t>(n) * n * n, 0.0) {}

Vector ChristoffelTensor::contract(const Vector& v) const {
  if (v.size() != n_) raise(ErrorKind::Dimension, "Christoffel contraction: vector length mismatch");
  Vector out = Vector::Zero(n_);
  for (int eta = 0; eta < n_; ++eta) {
    const double* slab = data_.data() + static_cast<size_t>(eta) * n_ * n_;
    double acc = 0.0;
    for (int mu = 0; mu < n_; ++mu) {
      const double* row = slab + static_cast<size_t>(mu) * n_;
      double inner_acc = 0.0;
      for (int nu = 0; nu < n_; ++nu) inner_acc += row[nu] * v[nu];
      acc += v[mu] * inner_acc;
    }
    out[eta] = acc;
  }
  return out;
}

namespace {

Matrix dense_metric(const NetworkSpec& spec, const Vector& w, const Dataset& data,
                    const std::vector<int>& rows, int cap) {
  return MetricOperator(spec, w, data, rows).dense(cap);
}

}  // namespace

ChristoffelTensor christoffel_at(const NetworkSpec& spec, const Vector& w, const Dataset& data,
                                 const std::vector<int>& batch_rows,
                                 const ChristoffelOptions& opts) {
  const int n = static_cast<int>(spec.param_count());
  if (n > opts.size_cap)
    raise(ErrorKind::SizeCap, "christoffel_at: n = " + std::to_string(n) +
                                  " exceeds the exact-machinery cap " +
                                  std::to_string(opts.size_cap));
  check_weights(spec, w);
  const double h = opts.h;

  const Matrix g0 = dense_metric(spec, w, data, batch_rows, n);

  // dg[nu](r, mu) = d g_{r mu} / d w^nu
  std::vector<Matrix> dg(static_cast<size_t>(n));
  Vector wp = w;
  for (int nu = 0; nu < n; ++nu) {
    if (opts.stencil == FdStencil::Central) {
      wp[nu] = w[nu] + h;
      const Matrix gp = dense_metric(spec, wp, data, batch_rows, n);
      wp[nu] = w[nu] - h;
      const Matrix gm = dense_metric(spec, wp, data, batch_rows, n);
      wp[nu] = w[nu];
      dg[static_cast<size_t>(nu)] = (gp - gm) / (2.0 * h);
    } else {
      wp[nu] = w[nu] + h;
      const Matrix gp = dense_metric(spec, wp, data, batch_rows, n);
      wp[nu] = w[nu];
      dg[static_cast<size_t>(nu)] = (gp - g0) / h;
    }
    if (!dg[static_cast<size_t>(nu)].allFinite())
      raise(ErrorKind::Numeric, "non-finite metric differences along coordinate " +
                                    std::to_string(nu));
  }

  const double lambda = opts.lambda_scale * g0.trace() / n;
  Matrix damped = g0;
  damped.diagonal().array() += lambda;
  const Eigen::LDLT<Matrix> solver(damped);
  if (solver.info() != Eigen::Success)
    raise(ErrorKind::Numeric, "damped metric factorization failed");

  ChristoffelTensor gamma(n, h, lambda);
  Vector rhs(n);
  for (int mu = 0; mu < n; ++mu) {
    for (int nu = mu; nu < n; ++nu) {
      for (int r = 0; r < n; ++r)
        rhs[r] = 0.5 * (dg[static_cast<size_t>(nu)](r, mu) + dg[static_cast<size_t>(mu)](r, nu) -
                        dg[static_cast<size_t>(r)](mu, nu));
      const Vector col = solver.solve(rhs);
      for (int eta = 0; eta < n; ++eta) {
        gamma.at(eta, mu, nu) = col[eta];
        gamma.at(eta, nu, mu) = col[eta];
      }
    }
  }
  return gamma;
}

GeodesicResult integrate_geodesic(const NetworkSpec& spec, const Vector& w0, const Vector& v0,
                                  const Dataset& data, const std::vector<int>& batch_rows,
                                  const GeodesicOptions& opts) {
  check_weights(spec, w0);
  if (v0.size() != w0.size()) raise(ErrorKind::Dimension, "velocity length mismatch");
  if (opts.steps < 1 || opts.dt <= 0) raise(ErrorKind::Config, "bad integration parameters");

  GeodesicResult res;
  res.path.spec = spec;

  Vector w = w0;
  Vector v = v0;

  const auto record = [&](const Vector& wk, const Vector& vk) {
    const MetricOperator g(spec, wk, data, batch_rows);
    res.path.append(wk, CheckpointRecord{});
    res.velocities.push_back(vk);
    res.speeds.push_back(g.inner(vk, vk));
  };
  record(w, v);

  // classical RK4 on the first-order system (w' = v, v' = -Gamma(w)[v,v])
  const auto acc = [&](const Vector& wq, const Vector& vq) -> Vector {
    return -christoffel_at(spec, wq, data, batch_rows, opts.christoffel).contract(vq);
  };
  const double dt = opts.dt;
  for (int k = 0; k < opts.steps; ++k) {
    const Vector k1w = v;
    const Vector k1v = acc(w, v);
    const Vector k2w = v + 0.5 * dt * k1v;
    const Vector k2v = acc(w + 0.5 * dt * k1w, k2w);
    const Vector k3w = v + 0.5 * dt * k2v;
    const Vector k3v = acc(w + 0.5 * dt * k2w, k3w);
    const Vector k4w = v + dt * k3v;
    const Vector k4v = acc(w + dt * k3w, k4w);

    w += (dt / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
    v += (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);

    if (!w.allFinite() || !v.allFinite())
      raise(ErrorKind::Numeric, "geodesic integration diverged at step " + std::to_string(k));

    const Vector delta = w - res.path.checkpoints.back();
    const Vector mid = res.path.checkpoints.back() + 0.5 * delta;
    const MetricOperator gmid(spec, mid, data, batch_rows);
    record(w, v);
    res.path.add_segment(gmid.inner(delta, delta));
  }
  return res;
}

}  // namespace wsgeo
