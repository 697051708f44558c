// Shared helpers for the unit and acceptance suites. The *oracle* functions
// are deliberately independent re-implementations (plain loops, their own
// indexing arithmetic) used to check the library's fast paths against.
#pragma once

#include <cmath>
#include <vector>

#include "wsgeo/metric.hpp"
#include "wsgeo/nn.hpp"
#include "wsgeo/rng.hpp"

namespace testutil {

using wsgeo::Matrix;
using wsgeo::NetworkSpec;
using wsgeo::Vector;

// Naive layer-by-layer forward pass with its own offset bookkeeping.
inline std::vector<double> naive_forward(const NetworkSpec& spec, const Vector& w,
                                         const std::vector<double>& x) {
  std::vector<double> a = x;
  size_t off = 0;
  const int layers = static_cast<int>(spec.layer_sizes.size()) - 1;
  for (int l = 0; l < layers; ++l) {
    const int fi = spec.layer_sizes[static_cast<size_t>(l)];
    const int fo = spec.layer_sizes[static_cast<size_t>(l) + 1];
    std::vector<double> z(static_cast<size_t>(fo), 0.0);
    for (int r = 0; r < fo; ++r) {
      double acc = 0.0;
      for (int c = 0; c < fi; ++c) acc += w[static_cast<Eigen::Index>(off + static_cast<size_t>(r) * fi + c)] * a[static_cast<size_t>(c)];
      z[static_cast<size_t>(r)] = acc + w[static_cast<Eigen::Index>(off + static_cast<size_t>(fi) * fo + static_cast<size_t>(r))];
    }
    off += static_cast<size_t>(fi + 1) * static_cast<size_t>(fo);
    if (l < layers - 1) {
      const wsgeo::Activation act = spec.hidden_activations[static_cast<size_t>(l)];
      for (double& v : z) {
        if (act == wsgeo::Activation::Tanh)
          v = std::tanh(v);
        else if (act == wsgeo::Activation::Relu)
          v = v > 0 ? v : 0.0;
      }
    }
    a = z;
  }
  return a;
}

// Central finite differences of the forward map: J(r, c) = df_r/dw_c.
inline Matrix fd_jacobian(const NetworkSpec& spec, const Vector& w, const Vector& x,
                          double eps = 1e-5) {
  const int m = spec.output_dim();
  const Eigen::Index n = spec.param_count();
  Matrix J(m, n);
  Vector wp = w;
  for (Eigen::Index c = 0; c < n; ++c) {
    wp[c] = w[c] + eps;
    const Vector fp = wsgeo::forward(spec, wp, x);
    wp[c] = w[c] - eps;
    const Vector fm = wsgeo::forward(spec, wp, x);
    wp[c] = w[c];
    J.col(c) = (fp - fm) / (2.0 * eps);
  }
  return J;
}

// Explicit (1/B) sum J_i^T J_i assembled with plain loops from per-example
// Jacobian matrices.
inline Matrix naive_dense_metric(const NetworkSpec& spec, const Vector& w, const Matrix& inputs) {
  const wsgeo::JacobianBatch jb = wsgeo::jacobian(spec, w, inputs);
  const Eigen::Index n = jb.n;
  Matrix g = Matrix::Zero(n, n);
  for (int i = 0; i < jb.batch; ++i) {
    const Matrix J = jb.jacobian_of(i);
    for (int r = 0; r < jb.m; ++r)
      for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) g(a, b) += J(r, a) * J(r, b);
  }
  return g / jb.batch;
}

inline Vector random_vector(Eigen::Index n, wsgeo::Rng& rng) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.gaussian();
  return v;
}

inline Vector random_unit(Eigen::Index n, wsgeo::Rng& rng) {
  Vector v = random_vector(n, rng);
  return v / v.norm();
}

// Dense trust-region oracle: eigendecomposition plus a bisection search on
// the secular equation. Independent of the CG path under test.
struct DenseTrsSolution {
  Vector theta;
  double lambda;
};

inline DenseTrsSolution dense_trs_oracle(const Matrix& g, const Vector& v, double beta,
                                         double radius) {
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
  const Vector evals = eig.eigenvalues();
  const Vector vt = eig.eigenvectors().transpose() * ((beta / 2.0) * v);

  const auto norm_at = [&](double lam) {
    double sq = 0.0;
    for (Eigen::Index i = 0; i < evals.size(); ++i) {
      const double d = std::max(evals[i], 0.0) + lam;
      sq += (vt[i] / d) * (vt[i] / d);
    }
    return std::sqrt(sq);
  };

  // interior candidate: pseudo-inverse solution when v has no null component
  double null_mass = 0.0;
  for (Eigen::Index i = 0; i < evals.size(); ++i)
    if (evals[i] <= 1e-12 * evals.maxCoeff()) null_mass += vt[i] * vt[i];
  if (null_mass < 1e-30) {
    double sq = 0.0;
    for (Eigen::Index i = 0; i < evals.size(); ++i)
      if (evals[i] > 1e-12 * evals.maxCoeff()) sq += (vt[i] / evals[i]) * (vt[i] / evals[i]);
    if (std::sqrt(sq) <= radius) {
      Vector coeff = Vector::Zero(evals.size());
      for (Eigen::Index i = 0; i < evals.size(); ++i)
        if (evals[i] > 1e-12 * evals.maxCoeff()) coeff[i] = vt[i] / evals[i];
      return {eig.eigenvectors() * coeff, 0.0};
    }
  }

  double lo = 0.0, hi = (beta / 2.0) * v.norm() / radius + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (norm_at(mid) > radius)
      lo = mid;
    else
      hi = mid;
  }
  const double lam = 0.5 * (lo + hi);
  Vector coeff(evals.size());
  for (Eigen::Index i = 0; i < evals.size(); ++i)
    coeff[i] = vt[i] / (std::max(evals[i], 0.0) + lam);
  return {eig.eigenvectors() * coeff, lam};
}

// Seeded random PSD matrix with controllable rank.
inline Matrix random_psd(Eigen::Index n, Eigen::Index rank, wsgeo::Rng& rng) {
  Matrix A(n, rank);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < rank; ++j) A(i, j) = rng.gaussian();
  return A * A.transpose() / static_cast<double>(rank);
}

inline NetworkSpec tanh_net(std::vector<int> sizes) {
  return NetworkSpec::dense(std::move(sizes), wsgeo::Activation::Tanh);
}

inline NetworkSpec affine_net(int in, int out) {
  return NetworkSpec::dense({in, out}, wsgeo::Activation::Tanh);  // single layer: no hidden act
}

}  // namespace testutil
