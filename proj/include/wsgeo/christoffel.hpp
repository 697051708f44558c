#pragma once

#include <vector>

#include "wsgeo/metric.hpp"
#include "wsgeo/path.hpp"

namespace wsgeo {

// Exactness oracle only: the tensor is n^3 and construction rebuilds the
// dense metric 2n+1 times, so it is hard-capped at small n.
inline constexpr int kChristoffelSizeCap = 40;

enum class FdStencil { Central, Forward };

struct ChristoffelOptions {
  double h = 1e-4;             // finite-difference step on the metric
  double lambda_scale = 1e-8;  // Tikhonov damping: lambda = scale * trace(g)/n
  FdStencil stencil = FdStencil::Central;
  int size_cap = kChristoffelSizeCap;
};

// Gamma^eta_{mu nu} = 1/2 (g+lambda I)^{-1}[eta][r] (d_nu g_{r mu} + d_mu g_{r nu} - d_r g_{mu nu}).
// The damping is required because g = J^T J is typically rank-deficient.
class ChristoffelTensor {
 public:
  ChristoffelTensor(int n, double h, double lambda);
  int dim() const { return n_; }
  double fd_step() const { return h_; }
  double damping() const { return lambda_; }
  double at(int eta, int mu, int nu) const { return data_[index(eta, mu, nu)]; }
  double& at(int eta, int mu, int nu) { return data_[index(eta, mu, nu)]; }
  // Gamma[v,v]: the quadratic contraction over the lower indices.
  Vector contract(const Vector& v) const;

 private:
  size_t index(int eta, int mu, int nu) const {
    return (static_cast<size_t>(eta) * n_ + static_cast<size_t>(mu)) * n_ + static_cast<size_t>(nu);
  }
  int n_;
  double h_;
  double lambda_;
  std::vector<double> data_;
};

ChristoffelTensor christoffel_at(const NetworkSpec& spec, const Vector& w, const Dataset& data,
                                 const std::vector<int>& batch_rows,
                                 const ChristoffelOptions& opts = {});

struct GeodesicOptions {
  int steps = 100;
  double dt = 1e-2;
  ChristoffelOptions christoffel = {};
};

struct GeodesicResult {
  Path path;
  std::vector<Vector> velocities;  // dw/dt at each checkpoint
  std::vector<double> speeds;      // <v,v>_g at each checkpoint, the conservation diagnostic
};

// RK4 on (w, v) with dv/dt = -Gamma(w)[v,v]; the Christoffel tensor is
// rebuilt at every stage point. Throws ErrorKind::Numeric with the step index
// if the state stops being finite.
GeodesicResult integrate_geodesic(const NetworkSpec& spec, const Vector& w0, const Vector& v0,
                                  const Dataset& data, const std::vector<int>& batch_rows,
                                  const GeodesicOptions& opts = {});

}  // namespace wsgeo
