#pragma once

#include <cmath>
#include <utility>

#include "sobid/dataset.hpp"
#include "sobid/predict.hpp"
#include "sobid/rng.hpp"
#include "sobid/types.hpp"

namespace sobid {

/// Zero-mean normal noise with a pinned generator (see rng.hpp).
struct NoiseSpec {
  double std = 0.0;
  std::uint64_t seed = 0;
};

/// Chua circuit parameters with the cubic resistor rho(v) = c1 v + c3 v^3.
struct ChuaParams {
  double alpha = 10.4;
  double beta = 16.5;
  double R = 0.1;
  double c1 = -1.16;
  double c3 = 0.041;
  double Ts = 0.01;

  double rho(double v) const { return c1 * v + c3 * v * v * v; }
  double rho_prime(double v) const { return c1 + 3.0 * c3 * v * v; }
};

struct UnivariateData {
  Dataset identification;
  Dataset validation;  // noise-free, analytic derivatives
};

/// Samples of sin(1.1 x) and its derivative on a uniform grid over the
/// domain, with independent noise added to both channels of the
/// identification set. The validation set is noise-free.
inline UnivariateData gen_univariate(int L, std::pair<double, double> domain, NoiseSpec noise,
                                     bool include_derivatives, int validation_L = 1000) {
  require(L >= 2, "gen_univariate: L must be >= 2");
  require(validation_L >= 2, "gen_univariate: validation length must be >= 2");
  require(noise.std >= 0.0, "gen_univariate: noise std must be >= 0");
  const auto [lo, hi] = domain;
  require(lo < hi, "gen_univariate: empty domain");

  const auto fill = [&](Dataset& d, int n, double std, std::uint64_t seed, bool with_dz) {
    Rng rng(seed);
    d.x = Matrix(n, 1);
    d.z = Vector(n);
    if (with_dz) d.dz = Matrix(n, 1);
    for (int k = 0; k < n; ++k)
      d.x(k, 0) = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    for (int k = 0; k < n; ++k) d.z[k] = std::sin(1.1 * d.x(k, 0)) + rng.normal(0.0, std);
    if (with_dz)
      for (int k = 0; k < n; ++k)
        (*d.dz)(k, 0) = 1.1 * std::cos(1.1 * d.x(k, 0)) + rng.normal(0.0, std);
  };

  UnivariateData out;
  fill(out.identification, L, noise.std, noise.seed, include_derivatives);
  out.identification.derivative_provenance = Provenance::analytic;
  fill(out.validation, validation_L, 0.0, 0, true);
  out.validation.derivative_provenance = Provenance::analytic;
  return out;
}

/// Forward-Euler simulation of the Chua circuit. The input and the
/// disturbance are held constant over each step; the disturbance enters the
/// x2 equation only. Output y_t = x1 at the step start.
inline IoSeries simulate_chua(const ChuaParams& params, NoiseSpec input, NoiseSpec disturbance,
                              double duration, Eigen::Vector3d x0 = Eigen::Vector3d::Zero()) {
  require(params.Ts > 0.0, "simulate_chua: sampling time must be > 0");
  require(duration > 0.0, "simulate_chua: duration must be > 0");
  const Index L = static_cast<Index>(std::llround(duration / params.Ts));
  require(L >= 1, "simulate_chua: duration shorter than one step");

  Rng rng_u(input.seed);
  Rng rng_xi(disturbance.seed);
  IoSeries out;
  out.sampling_time = params.Ts;
  out.u = Vector(L);
  out.y = Vector(L);

  Eigen::Vector3d x = x0;
  for (Index t = 0; t < L; ++t) {
    out.y[t] = x[0];
    const double u = input.std > 0.0 ? rng_u.normal(0.0, input.std) : 0.0;
    const double xi = disturbance.std > 0.0 ? rng_xi.normal(0.0, disturbance.std) : 0.0;
    out.u[t] = u;
    const Eigen::Vector3d dx(params.alpha * (x[1] - x[0] - params.rho(x[0])),
                             x[0] - x[1] + x[2] + u + xi,
                             -params.beta * x[1] - params.R * x[2]);
    x += params.Ts * dx;
    if (x.cwiseAbs().maxCoeff() > 1e6)
      throw NumericalFailure("simulate_chua: state blew up at step " + std::to_string(t));
  }
  return out;
}

struct ChuaIoFit {
  Vector b;  // 8 coefficients
  double residual_rmse = 0.0;
};

/// Coefficients of the linear-in-b input-output regression satisfied
/// exactly by the Euler-discretized circuit:
///   y_t = b1 y_{t-1} + b2 y_{t-2} + b3 y_{t-3}
///       + b4 rho(y_{t-1}) + b5 rho(y_{t-2}) + b6 rho(y_{t-3})
///       + b7 u_{t-2} + b8 u_{t-3}.
/// Fitted by least squares on a noiseless simulated trajectory; the
/// residual certifies exactness.
inline ChuaIoFit chua_io_coefficients(const ChuaParams& params, std::uint64_t input_seed = 11,
                                      double duration = 60.0, double input_std = 1.0) {
  const IoSeries s = simulate_chua(params, {input_std, input_seed}, {0.0, 0}, duration);
  const Index T = s.y.size();
  require(T >= 20, "chua_io_coefficients: trajectory too short");

  const Index L = T - 3;
  Matrix a(L, 8);
  Vector t(L);
  for (Index i = 3; i < T; ++i) {
    const Index r = i - 3;
    a(r, 0) = s.y[i - 1];
    a(r, 1) = s.y[i - 2];
    a(r, 2) = s.y[i - 3];
    a(r, 3) = params.rho(s.y[i - 1]);
    a(r, 4) = params.rho(s.y[i - 2]);
    a(r, 5) = params.rho(s.y[i - 3]);
    a(r, 6) = s.u[i - 2];
    a(r, 7) = s.u[i - 3];
    t[r] = s.y[i];
  }

  const Eigen::ColPivHouseholderQR<Matrix> qr(a);
  if (qr.rank() < 8)
    throw NumericalFailure("chua_io_coefficients: regression is ill-conditioned (rank " +
                           std::to_string(qr.rank()) + " of 8); the trajectory does not excite "
                           "all terms");
  ChuaIoFit fit;
  fit.b = qr.solve(t);
  fit.residual_rmse = std::sqrt((a * fit.b - t).squaredNorm() / static_cast<double>(L));
  return fit;
}

/// Analytic gradient of the one-step input-output map with respect to the
/// regressor (y_t, y_{t-1}, y_{t-2}, u_{t-1}, u_{t-2}):
///   d y_{t+1} / d y_{t-j} = b_{j+1} + b_{j+4} rho'(y_{t-j}),  j = 0,1,2
///   d y_{t+1} / d u_{t-1} = b7,   d y_{t+1} / d u_{t-2} = b8.
inline Vector chua_true_derivatives(const ChuaParams& params, const Vector& b,
                                    const Vector& regressor) {
  require(b.size() == 8, "chua_true_derivatives: need 8 coefficients");
  require(regressor.size() == 5, "chua_true_derivatives: need the 5-component one-step regressor");
  Vector g(5);
  for (int j = 0; j < 3; ++j) g[j] = b[j] + b[j + 3] * params.rho_prime(regressor[j]);
  g[3] = b[6];
  g[4] = b[7];
  return g;
}

}  // namespace sobid
