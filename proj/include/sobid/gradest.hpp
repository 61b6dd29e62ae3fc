#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "sobid/dataset.hpp"
#include "sobid/types.hpp"

namespace sobid {

struct GradEstConfig {
  /// Neighborhood radius; 0 selects automatically (see below).
  double radius = 0.0;
  /// Auto rule A: radius = fraction of the regressor-space diameter.
  double radius_fraction = 0.05;
  /// Auto rule B (overrides A when > 0): radius = max over samples of the
  /// distance to the target-th nearest neighbor, so every neighborhood has
  /// at least `target_neighbors` members. Useful in higher dimensions,
  /// where a diameter fraction captures nothing.
  int target_neighbors = 0;
  /// Minimum admissible neighborhood size; 0 means n_x + 1.
  int min_neighbors = 0;
  /// Zero-phase smoothing time constant in samples; 0 disables.
  double smoothing_time_constant = 0.0;
};

/// Indices j with |x_j - x_k|_2 <= rho, ascending, k included.
inline std::vector<Index> neighbor_set(const Dataset& data, Index k, double rho) {
  require(k >= 0 && k < data.size(), "neighbor_set: sample index out of range");
  std::vector<Index> out;
  const auto xk = data.x.row(k);
  for (Index j = 0; j < data.size(); ++j)
    if ((data.x.row(j) - xk).norm() <= rho) out.push_back(j);
  return out;
}

namespace detail {

inline double resolve_radius(const Matrix& x, const GradEstConfig& cfg) {
  if (cfg.radius > 0.0) return cfg.radius;
  const Index L = x.rows();
  if (cfg.target_neighbors > 0) {
    const Index t = std::min<Index>(cfg.target_neighbors, L - 1);
    double rho = 0.0;
    std::vector<double> d(static_cast<std::size_t>(L));
    for (Index k = 0; k < L; ++k) {
      for (Index j = 0; j < L; ++j) d[static_cast<std::size_t>(j)] = (x.row(j) - x.row(k)).norm();
      std::nth_element(d.begin(), d.begin() + t, d.end());
      rho = std::max(rho, d[static_cast<std::size_t>(t)]);
    }
    return rho;
  }
  double diameter = 0.0;
  for (Index k = 0; k < L; ++k)
    for (Index j = k + 1; j < L; ++j)
      diameter = std::max(diameter, (x.row(j) - x.row(k)).norm());
  return cfg.radius_fraction * diameter;
}

/// Differenced local system at sample k: rows x_j - x_k, z_j - z_k.
inline void local_system(const Dataset& data, const std::vector<Index>& nbrs, Index k,
                         Matrix& phi, Vector& dz) {
  const Index m = static_cast<Index>(nbrs.size());
  phi.resize(m, data.n_x());
  dz.resize(m);
  for (Index r = 0; r < m; ++r) {
    phi.row(r) = data.x.row(nbrs[static_cast<std::size_t>(r)]) - data.x.row(k);
    dz[r] = data.z[nbrs[static_cast<std::size_t>(r)]] - data.z[k];
  }
}

/// Second-moment matrix (1/M) Phi^T Phi with a spectral rank check.
inline Matrix checked_moment(const Matrix& phi, Index k) {
  const Matrix moment = phi.transpose() * phi / static_cast<double>(phi.rows());
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(moment);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(hi > 0.0) || lo < 1e-10 * hi)
    throw RankDeficiency(k, hi > 0.0 ? hi / std::max(lo, 0.0) : std::numeric_limits<double>::infinity(),
                         "rank-deficient neighborhood at sample " + std::to_string(k) +
                             " (eigenvalue ratio " + std::to_string(lo / std::max(hi, 1e-300)) + ")");
  return moment;
}

}  // namespace detail

/// First-order exponential filter run forward then backward (zero phase).
/// Constant sequences are fixed points; time_constant 0 is the identity.
inline Vector smooth_sequence(const Vector& values, double time_constant) {
  require(time_constant >= 0.0, "smooth_sequence: time constant must be >= 0");
  if (time_constant == 0.0 || values.size() < 2) return values;
  const double a = std::exp(-1.0 / time_constant);
  Vector fwd = values;
  for (Index t = 1; t < fwd.size(); ++t) fwd[t] = (1.0 - a) * values[t] + a * fwd[t - 1];
  Vector out = fwd;
  for (Index t = out.size() - 2; t >= 0; --t) out[t] = (1.0 - a) * fwd[t] + a * out[t + 1];
  return out;
}

/// Estimates the derivative output samples from input-output data: a local
/// linear model is fitted on differenced data around every sample, and its
/// coefficients are the gradient estimate. Optional zero-phase smoothing is
/// applied per channel, in stored sample order (meaningful for trajectory
/// data).
inline Dataset estimate_gradients(const Dataset& data, const GradEstConfig& config = {}) {
  data.validate();
  const Index L = data.size();
  const int n = data.n_x();
  const Index min_nbrs = config.min_neighbors > 0 ? config.min_neighbors : n + 1;
  require(min_nbrs >= n + 1, "estimate_gradients: min_neighbors must be >= n_x + 1");

  const double rho = detail::resolve_radius(data.x, config);
  require(rho > 0.0, "estimate_gradients: neighborhood radius must be > 0");

  Matrix grads(L, n);
  Matrix phi;
  Vector dz;
  for (Index k = 0; k < L; ++k) {
    const auto nbrs = neighbor_set(data, k, rho);
    if (static_cast<Index>(nbrs.size()) < min_nbrs)
      throw NumericalFailure("estimate_gradients: only " + std::to_string(nbrs.size()) +
                             " neighbors within radius " + std::to_string(rho) + " at sample " +
                             std::to_string(k));
    detail::local_system(data, nbrs, k, phi, dz);
    detail::checked_moment(phi, k);
    grads.row(k) = phi.colPivHouseholderQr().solve(dz).transpose();
  }

  if (config.smoothing_time_constant > 0.0)
    for (int i = 0; i < n; ++i)
      grads.col(i) = smooth_sequence(grads.col(i), config.smoothing_time_constant);

  Dataset out = data;
  out.dz = std::move(grads);
  out.derivative_provenance = Provenance::estimated;
  return out;
}

/// Computable part of the gradient estimation error bound at sample k:
/// 2 |pinv(Phi_rho_k)|_q mu0. The Taylor-remainder term is unknown and
/// omitted; the value is purely diagnostic.
inline double gradient_error_bound_diagnostic(const Dataset& data, Index k,
                                              const GradEstConfig& config, double mu0,
                                              Qnorm q = Qnorm::two) {
  data.validate();
  require(std::isfinite(mu0) && mu0 >= 0.0, "gradient_error_bound_diagnostic: mu0 must be >= 0");
  const double rho = detail::resolve_radius(data.x, config);
  const auto nbrs = neighbor_set(data, k, rho);
  Matrix phi;
  Vector dz;
  detail::local_system(data, nbrs, k, phi, dz);
  detail::checked_moment(phi, k);
  const Matrix pinv = (phi.transpose() * phi).ldlt().solve(phi.transpose());
  double norm;
  if (q == Qnorm::two) {
    norm = pinv.jacobiSvd().singularValues().maxCoeff();
  } else {
    norm = pinv.cwiseAbs().rowwise().sum().maxCoeff();
  }
  return 2.0 * norm * mu0;
}

}  // namespace sobid
