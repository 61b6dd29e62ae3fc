#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "sobid/dataset.hpp"
#include "sobid/gradest.hpp"
#include "sobid/identify.hpp"
#include "sobid/types.hpp"

namespace sobid {

/// Estimated Lipschitz constants of the residue function and of its
/// derivatives, gamma[i] for channels i = 0..n_x.
struct LipschitzEstimate {
  Vector gamma;
  double nu = 1.0;
  /// Channels whose second-level gradient estimation was rank-deficient and
  /// fell back to nearest-neighbor difference quotients.
  std::vector<int> fallback_channels;
};

namespace detail {

/// max over near pairs of |v_j - v_k| / |x_j - x_k|_inf; crude slope bound
/// used when the local linear fits are rank-deficient.
inline double difference_quotient_bound(const Matrix& x, const Vector& v) {
  const Index L = x.rows();
  double bound = 0.0;
  for (Index k = 0; k < L; ++k) {
    double best = std::numeric_limits<double>::infinity();
    Index arg = -1;
    for (Index j = 0; j < L; ++j) {
      if (j == k) continue;
      const double d = (x.row(j) - x.row(k)).lpNorm<Eigen::Infinity>();
      if (d < best && d > 0.0) {
        best = d;
        arg = j;
      }
    }
    if (arg >= 0) bound = std::max(bound, std::abs(v[arg] - v[k]) / best);
  }
  return bound;
}

}  // namespace detail

/// Estimates the Lipschitz constants of the residue function (data minus
/// model): gamma0 from the residual derivative samples, gamma_i (i>0) from
/// a second level of gradient estimation applied to each residual
/// derivative channel. `model == nullptr` means the zero model, so the
/// constants describe the data-generating function itself.
inline LipschitzEstimate estimate_lipschitz(const Dataset& data, const Model* model, double nu,
                                            const GradEstConfig& gconfig = {}) {
  data.validate();
  require(std::isfinite(nu) && nu >= 1.0, "estimate_lipschitz: nu must be >= 1");
  const Index L = data.size();
  const int n = data.n_x();

  // resolve the neighborhood radius once; the second-level estimations reuse it
  GradEstConfig gcfg = gconfig;
  gcfg.radius = detail::resolve_radius(data.x, gconfig);

  // derivative samples: measured if present, otherwise estimated from the
  // input-output data; then the model derivative is subtracted
  Matrix residual_dz =
      data.has_derivatives() ? *data.dz : *estimate_gradients(data, gcfg).dz;
  if (model)
    for (Index k = 0; k < L; ++k)
      for (int i = 1; i <= n; ++i)
        residual_dz(k, i - 1) -= model->derivative(data.x.row(k).transpose(), i);

  LipschitzEstimate out;
  out.nu = nu;
  out.gamma = Vector::Zero(n + 1);
  out.gamma[0] = nu * residual_dz.cwiseAbs().rowwise().maxCoeff().maxCoeff();

  for (int i = 1; i <= n; ++i) {
    Dataset level2;
    level2.x = data.x;
    level2.z = residual_dz.col(i - 1);
    try {
      const Matrix second = *estimate_gradients(level2, gcfg).dz;
      out.gamma[i] = nu * second.cwiseAbs().rowwise().maxCoeff().maxCoeff();
    } catch (const RankDeficiency&) {
      out.gamma[i] = nu * detail::difference_quotient_bound(data.x, level2.z);
      out.fallback_channels.push_back(i);
    }
  }
  return out;
}

/// Closed-form uncertainty envelopes: per channel, the tightest upper and
/// lower bounds consistent with the sample cones h_k +/- gamma |x - x_k|_inf
/// and, for derivative channels, the gamma0 clamp.
class Envelope {
 public:
  /// `half_widths[c]` is either a single value (uniform, q=inf case) or one
  /// value per sample. Channel c uses data channel c: z for c=0, dz column
  /// c-1 otherwise. `model == nullptr` means the zero model.
  Envelope(const Dataset& data, const Model* model, Vector gamma,
           std::vector<Vector> half_widths)
      : x_(data.x), model_(model), gamma_(std::move(gamma)) {
    data.validate();
    require(x_.rows() >= 1, "Envelope: empty sample set");
    const int n = static_cast<int>(x_.cols());
    require(gamma_.size() == n + 1, "Envelope: need gamma for channels 0..n_x");
    require(static_cast<int>(half_widths.size()) >= 1, "Envelope: need half-widths for channel 0");

    const Index L = x_.rows();
    upper_.resize(half_widths.size());
    lower_.resize(half_widths.size());
    for (std::size_t c = 0; c < half_widths.size(); ++c) {
      if (c > 0) require(data.has_derivatives(), "Envelope: derivative channels need dz samples");
      Vector hw = half_widths[c];
      require(hw.size() == 1 || hw.size() == L, "Envelope: half-widths must be scalar or per-sample");
      require((hw.array() >= 0.0).all(), "Envelope: half-widths must be >= 0");
      Vector center(L);
      for (Index k = 0; k < L; ++k) {
        const Vector xk = x_.row(k).transpose();
        const double sample = c == 0 ? data.z[k] : (*data.dz)(k, static_cast<Index>(c) - 1);
        center[k] = sample - (model_ ? model_->channel(xk, static_cast<int>(c)) : 0.0);
      }
      const Vector w = hw.size() == 1 ? Vector::Constant(L, hw[0]) : hw;
      upper_[c] = center + w;
      lower_[c] = center - w;
    }
  }

  int channels() const { return static_cast<int>(upper_.size()); }

  /// (lower, upper) bound on channel i of the unknown function at x.
  std::pair<double, double> bounds(const Vector& x, int i) const {
    require(i >= 0 && i < channels(), "Envelope: channel out of range");
    require(x.size() == x_.cols(), "Envelope: point dimension mismatch");
    const double g = gamma_[i];
    double up = std::numeric_limits<double>::infinity();
    double lo = -std::numeric_limits<double>::infinity();
    for (Index k = 0; k < x_.rows(); ++k) {
      const double d = (x.transpose() - x_.row(k)).lpNorm<Eigen::Infinity>();
      up = std::min(up, upper_[static_cast<std::size_t>(i)][k] + g * d);
      lo = std::max(lo, lower_[static_cast<std::size_t>(i)][k] - g * d);
    }
    if (i > 0) {
      // derivative channels are additionally bounded by the gamma0 clamp
      up = std::min(up, gamma_[0]);
      lo = std::max(lo, -gamma_[0]);
    }
    const double center = model_ ? model_->channel(x, i) : 0.0;
    return {center + lo, center + up};
  }

 private:
  Matrix x_;
  const Model* model_;
  Vector gamma_;
  std::vector<Vector> upper_;  // h_bar per channel
  std::vector<Vector> lower_;  // h_underbar per channel
};

/// Element-wise half-widths zeta_k = zeta_R |delta_k| + zeta_A for the l2
/// noise model. Rejects (zeta_R, zeta_A) pairs inconsistent with the
/// sequence bound mu.
inline Vector relabs_noise_bounds(const Vector& residuals, double zeta_r, double zeta_a, double mu,
                                  Index L) {
  require(zeta_r >= 0.0 && zeta_a >= 0.0, "relabs_noise_bounds: parameters must be >= 0");
  require(L >= 1, "relabs_noise_bounds: L must be >= 1");
  if (zeta_r * mu + zeta_a * std::sqrt(static_cast<double>(L)) > mu)
    throw std::invalid_argument(
        "relabs_noise_bounds: zeta_R * mu + zeta_A * sqrt(L) exceeds mu; the element-wise bounds "
        "would be inconsistent with the sequence bound");
  return zeta_r * residuals.cwiseAbs() + Vector::Constant(residuals.size(), zeta_a);
}

/// Smallest half-width for which the zero-model envelopes of one channel
/// stay strictly ordered at every sample point, found by bisection, then
/// inflated by the safety factor nu.
inline double estimate_noise_bound(const Matrix& x, const Vector& z, double gamma, double nu) {
  require(x.rows() == z.size() && x.rows() >= 1, "estimate_noise_bound: inconsistent samples");
  require(std::isfinite(gamma) && gamma >= 0.0, "estimate_noise_bound: gamma must be >= 0");
  require(std::isfinite(nu) && nu >= 1.0, "estimate_noise_bound: nu must be >= 1");
  const Index L = x.rows();

  Matrix dist(L, L);
  for (Index k = 0; k < L; ++k)
    for (Index j = 0; j < L; ++j)
      dist(k, j) = (x.row(k) - x.row(j)).lpNorm<Eigen::Infinity>();

  const auto separated = [&](double mu) {
    for (Index k = 0; k < L; ++k) {
      double up = std::numeric_limits<double>::infinity();
      double lo = -std::numeric_limits<double>::infinity();
      for (Index j = 0; j < L; ++j) {
        up = std::min(up, z[j] + mu + gamma * dist(k, j));
        lo = std::max(lo, z[j] - mu - gamma * dist(k, j));
      }
      if (!(up > lo)) return false;
    }
    return true;
  };

  double lo = 0.0;
  double hi = 0.5 * (z.maxCoeff() - z.minCoeff()) + 1.0;
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    (separated(mid) ? hi : lo) = mid;
  }
  return nu * 0.5 * (lo + hi);
}

}  // namespace sobid
