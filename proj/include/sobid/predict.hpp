#pragma once

#include <cmath>
#include <vector>

#include "sobid/dataset.hpp"
#include "sobid/identify.hpp"
#include "sobid/types.hpp"

namespace sobid {

/// NARX lag structure. One-step regressors are
///   (y_t, .., y_{t-n_a+1}, u_{t-1}, .., u_{t-n_b})        -> y_{t+1};
/// direct k-step regressors are
///   (y_t, .., y_{t-n_a+1}, u_{t+k-2}, .., u_{t-n_b})      -> y_{t+k}.
struct LagSpec {
  int n_a = 3;
  int n_b = 2;
  int horizon = 1;
  bool direct = false;

  void validate() const {
    require(n_a >= 1, "LagSpec: n_a must be >= 1");
    require(n_b >= 0, "LagSpec: n_b must be >= 0");
    require(horizon >= 1, "LagSpec: horizon must be >= 1");
  }

  int regressor_dim() const {
    return direct ? n_a + n_b + horizon - 1 : n_a + n_b;
  }
};

/// Paired input/output time series with a sampling time.
struct IoSeries {
  Vector u;
  Vector y;
  double sampling_time = 1.0;

  void validate() const {
    require(u.size() == y.size(), "IoSeries: input/output length mismatch");
    require(u.size() >= 1, "IoSeries: empty series");
    require_finite(u, "IoSeries: inputs");
    require_finite(y, "IoSeries: outputs");
  }
};

/// Builds the regression dataset for the chosen lag structure. The target
/// of the row built at time t is y_{t+1} (one-step) or y_{t+k} (direct).
inline Dataset build_narx_dataset(const IoSeries& series, const LagSpec& lags) {
  series.validate();
  lags.validate();
  const Index T = series.y.size();
  const int k = lags.direct ? lags.horizon : 1;
  const int n_u = lags.direct ? lags.n_b + lags.horizon - 1 : lags.n_b;

  const Index t_first = std::max(lags.n_a - 1, lags.n_b);
  const Index t_last = T - 1 - k;  // last t with target y_{t+k} available
  require(t_last >= t_first, "build_narx_dataset: series too short for the chosen lags/horizon");

  const Index L = t_last - t_first + 1;
  Dataset out;
  out.x = Matrix(L, lags.n_a + n_u);
  out.z = Vector(L);
  for (Index t = t_first; t <= t_last; ++t) {
    const Index row = t - t_first;
    for (int j = 0; j < lags.n_a; ++j) out.x(row, j) = series.y[t - j];
    for (int j = 0; j < n_u; ++j) out.x(row, lags.n_a + j) = series.u[t + k - 2 - j];
    out.z[row] = series.y[t + k];
  }
  return out;
}

/// Iterates a one-step model k times, feeding each prediction back into the
/// regressor. `y_history` and `u_history` end at times t and t-1; the
/// future inputs u_t .. u_{t+k-2} drive the later steps. All intermediate
/// predictions are returned.
inline Vector predict_iterated(const Model& model, const LagSpec& lags, const Vector& y_history,
                               const Vector& u_history, const Vector& u_future, int k) {
  lags.validate();
  require(k >= 1, "predict_iterated: horizon must be >= 1");
  require(!lags.direct, "predict_iterated: requires a one-step lag structure");
  require(model.input_dim() == lags.regressor_dim(), "predict_iterated: model/lag dimension mismatch");
  require(y_history.size() >= lags.n_a, "predict_iterated: insufficient output history");
  require(u_history.size() >= lags.n_b, "predict_iterated: insufficient input history");
  require(lags.n_b == 0 || u_future.size() >= k - 1, "predict_iterated: insufficient future inputs");

  std::vector<double> ybuf(y_history.end() - lags.n_a, y_history.end());
  std::vector<double> ubuf;
  if (lags.n_b > 0) ubuf.assign(u_history.end() - lags.n_b, u_history.end());

  Vector out(k);
  Vector reg(lags.regressor_dim());
  for (int step = 0; step < k; ++step) {
    for (int j = 0; j < lags.n_a; ++j) reg[j] = ybuf[ybuf.size() - 1 - j];
    for (int j = 0; j < lags.n_b; ++j) reg[lags.n_a + j] = ubuf[ubuf.size() - 1 - j];
    const double yhat = model.value(reg);
    out[step] = yhat;
    ybuf.push_back(yhat);
    if (lags.n_b > 0 && step < k - 1) ubuf.push_back(u_future[step]);
  }
  return out;
}

/// Direct k-step prediction: a single model evaluation on the prepared
/// regressor.
inline double predict_direct(const Model& model, const Vector& regressor) {
  require(regressor.size() == model.input_dim(), "predict_direct: regressor dimension mismatch");
  return model.value(regressor);
}

inline double rmse(const Vector& predictions, const Vector& truths) {
  require(predictions.size() == truths.size(), "rmse: length mismatch");
  require(predictions.size() >= 1, "rmse: empty sequences");
  return std::sqrt((predictions - truths).squaredNorm() / static_cast<double>(predictions.size()));
}

}  // namespace sobid
