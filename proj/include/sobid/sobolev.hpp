#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "sobid/identify.hpp"
#include "sobid/types.hpp"

namespace sobid {

/// Evaluation lattice over the domain X.
struct GridSpec {
  Vector lower;
  Vector upper;
  std::vector<int> counts;

  void validate() const {
    require(lower.size() == upper.size(), "GridSpec: bound dimension mismatch");
    require(static_cast<Index>(counts.size()) == lower.size(), "GridSpec: one count per dimension");
    require_finite(lower, "GridSpec: lower bounds");
    require_finite(upper, "GridSpec: upper bounds");
    for (Index i = 0; i < lower.size(); ++i) {
      require(counts[static_cast<std::size_t>(i)] >= 2, "GridSpec: counts must be >= 2");
      require(lower[i] < upper[i], "GridSpec: lower bound must be below upper bound");
    }
  }
};

/// Reference function with exact channel evaluations: i=0 the value,
/// i>0 the i-th partial derivative.
struct TruthFn {
  std::function<double(const Vector&, int)> channel;
};

struct SobolevErrorReport {
  double total = 0.0;
  Vector per_channel;  // channels 0..n_x
};

namespace detail {

/// Visits every lattice point; p=2 uses cell midpoints (quadrature nodes),
/// p=inf uses an endpoint-including grid (sup surrogate).
template <class Fn>
void for_each_grid_point(const GridSpec& grid, Pnorm p, Fn&& fn) {
  const Index dim = grid.lower.size();
  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  Vector x(dim);
  while (true) {
    double cell_volume = 1.0;
    for (Index i = 0; i < dim; ++i) {
      const int c = grid.counts[static_cast<std::size_t>(i)];
      const double h = (grid.upper[i] - grid.lower[i]) / static_cast<double>(p == Pnorm::two ? c : c - 1);
      x[i] = p == Pnorm::two ? grid.lower[i] + (idx[static_cast<std::size_t>(i)] + 0.5) * h
                             : grid.lower[i] + idx[static_cast<std::size_t>(i)] * h;
      cell_volume *= h;
    }
    fn(x, cell_volume);
    Index i = dim - 1;
    while (i >= 0 && ++idx[static_cast<std::size_t>(i)] == grid.counts[static_cast<std::size_t>(i)])
      idx[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) break;
  }
}

}  // namespace detail

/// Grid surrogate of the Sobolev identification error: the per-channel
/// lattice L_p norm of (truth - model), summed over channels 0..n_x.
/// A reporting metric, not a certified norm value.
inline SobolevErrorReport sobolev_error(const Model& model, const TruthFn& truth,
                                        const GridSpec& grid, Pnorm p) {
  grid.validate();
  require(grid.lower.size() == model.input_dim(), "sobolev_error: grid/model dimension mismatch");
  const int n = model.input_dim();

  SobolevErrorReport out;
  out.per_channel = Vector::Zero(n + 1);
  for (int i = 0; i <= n; ++i) {
    double acc = 0.0;
    detail::for_each_grid_point(grid, p, [&](const Vector& x, double cell_volume) {
      const double diff = std::abs(truth.channel(x, i) - model.channel(x, i));
      if (p == Pnorm::two)
        acc += diff * diff * cell_volume;
      else
        acc = std::max(acc, diff);
    });
    out.per_channel[i] = p == Pnorm::two ? std::sqrt(acc) : acc;
    out.total += out.per_channel[i];
  }
  return out;
}

}  // namespace sobid
