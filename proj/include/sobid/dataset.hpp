#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sobid/basis.hpp"
#include "sobid/types.hpp"

namespace sobid {

enum class Provenance { measured, estimated, analytic };

inline std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::measured: return "measured";
    case Provenance::estimated: return "estimated";
    case Provenance::analytic: return "analytic";
  }
  return "?";
}

/// Regressor samples, output samples and (optionally) one derivative
/// sample channel per input variable. Immutable once built.
struct Dataset {
  Matrix x;                   // L x n_x
  Vector z;                   // L
  std::optional<Matrix> dz;   // L x n_x, column i-1 = samples of channel i
  Provenance derivative_provenance = Provenance::measured;

  Index size() const { return x.rows(); }
  int n_x() const { return static_cast<int>(x.cols()); }
  bool has_derivatives() const { return dz.has_value(); }

  void validate() const {
    require(x.rows() >= 1, "Dataset: at least one sample required");
    require(x.cols() >= 1, "Dataset: at least one regressor component required");
    require(z.size() == x.rows(), "Dataset: output length != sample count");
    require_finite(x, "Dataset: regressors");
    require_finite(z, "Dataset: outputs");
    if (dz) {
      require(dz->rows() == x.rows() && dz->cols() == x.cols(),
              "Dataset: derivative channels must cover every variable at every sample");
      require_finite(*dz, "Dataset: derivative samples");
    }
  }
};

/// Per-variable affine map: scaled = (raw + offset) * gain, gain > 0.
struct ScaleInfo {
  Vector offset;
  Vector gain;

  Vector scale(const Vector& raw) const { return (raw + offset).cwiseProduct(gain); }
  Vector unscale(const Vector& scaled) const { return scaled.cwiseQuotient(gain) - offset; }
};

/// Maps every regressor component affinely into target_range. Constant
/// components go to the interval midpoint with gain 1. Derivative samples
/// are divided by the per-variable gain (chain rule), so the scaled
/// dataset describes the composed function exactly.
inline std::pair<Dataset, ScaleInfo> rescale(const Dataset& data,
                                             std::pair<double, double> target_range = {-1.0, 1.0}) {
  data.validate();
  require(data.size() >= 2, "rescale: need at least two samples to define ranges");
  const auto [lo, hi] = target_range;
  require(lo < hi, "rescale: empty target range");

  const int n = data.n_x();
  ScaleInfo info{Vector(n), Vector(n)};
  for (int i = 0; i < n; ++i) {
    const double rmin = data.x.col(i).minCoeff();
    const double rmax = data.x.col(i).maxCoeff();
    if (rmax > rmin) {
      info.gain[i] = (hi - lo) / (rmax - rmin);
      info.offset[i] = lo / info.gain[i] - rmin;
    } else {
      info.gain[i] = 1.0;
      info.offset[i] = 0.5 * (lo + hi) - rmin;
    }
  }

  Dataset out = data;
  for (Index k = 0; k < data.size(); ++k)
    out.x.row(k) = info.scale(data.x.row(k).transpose()).transpose();
  if (data.dz) {
    out.dz = *data.dz;
    for (int i = 0; i < n; ++i) out.dz->col(i) /= info.gain[i];
  }
  return {std::move(out), std::move(info)};
}

/// One stacked regression block: outputs z^i and matrix Phi^i whose row k
/// holds the basis (i=0) or basis-derivative (i>0) values at sample k.
struct RegressionBlock {
  int channel = 0;  // 0 = function values, i>0 = derivative w.r.t. variable i
  Vector z;
  Matrix phi;
};

struct RegressionMatrices {
  int n_x = 0;
  int basis_size = 0;
  std::vector<RegressionBlock> blocks;

  const RegressionBlock* find(int channel) const {
    for (const auto& b : blocks)
      if (b.channel == channel) return &b;
    return nullptr;
  }
};

/// Builds the stacked regression vectors/matrices for channel 0 and, when
/// requested, every derivative channel present in the dataset.
inline RegressionMatrices build_regression_matrices(const Dataset& data, const BasisSet& basis,
                                                    bool with_derivative_channels) {
  data.validate();
  require(data.n_x() == basis.input_dim(), "build_regression_matrices: dataset/basis dimension mismatch");
  if (with_derivative_channels)
    require(data.has_derivatives(),
            "build_regression_matrices: derivative channels requested but dataset has none");

  const Index L = data.size();
  const int N = basis.size();
  RegressionMatrices out;
  out.n_x = data.n_x();
  out.basis_size = N;

  RegressionBlock b0;
  b0.channel = 0;
  b0.z = data.z;
  b0.phi = Matrix(L, N);
  for (Index k = 0; k < L; ++k) b0.phi.row(k) = basis.eval(data.x.row(k).transpose()).transpose();
  out.blocks.push_back(std::move(b0));

  if (with_derivative_channels) {
    for (int i = 1; i <= data.n_x(); ++i) {
      RegressionBlock bi;
      bi.channel = i;
      bi.z = data.dz->col(i - 1);
      bi.phi = Matrix(L, N);
      for (Index k = 0; k < L; ++k)
        bi.phi.row(k) = basis.eval_derivative(data.x.row(k).transpose(), i).transpose();
      out.blocks.push_back(std::move(bi));
    }
  }
  return out;
}

inline RegressionMatrices build_regression_matrices(const Dataset& data, const BasisSet& basis) {
  return build_regression_matrices(data, basis, data.has_derivatives());
}

// ---------------------------------------------------------------------------
// CSV persistence: header "x1,..,xn,z[,dz1,..,dzn]", one row per sample,
// full-precision decimal floats.

namespace detail {
inline std::string format_full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace detail

inline void write_dataset_csv(const std::string& path, const Dataset& data) {
  data.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  const int n = data.n_x();
  for (int i = 1; i <= n; ++i) out << "x" << i << ",";
  out << "z";
  if (data.dz)
    for (int i = 1; i <= n; ++i) out << ",dz" << i;
  out << "\n";
  for (Index k = 0; k < data.size(); ++k) {
    for (int i = 0; i < n; ++i) out << detail::format_full(data.x(k, i)) << ",";
    out << detail::format_full(data.z[k]);
    if (data.dz)
      for (int i = 0; i < n; ++i) out << "," << detail::format_full((*data.dz)(k, i));
    out << "\n";
  }
}

inline Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty dataset file '" + path + "'");

  auto split = [](const std::string& s) {
    std::vector<std::string> f;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    return f;
  };

  const auto header = split(line);
  int n = 0;
  while (n < static_cast<int>(header.size()) && header[n] == "x" + std::to_string(n + 1)) ++n;
  const bool has_dz = header.size() == static_cast<std::size_t>(2 * n + 1);
  if (n < 1 || header[n] != "z" || (!has_dz && header.size() != static_cast<std::size_t>(n + 1)))
    throw std::runtime_error("malformed dataset header in '" + path + "'");

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != header.size()) throw std::runtime_error("ragged row in '" + path + "'");
    std::vector<double> row;
    row.reserve(f.size());
    for (const auto& tok : f) row.push_back(std::stod(tok));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("dataset '" + path + "' has no samples");

  Dataset d;
  const Index L = static_cast<Index>(rows.size());
  d.x = Matrix(L, n);
  d.z = Vector(L);
  if (has_dz) d.dz = Matrix(L, n);
  for (Index k = 0; k < L; ++k) {
    for (int i = 0; i < n; ++i) d.x(k, i) = rows[k][i];
    d.z[k] = rows[k][n];
    if (has_dz)
      for (int i = 0; i < n; ++i) (*d.dz)(k, i) = rows[k][n + 1 + i];
  }
  d.validate();
  return d;
}

}  // namespace sobid
