#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace sobid {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Residual / constraint norms (q in the problem statements).
enum class Qnorm { two, inf };

/// Coefficient penalty norms (r in the problem statements).
enum class Rnorm { one, two };

/// Function-space norms used by the grid metrics (p).
enum class Pnorm { two, inf };

inline double vector_norm(const Vector& v, Qnorm q) {
  if (v.size() == 0) return 0.0;
  return q == Qnorm::two ? v.norm() : v.lpNorm<Eigen::Infinity>();
}

inline double vector_norm(const Vector& v, Rnorm r) {
  if (v.size() == 0) return 0.0;
  return r == Rnorm::one ? v.lpNorm<1>() : v.norm();
}

/// Invalid or inconsistent run configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical breakdown: NaN/Inf inputs, solver non-convergence,
/// simulation blow-up (CLI exit code 4).
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A local least-squares neighborhood whose second-moment matrix is
/// numerically singular.
struct RankDeficiency : NumericalFailure {
  RankDeficiency(Index sample_index, double condition_estimate, const std::string& what)
      : NumericalFailure(what), sample(sample_index), condition(condition_estimate) {}
  Index sample;
  double condition;
};

/// Constrained identification found no coefficient vector consistent with
/// the data and the noise bounds (CLI exit code 3). Either the basis set
/// is too poor or the noise bounds are too tight; the residuals tell which
/// channels are violated and by how much.
struct InfeasibleIdentification : std::runtime_error {
  InfeasibleIdentification(std::string what, std::vector<double> res, std::vector<double> bnd)
      : std::runtime_error(std::move(what)), residuals(std::move(res)), bounds(std::move(bnd)) {}
  std::vector<double> residuals;
  std::vector<double> bounds;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

inline void require_finite(const Vector& v, const std::string& name) {
  if (!v.allFinite()) throw std::invalid_argument(name + " contains non-finite values");
}

inline void require_finite(const Matrix& m, const std::string& name) {
  if (!m.allFinite()) throw std::invalid_argument(name + " contains non-finite values");
}

}  // namespace sobid
