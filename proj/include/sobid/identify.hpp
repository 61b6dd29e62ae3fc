#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sobid/basis.hpp"
#include "sobid/dataset.hpp"
#include "sobid/solver.hpp"
#include "sobid/types.hpp"

namespace sobid {

/// Per-channel noise-sequence bounds |d^i|_q <= mu^i, with optional
/// element-wise half-widths for the l2 case.
struct NoiseBounds {
  /// mu[i] bounds channel i; must cover every channel in use.
  std::vector<double> mu;
  Qnorm q = Qnorm::inf;
  /// Optional per-sample half-widths, column per channel index (l2 noise
  /// model); entries must be >= 0.
  std::optional<Matrix> per_sample;
};

struct IdentifyMeta {
  int method = 0;  // 1 or 2
  Rnorm r = Rnorm::one;
  Qnorm q = Qnorm::two;
  std::vector<double> weights;  // method 2: lambda per channel
  double penalty_weight = 0.0;  // method 2: Lambda
  std::vector<double> radii;    // method 1: mu per constrained channel
  SolveReport report;
};

/// Basis expansion with identified coefficients. Evaluation of the model
/// and of its exact first partial derivatives.
class Model {
 public:
  Model(BasisSet basis, Vector coefficients, IdentifyMeta meta = {})
      : basis_(std::move(basis)), coeffs_(std::move(coefficients)), meta_(std::move(meta)) {
    require(coeffs_.size() == basis_.size(), "Model: coefficient count != basis size");
    require_finite(coeffs_, "Model: coefficients");
  }

  const BasisSet& basis() const { return basis_; }
  const Vector& coefficients() const { return coeffs_; }
  const IdentifyMeta& meta() const { return meta_; }
  int input_dim() const { return basis_.input_dim(); }

  double value(const Vector& x) const { return basis_.eval(x).dot(coeffs_); }
  double derivative(const Vector& x, int i) const { return basis_.eval_derivative(x, i).dot(coeffs_); }

  /// Channel evaluation: i=0 is the function, i>0 the i-th derivative.
  double channel(const Vector& x, int i) const { return i == 0 ? value(x) : derivative(x, i); }

  nlohmann::json to_json() const {
    nlohmann::json meta{{"method", meta_.method},
                        {"r", meta_.r == Rnorm::one ? 1 : 2},
                        {"q", meta_.q == Qnorm::two ? "l2" : "linf"},
                        {"weights", meta_.weights},
                        {"penalty_weight", meta_.penalty_weight},
                        {"radii", meta_.radii},
                        {"solve", {{"objective", meta_.report.objective},
                                   {"iterations", meta_.report.iterations},
                                   {"converged", meta_.report.converged},
                                   {"residuals", meta_.report.constraint_residuals}}}};
    std::vector<double> c(coeffs_.begin(), coeffs_.end());
    return {{"basis", basis_.to_json()}, {"coefficients", c}, {"metadata", meta}};
  }

  static Model from_json(const nlohmann::json& j) {
    auto basis = BasisSet::from_json(j.at("basis"));
    const auto c = j.at("coefficients").get<std::vector<double>>();
    Vector coeffs = Eigen::Map<const Vector>(c.data(), static_cast<Index>(c.size()));
    IdentifyMeta meta;
    if (j.contains("metadata")) {
      const auto& m = j.at("metadata");
      meta.method = m.value("method", 0);
      meta.r = m.value("r", 1) == 1 ? Rnorm::one : Rnorm::two;
      meta.q = m.value("q", "l2") == std::string("l2") ? Qnorm::two : Qnorm::inf;
      meta.weights = m.value("weights", std::vector<double>{});
      meta.penalty_weight = m.value("penalty_weight", 0.0);
      meta.radii = m.value("radii", std::vector<double>{});
    }
    return Model(std::move(basis), std::move(coeffs), std::move(meta));
  }

 private:
  BasisSet basis_;
  Vector coeffs_;
  IdentifyMeta meta_;
};

struct FfsCheck {
  std::vector<int> channels;
  std::vector<double> residuals;
  bool member = false;
};

/// Residual norms |z^i - Phi^i a|_q per channel, and whether every one is
/// within its (slightly relaxed) noise bound.
inline FfsCheck check_ffs_membership(const Model& model, const RegressionMatrices& matrices,
                                     const NoiseBounds& bounds) {
  require(matrices.basis_size == model.basis().size(), "check_ffs_membership: basis size mismatch");
  FfsCheck out;
  out.member = true;
  for (const auto& b : matrices.blocks) {
    require(static_cast<std::size_t>(b.channel) < bounds.mu.size(),
            "check_ffs_membership: missing noise bound for channel " + std::to_string(b.channel));
    const double res = vector_norm(Vector(b.z - b.phi * model.coefficients()), bounds.q);
    out.channels.push_back(b.channel);
    out.residuals.push_back(res);
    if (res > relaxed_bound(bounds.mu[b.channel])) out.member = false;
  }
  return out;
}

/// Min-norm coefficients subject to per-channel noise-ball constraints.
/// Throws InfeasibleIdentification when the constraint set is found empty
/// (the prior assumptions are falsified for this basis / these bounds).
inline Model identify_method1(const BasisSet& basis, const RegressionMatrices& matrices,
                              const NoiseBounds& bounds, Rnorm r, const SolverConfig& config = {}) {
  require(matrices.basis_size == basis.size(), "identify_method1: basis size mismatch");
  require(!matrices.blocks.empty(), "identify_method1: no regression blocks");

  std::vector<ConstraintBlock> cblocks;
  std::vector<double> radii;
  for (const auto& b : matrices.blocks) {
    require(static_cast<std::size_t>(b.channel) < bounds.mu.size(),
            "identify_method1: missing noise bound for channel " + std::to_string(b.channel));
    const double mu = bounds.mu[b.channel];
    require(std::isfinite(mu) && mu >= 0.0, "identify_method1: noise bounds must be >= 0");
    cblocks.push_back({b.phi, b.z, mu});
    radii.push_back(mu);
  }

  SolveReport rep = solve_constrained_minnorm(cblocks, bounds.q, r, config);
  if (rep.infeasible) {
    std::ostringstream msg;
    msg << "identification constraints are infeasible: the basis set is too poor or the noise "
           "bounds are too tight; per-channel residuals vs bounds:";
    for (std::size_t i = 0; i < radii.size(); ++i)
      msg << " [" << matrices.blocks[i].channel << "] " << rep.constraint_residuals[i] << " vs "
          << radii[i];
    throw InfeasibleIdentification(msg.str(), rep.constraint_residuals, radii);
  }
  if (!rep.converged)
    throw NumericalFailure("identify_method1: splitting did not converge within " +
                           std::to_string(config.max_iterations) + " iterations");

  IdentifyMeta meta;
  meta.method = 1;
  meta.r = r;
  meta.q = bounds.q;
  meta.radii = std::move(radii);
  meta.report = rep;
  return Model(basis, rep.solution, std::move(meta));
}

/// Regularized weighted least-squares coefficients. Channels with zero
/// weight are dropped from the stacked problem, so function-only
/// identification never touches derivative data.
inline Model identify_method2(const BasisSet& basis, const RegressionMatrices& matrices,
                              const std::vector<double>& weights, double lambda, Rnorm r,
                              const SolverConfig& config = {}) {
  require(matrices.basis_size == basis.size(), "identify_method2: basis size mismatch");
  bool any = false;
  for (double w : weights) {
    require(std::isfinite(w) && w >= 0.0, "identify_method2: weights must be >= 0");
    if (w > 0.0) any = true;
  }
  require(any, "identify_method2: at least one channel weight must be positive");

  // stack rows scaled by sqrt(weight) into a single fitting block
  Index rows = 0;
  for (const auto& b : matrices.blocks) {
    const double w = static_cast<std::size_t>(b.channel) < weights.size() ? weights[b.channel] : 0.0;
    if (w > 0.0) rows += b.phi.rows();
  }
  require(rows > 0, "identify_method2: no regression block matches a positive weight");
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (weights[i] > 0.0)
      require(matrices.find(static_cast<int>(i)) != nullptr,
              "identify_method2: weight on channel " + std::to_string(i) + " but no data block");

  DataBlock stacked;
  stacked.weight = 1.0;
  stacked.phi = Matrix(rows, matrices.basis_size);
  stacked.z = Vector(rows);
  Index at = 0;
  for (const auto& b : matrices.blocks) {
    const double w = static_cast<std::size_t>(b.channel) < weights.size() ? weights[b.channel] : 0.0;
    if (w <= 0.0) continue;
    const double s = std::sqrt(w);
    stacked.phi.middleRows(at, b.phi.rows()) = s * b.phi;
    stacked.z.segment(at, b.z.size()) = s * b.z;
    at += b.phi.rows();
  }

  SolveReport rep = solve_regularized({std::move(stacked)}, lambda, r, config);
  if (!rep.converged)
    throw NumericalFailure("identify_method2: proximal gradient did not converge within " +
                           std::to_string(config.max_iterations) + " iterations");

  IdentifyMeta meta;
  meta.method = 2;
  meta.r = r;
  meta.q = Qnorm::two;
  meta.weights = weights;
  meta.penalty_weight = lambda;
  meta.report = rep;
  return Model(basis, rep.solution, std::move(meta));
}

}  // namespace sobid
