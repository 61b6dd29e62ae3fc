#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "sobid/types.hpp"

namespace sobid {

struct SolverConfig {
  int max_iterations = 50000;
  /// Relative step-change tolerance (proximal gradient) and relative
  /// residual tolerance (splitting).
  double tolerance = 1e-9;
  /// Initial splitting penalty; adapted by residual balancing.
  double penalty = 1.0;
  bool adapt_penalty = true;
  /// r=2 only: use the conventional squared form of the coefficient
  /// penalty instead of the plain Euclidean norm.
  bool square_penalty = false;
};

struct SolveReport {
  Vector solution;
  double objective = 0.0;
  /// Per-block fit/constraint residual norms, recomputed from `solution`.
  std::vector<double> constraint_residuals;
  int iterations = 0;
  bool converged = false;
  /// Constrained solves only: the splitting residuals stalled above
  /// tolerance, indicating an empty feasible set.
  bool infeasible = false;
};

/// One weighted least-squares fitting block of the regularized problem.
struct DataBlock {
  double weight = 1.0;
  Matrix phi;
  Vector z;
};

/// One norm-ball constraint block of the min-norm problem.
struct ConstraintBlock {
  Matrix phi;
  Vector z;
  double radius = 0.0;
};

/// Euclidean projection onto the l_q ball of the given radius:
/// radial shrink for q=2, per-coordinate clamp for q=inf.
inline Vector project_ball(const Vector& v, double radius, Qnorm q) {
  require(std::isfinite(radius) && radius >= 0.0, "project_ball: radius must be finite and >= 0");
  require_finite(v, "project_ball: input");
  if (q == Qnorm::inf) return v.cwiseMax(-radius).cwiseMin(radius);
  const double n = v.norm();
  if (n <= radius) return v;
  return n == 0.0 ? Vector::Zero(v.size()) : Vector(v * (radius / n));
}

namespace detail {

inline Vector prox_penalty(const Vector& v, double step_penalty, Rnorm r, bool squared) {
  if (step_penalty == 0.0) return v;
  if (r == Rnorm::one) {
    Vector out(v.size());
    for (Index j = 0; j < v.size(); ++j) {
      const double a = std::abs(v[j]) - step_penalty;
      out[j] = a > 0.0 ? (v[j] > 0.0 ? a : -a) : 0.0;
    }
    return out;
  }
  if (squared) return v / (1.0 + 2.0 * step_penalty);
  const double n = v.norm();
  if (n <= step_penalty) return Vector::Zero(v.size());
  return v * (1.0 - step_penalty / n);
}

inline double penalty_value(const Vector& v, double lambda, Rnorm r, bool squared) {
  if (r == Rnorm::one) return lambda * v.lpNorm<1>();
  return squared ? lambda * v.squaredNorm() : lambda * v.norm();
}

/// Largest eigenvalue of a symmetric PSD matrix by power iteration with a
/// deterministic start vector.
inline double largest_eigenvalue(const Matrix& g) {
  const Index n = g.rows();
  if (n == 0) return 0.0;
  Vector v = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  double lam = 0.0;
  for (int it = 0; it < 500; ++it) {
    Vector w = g * v;
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    w /= nw;
    const double lam_new = w.dot(g * w);
    if (std::abs(lam_new - lam) <= 1e-12 * std::max(1.0, std::abs(lam_new))) return lam_new;
    lam = lam_new;
    v = std::move(w);
  }
  return lam;
}

}  // namespace detail

/// Minimizes  sum_i w_i |z_i - Phi_i a|_2^2 + Lambda |a|_r  by accelerated
/// proximal gradient (monotone variant: momentum restarts whenever the
/// objective would increase). The smooth part is handled through its Gram
/// form, so block sizes only affect setup cost.
inline SolveReport solve_regularized(const std::vector<DataBlock>& blocks, double lambda,
                                     Rnorm r, const SolverConfig& config = {}) {
  require(!blocks.empty(), "solve_regularized: no data blocks");
  require(std::isfinite(lambda) && lambda >= 0.0, "solve_regularized: penalty weight must be >= 0");
  const Index n = blocks.front().phi.cols();
  for (const auto& b : blocks) {
    require(b.phi.cols() == n, "solve_regularized: blocks must share the column count");
    require(b.phi.rows() == b.z.size(), "solve_regularized: block row/output mismatch");
    require(std::isfinite(b.weight) && b.weight >= 0.0, "solve_regularized: block weights must be >= 0");
    require_finite(b.phi, "solve_regularized: block matrix");
    require_finite(b.z, "solve_regularized: block outputs");
  }

  Matrix gram = Matrix::Zero(n, n);
  Vector lin = Vector::Zero(n);
  double z2 = 0.0;
  for (const auto& b : blocks) {
    if (b.weight == 0.0) continue;
    gram.noalias() += b.weight * (b.phi.transpose() * b.phi);
    lin.noalias() += b.weight * (b.phi.transpose() * b.z);
    z2 += b.weight * b.z.squaredNorm();
  }

  if (!gram.allFinite() || !lin.allFinite())
    throw NumericalFailure("solve_regularized: normal equations overflowed");

  const auto smooth = [&](const Vector& a) { return a.dot(gram * a) - 2.0 * lin.dot(a) + z2; };
  const auto objective = [&](const Vector& a) {
    return smooth(a) + detail::penalty_value(a, lambda, r, config.square_penalty);
  };

  // unpenalized case: plain least squares, solved directly by QR on the
  // stacked matrix when it has full column rank
  if (lambda == 0.0) {
    Index rows = 0;
    for (const auto& b : blocks)
      if (b.weight > 0.0) rows += b.phi.rows();
    Matrix stacked(rows, n);
    Vector target(rows);
    Index at = 0;
    for (const auto& b : blocks) {
      if (b.weight == 0.0) continue;
      const double s = std::sqrt(b.weight);
      stacked.middleRows(at, b.phi.rows()) = s * b.phi;
      target.segment(at, b.z.size()) = s * b.z;
      at += b.phi.rows();
    }
    const Eigen::ColPivHouseholderQR<Matrix> qr(stacked);
    if (qr.rank() == n) {
      SolveReport rep;
      rep.solution = qr.solve(target);
      rep.converged = true;
      rep.objective = objective(rep.solution);
      for (const auto& b : blocks)
        rep.constraint_residuals.push_back((b.z - b.phi * rep.solution).norm());
      return rep;
    }
  }

  const double lip = 2.0 * detail::largest_eigenvalue(gram) * 1.0000001;
  SolveReport rep;

  Vector a = Vector::Zero(n);
  if (lip == 0.0) {
    // no data signal: the penalty alone fixes the solution at zero
    rep.solution = a;
    rep.converged = true;
  } else {
    Vector y = a;
    double theta = 1.0;
    double step = 1.0 / lip;
    double f_prev = objective(a);

    int it = 0;
    for (; it < config.max_iterations; ++it) {
      auto prox_step = [&](const Vector& base) {
        const Vector grad = 2.0 * (gram * base - lin);
        const double base_val = smooth(base);
        const double slack = 1e-12 * std::max(1.0, std::abs(base_val));
        const double step_floor = 1e-8 / lip;
        while (true) {
          Vector cand = detail::prox_penalty(base - step * grad, step * lambda, r, config.square_penalty);
          const Vector d = cand - base;
          if (!(step > step_floor) ||
              smooth(cand) <= base_val + grad.dot(d) + d.squaredNorm() / (2.0 * step) + slack)
            return cand;
          step *= 0.5;
        }
      };

      Vector a_next = prox_step(y);
      double f_next = objective(a_next);
      if (f_next > f_prev) {
        // restart momentum from the current iterate; a plain proximal step
        // cannot increase the objective
        theta = 1.0;
        a_next = prox_step(a);
        f_next = objective(a_next);
      }

      const double change = (a_next - a).lpNorm<Eigen::Infinity>();
      const double scale = std::max(1.0, a.lpNorm<Eigen::Infinity>());
      const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
      y = a_next + ((theta - 1.0) / theta_next) * (a_next - a);
      a = std::move(a_next);
      theta = theta_next;
      f_prev = f_next;
      if (change <= config.tolerance * scale) {
        rep.converged = true;
        ++it;
        break;
      }
    }
    rep.iterations = it;
    rep.solution = a;
  }

  rep.objective = objective(rep.solution);
  for (const auto& b : blocks)
    rep.constraint_residuals.push_back((b.z - b.phi * rep.solution).norm());
  return rep;
}

/// Minimizes |a|_r subject to |z_i - Phi_i a|_q <= radius_i by consensus
/// splitting: one auxiliary variable per constraint block plus one for the
/// penalty, each handled by a closed-form projection/prox. Detects empty
/// feasible sets via a stalled primal residual.
inline SolveReport solve_constrained_minnorm(const std::vector<ConstraintBlock>& blocks, Qnorm q,
                                             Rnorm r, const SolverConfig& config = {}) {
  require(!blocks.empty(), "solve_constrained_minnorm: no constraint blocks");
  const Index n = blocks.front().phi.cols();
  Index total_rows = n;
  for (const auto& b : blocks) {
    require(b.phi.cols() == n, "solve_constrained_minnorm: blocks must share the column count");
    require(b.phi.rows() == b.z.size(), "solve_constrained_minnorm: block row/output mismatch");
    require(b.phi.rows() >= 1, "solve_constrained_minnorm: empty block");
    require(std::isfinite(b.radius) && b.radius >= 0.0, "solve_constrained_minnorm: radii must be >= 0");
    require_finite(b.phi, "solve_constrained_minnorm: block matrix");
    require_finite(b.z, "solve_constrained_minnorm: block outputs");
    total_rows += b.phi.rows();
  }

  Matrix ktk = Matrix::Identity(n, n);
  for (const auto& b : blocks) ktk.noalias() += b.phi.transpose() * b.phi;
  const Eigen::LDLT<Matrix> factor(ktk);

  const std::size_t m = blocks.size();
  double rho = config.penalty;
  Vector a = Vector::Zero(n);
  Vector w = Vector::Zero(n), uw = Vector::Zero(n);
  std::vector<Vector> y(m), uy(m);
  for (std::size_t i = 0; i < m; ++i) {
    y[i] = blocks[i].z + project_ball(-blocks[i].z, blocks[i].radius, q);
    uy[i] = Vector::Zero(blocks[i].z.size());
  }

  SolveReport rep;
  double best_primal = std::numeric_limits<double>::infinity();
  int stall = 0;
  const double sqrt_rows = std::sqrt(static_cast<double>(total_rows));
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  int it = 0;
  for (; it < config.max_iterations; ++it) {
    Vector rhs = w - uw;
    for (std::size_t i = 0; i < m; ++i) rhs.noalias() += blocks[i].phi.transpose() * (y[i] - uy[i]);
    a = factor.solve(rhs);

    const Vector w_old = w;
    w = detail::prox_penalty(a + uw, 1.0 / rho, r, false);
    uw += a - w;

    double primal2 = (a - w).squaredNorm();
    Vector dual_vec = rho * (w - w_old);
    double scale_ka2 = a.squaredNorm(), scale_y2 = w.squaredNorm();
    for (std::size_t i = 0; i < m; ++i) {
      const Vector pa = blocks[i].phi * a;
      const Vector v = pa + uy[i] - blocks[i].z;
      const Vector y_new = blocks[i].z + project_ball(v, blocks[i].radius, q);
      dual_vec.noalias() += rho * (blocks[i].phi.transpose() * (y_new - y[i]));
      y[i] = y_new;
      uy[i] += pa - y[i];
      primal2 += (pa - y[i]).squaredNorm();
      scale_ka2 += pa.squaredNorm();
      scale_y2 += y[i].squaredNorm();
    }

    const double primal = std::sqrt(primal2);
    const double dual = dual_vec.norm();
    double u2 = uw.squaredNorm();
    for (const auto& u : uy) u2 += u.squaredNorm();
    const double eps_pri =
        sqrt_rows * config.tolerance +
        config.tolerance * std::max(std::sqrt(scale_ka2), std::sqrt(scale_y2));
    const double eps_dual = sqrt_n * config.tolerance + config.tolerance * rho * std::sqrt(u2);

    if (primal <= eps_pri && dual <= eps_dual) {
      rep.converged = true;
      ++it;
      break;
    }

    if (primal < best_primal * 0.99) {
      best_primal = primal;
      stall = 0;
    } else if (++stall >= 1000 && primal > 10.0 * eps_pri) {
      rep.infeasible = true;
      ++it;
      break;
    }

    if (config.adapt_penalty && (it + 1) % 25 == 0) {
      if (primal > 10.0 * dual && rho < 1e8) {
        rho *= 2.0;
        uw *= 0.5;
        for (auto& u : uy) u *= 0.5;
      } else if (dual > 10.0 * primal && rho > 1e-8) {
        rho *= 0.5;
        uw *= 2.0;
        for (auto& u : uy) u *= 2.0;
      }
    }
  }

  rep.iterations = it;
  rep.solution = a;
  rep.objective = vector_norm(a, r);
  for (const auto& b : blocks)
    rep.constraint_residuals.push_back(vector_norm(Vector(b.z - b.phi * a), q));
  return rep;
}

/// Relaxed constraint-satisfaction tolerance used for feasibility checks on
/// finite-precision iterates.
inline double relaxed_bound(double radius) { return radius * (1.0 + 1e-6) + 1e-9; }

}  // namespace sobid
