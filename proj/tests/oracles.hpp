// Test-only reference computations, independent of the library's solve
// paths: brute-force grid minimization, polyhedron vertex enumeration,
// finite differences and explicit normal-equation solves.
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace oracles {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline double central_difference(const std::function<double(double)>& f, double x, double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Dense grid minimization over a box, exhaustive at the given resolution.
inline double grid_search_min(const std::function<double(const Vector&)>& objective, int dim,
                              double lo, double hi, double resolution) {
  const int steps = static_cast<int>(std::llround((hi - lo) / resolution));
  double best = std::numeric_limits<double>::infinity();
  Vector x(dim);
  std::vector<int> idx(dim, 0);
  while (true) {
    for (int i = 0; i < dim; ++i) x[i] = lo + idx[i] * resolution;
    best = std::min(best, objective(x));
    int i = dim - 1;
    while (i >= 0 && ++idx[i] > steps) idx[i--] = 0;
    if (i < 0) break;
  }
  return best;
}

/// Coarse-to-fine grid minimization for convex objectives in up to 3 dims.
inline double zoom_grid_min(const std::function<double(const Vector&)>& objective, int dim,
                            double lo, double hi, int points_per_dim = 41, int rounds = 10) {
  Vector center = Vector::Constant(dim, 0.5 * (lo + hi));
  double half = 0.5 * (hi - lo);
  double best = std::numeric_limits<double>::infinity();
  Vector x(dim);
  for (int round = 0; round < rounds; ++round) {
    Vector best_x = center;
    std::vector<int> idx(dim, 0);
    while (true) {
      for (int i = 0; i < dim; ++i)
        x[i] = center[i] - half + 2.0 * half * idx[i] / (points_per_dim - 1);
      const double v = objective(x);
      if (v < best) {
        best = v;
        best_x = x;
      }
      int i = dim - 1;
      while (i >= 0 && ++idx[i] == points_per_dim) idx[i--] = 0;
      if (i < 0) break;
    }
    center = best_x;
    half *= 4.0 / (points_per_dim - 1);  // keep a margin of several old cells
  }
  return best;
}

/// Constraints of the polyhedron {a : |z_i - Phi_i a|_inf <= mu_i} as rows
/// (c, d) with c.a <= d.
struct LinfPolyhedron {
  Matrix c;
  Vector d;

  bool feasible(const Vector& a, double tol = 1e-9) const {
    return ((c * a - d).array() <= tol).all();
  }
};

inline LinfPolyhedron linf_polyhedron(const std::vector<std::pair<Matrix, Vector>>& blocks,
                                      const std::vector<double>& radii) {
  Eigen::Index rows = 0;
  for (const auto& [phi, z] : blocks) rows += 2 * phi.rows();
  LinfPolyhedron p;
  p.c = Matrix(rows, blocks.front().first.cols());
  p.d = Vector(rows);
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& [phi, z] = blocks[i];
    for (Eigen::Index r = 0; r < phi.rows(); ++r) {
      p.c.row(at) = phi.row(r);
      p.d[at++] = z[r] + radii[i];
      p.c.row(at) = -phi.row(r);
      p.d[at++] = -(z[r] - radii[i]);
    }
  }
  return p;
}

/// Minimum of |a|_1 over an l_inf-constraint polyhedron by enumerating
/// candidate points where N hyperplanes (constraint faces or coordinate
/// planes) intersect. Returns the best objective and argmin.
inline std::pair<double, Vector> min_l1_vertex_enumeration(const LinfPolyhedron& p) {
  const int n = static_cast<int>(p.c.cols());
  const Eigen::Index m = p.c.rows();
  // hyperplane list: all faces plus the coordinate planes a_j = 0
  std::vector<std::pair<Vector, double>> planes;
  for (Eigen::Index r = 0; r < m; ++r) planes.push_back({p.c.row(r).transpose(), p.d[r]});
  for (int j = 0; j < n; ++j) {
    Vector e = Vector::Zero(n);
    e[j] = 1.0;
    planes.push_back({e, 0.0});
  }

  double best = std::numeric_limits<double>::infinity();
  Vector best_a = Vector::Zero(n);
  std::vector<int> pick(n, 0);
  const int total = static_cast<int>(planes.size());

  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      Matrix A(n, n);
      Vector b(n);
      for (int i = 0; i < n; ++i) {
        A.row(i) = planes[pick[i]].first.transpose();
        b[i] = planes[pick[i]].second;
      }
      const Eigen::FullPivLU<Matrix> lu(A);
      if (!lu.isInvertible()) return;
      const Vector a = lu.solve(b);
      if (!p.feasible(a)) return;
      const double v = a.lpNorm<1>();
      if (v < best) {
        best = v;
        best_a = a;
      }
      return;
    }
    for (int i = start; i < total; ++i) {
      pick[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return {best, best_a};
}

/// Minimum of |a|_2 over an l_inf-constraint polyhedron: enumerate active
/// sets, take the min-norm point of each active affine subspace, keep the
/// feasible ones.
inline std::pair<double, Vector> min_l2_vertex_enumeration(const LinfPolyhedron& p) {
  const int n = static_cast<int>(p.c.cols());
  const Eigen::Index m = p.c.rows();
  double best = std::numeric_limits<double>::infinity();
  Vector best_a = Vector::Zero(n);

  std::vector<int> pick;
  std::function<void()> rec = [&]() {
    const int k = static_cast<int>(pick.size());
    if (k >= 1) {
      Matrix A(k, n);
      Vector b(k);
      for (int i = 0; i < k; ++i) {
        A.row(i) = p.c.row(pick[i]);
        b[i] = p.d[pick[i]];
      }
      // min |a| s.t. A a = b  ->  a = A^T (A A^T)^{-1} b (when full row rank)
      const Matrix aat = A * A.transpose();
      const Eigen::FullPivLU<Matrix> lu(aat);
      if (lu.isInvertible()) {
        const Vector a = A.transpose() * lu.solve(b);
        if (p.feasible(a)) {
          const double v = a.norm();
          if (v < best) {
            best = v;
            best_a = a;
          }
        }
      }
    }
    if (k == n) return;
    for (int i = (pick.empty() ? 0 : pick.back() + 1); i < m; ++i) {
      pick.push_back(i);
      rec();
      pick.pop_back();
    }
  };
  if (p.feasible(Vector::Zero(n))) return {0.0, Vector::Zero(n)};
  rec();
  return {best, best_a};
}

/// Local gradient by explicit normal equations with a matrix inverse.
inline Vector normal_equations_gradient(const Matrix& phi, const Vector& dz) {
  const Matrix g = phi.transpose() * phi;
  return g.inverse() * (phi.transpose() * dz);
}

}  // namespace oracles
