#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sobid/types.hpp"

namespace sobid {

enum class BasisFamily { monomial, gaussian, sinusoid };

inline std::string to_string(BasisFamily f) {
  switch (f) {
    case BasisFamily::monomial: return "monomial";
    case BasisFamily::gaussian: return "gaussian";
    case BasisFamily::sinusoid: return "sinusoid";
  }
  return "?";
}

inline BasisFamily basis_family_from_string(const std::string& s) {
  if (s == "monomial") return BasisFamily::monomial;
  if (s == "gaussian") return BasisFamily::gaussian;
  if (s == "sinusoid") return BasisFamily::sinusoid;
  throw ConfigError("unknown basis family '" + s + "'");
}

namespace detail {
inline double ipow(double x, int e) {
  double p = 1.0;
  for (int i = 0; i < e; ++i) p *= x;
  return p;
}
}  // namespace detail

/// One basis function, described by a family tag and a parameter vector:
///   monomial:  params = integer exponents, one per input variable
///   gaussian:  params = (center_1..center_n, width); exp(-|x-c|^2 / (2 w^2))
///   sinusoid:  params = (freq_1..freq_n, phase);     sin(f.x + phase)
/// Each family carries an exact analytic rule for every first partial
/// derivative.
struct BasisFunction {
  BasisFamily family = BasisFamily::monomial;
  Vector params;

  int input_dim() const {
    const int n = static_cast<int>(params.size());
    return family == BasisFamily::monomial ? n : n - 1;
  }

  double value(const Vector& x) const {
    switch (family) {
      case BasisFamily::monomial: {
        double p = 1.0;
        for (Index i = 0; i < x.size(); ++i) p *= detail::ipow(x[i], static_cast<int>(params[i]));
        return p;
      }
      case BasisFamily::gaussian: {
        const Index n = x.size();
        const double w = params[n];
        const double d2 = (x - params.head(n)).squaredNorm();
        return std::exp(-0.5 * d2 / (w * w));
      }
      case BasisFamily::sinusoid: {
        const Index n = x.size();
        return std::sin(params.head(n).dot(x) + params[n]);
      }
    }
    return 0.0;
  }

  /// Partial derivative with respect to variable i (1-based).
  double derivative(const Vector& x, int i) const {
    const Index v = i - 1;
    switch (family) {
      case BasisFamily::monomial: {
        const int e = static_cast<int>(params[v]);
        if (e == 0) return 0.0;
        double p = e * detail::ipow(x[v], e - 1);
        for (Index j = 0; j < x.size(); ++j)
          if (j != v) p *= detail::ipow(x[j], static_cast<int>(params[j]));
        return p;
      }
      case BasisFamily::gaussian: {
        const Index n = x.size();
        const double w = params[n];
        return -(x[v] - params[v]) / (w * w) * value(x);
      }
      case BasisFamily::sinusoid: {
        const Index n = x.size();
        return params[v] * std::cos(params.head(n).dot(x) + params[n]);
      }
    }
    return 0.0;
  }
};

/// Fixed, ordered collection of basis functions over a common input
/// dimension. Immutable after construction; evaluation is pure.
class BasisSet {
 public:
  BasisSet(int n_x, std::vector<BasisFunction> functions)
      : n_x_(n_x), functions_(std::move(functions)) {
    require(n_x_ >= 1, "BasisSet: input dimension must be >= 1");
    require(!functions_.empty(), "BasisSet: at least one basis function required");
    for (const auto& f : functions_)
      require(f.input_dim() == n_x_, "BasisSet: member with mismatched input dimension");
  }

  int input_dim() const { return n_x_; }
  int size() const { return static_cast<int>(functions_.size()); }
  const std::vector<BasisFunction>& functions() const { return functions_; }

  /// Values of all members at x, in set order.
  Vector eval(const Vector& x) const {
    check_point(x);
    Vector out(size());
    for (int j = 0; j < size(); ++j) out[j] = functions_[j].value(x);
    return out;
  }

  /// Partial derivatives of all members with respect to variable i (1-based).
  Vector eval_derivative(const Vector& x, int i) const {
    check_point(x);
    require(i >= 1 && i <= n_x_, "BasisSet: derivative index out of range");
    Vector out(size());
    for (int j = 0; j < size(); ++j) out[j] = functions_[j].derivative(x, i);
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json fns = nlohmann::json::array();
    for (const auto& f : functions_) {
      std::vector<double> p(f.params.begin(), f.params.end());
      fns.push_back({{"family", to_string(f.family)}, {"params", p}});
    }
    return {{"n_x", n_x_}, {"functions", fns}};
  }

  static BasisSet from_json(const nlohmann::json& j) {
    std::vector<BasisFunction> fns;
    for (const auto& jf : j.at("functions")) {
      BasisFunction f;
      f.family = basis_family_from_string(jf.at("family").get<std::string>());
      const auto p = jf.at("params").get<std::vector<double>>();
      f.params = Eigen::Map<const Vector>(p.data(), static_cast<Index>(p.size()));
      fns.push_back(std::move(f));
    }
    return BasisSet(j.at("n_x").get<int>(), std::move(fns));
  }

 private:
  void check_point(const Vector& x) const {
    require(x.size() == n_x_, "BasisSet: point dimension mismatch");
    require_finite(x, "BasisSet: input point");
  }

  int n_x_;
  std::vector<BasisFunction> functions_;
};

/// Full tensor product of monomials with per-variable exponent bounds,
/// in lexicographic exponent order (first variable most significant).
inline BasisSet monomial_basis(int n_x, const std::vector<int>& max_degree) {
  require(n_x >= 1, "monomial_basis: n_x must be >= 1");
  require(static_cast<int>(max_degree.size()) == n_x, "monomial_basis: one exponent bound per variable");
  for (int d : max_degree) require(d >= 0, "monomial_basis: exponent bounds must be >= 0");

  std::vector<BasisFunction> fns;
  std::vector<int> e(n_x, 0);
  while (true) {
    BasisFunction f;
    f.family = BasisFamily::monomial;
    f.params = Vector(n_x);
    for (int i = 0; i < n_x; ++i) f.params[i] = e[i];
    fns.push_back(std::move(f));
    // odometer: last variable fastest, so the sequence is lexicographic
    int i = n_x - 1;
    while (i >= 0 && e[i] == max_degree[i]) e[i--] = 0;
    if (i < 0) break;
    ++e[i];
  }
  return BasisSet(n_x, std::move(fns));
}

/// Same exponent bound for every variable.
inline BasisSet monomial_basis(int n_x, int max_degree) {
  return monomial_basis(n_x, std::vector<int>(static_cast<std::size_t>(n_x), max_degree));
}

}  // namespace sobid
