#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "sobid/types.hpp"

namespace sobid {

/// Seeded random source with pinned algorithms: mt19937_64 for bits,
/// a fixed 53-bit mantissa map for uniforms and Box-Muller for normals.
/// std::normal_distribution is implementation-defined, so it is avoided;
/// the same seed reproduces the same stream on any standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal. Consumes two uniforms per pair, caching the second.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log1p(-u1));  // 1-u1 in (0,1]
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double normal(double mean, double std) { return mean + std * normal(); }

  Vector normal_vector(Index n, double std) {
    Vector out(n);
    for (Index i = 0; i < n; ++i) out[i] = std * normal();
    return out;
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Derives independent sub-stream seeds from a base seed (splitmix64 mix).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace sobid
