#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

#include "edmdr/matrix.hpp"

namespace edmdr {

/// Seeded source of uniform doubles. mt19937_64 is fully specified by the
/// standard; the [0, 1) mapping is done here so streams are identical across
/// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Approximately standard normal (Box-Muller on the uniform stream).
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Symmetric hollow matrix with i.i.d. U[0, scale] entries above the diagonal.
inline Matrix random_hollow_symmetric(std::size_t m, double scale, Rng& rng) {
  Matrix x(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const double v = rng.uniform(0.0, scale);
      x(i, j) = v;
      x(j, i) = v;
    }
  return x;
}

}  // namespace edmdr
