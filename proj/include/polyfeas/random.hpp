#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "polyfeas/numerics.hpp"

namespace polyfeas {

/// Seeded 64-bit generator. The conversions to doubles are written out here
/// so sequences are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo, double hi) {
    Matrix M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = uniform(lo, hi);
    }
    return M;
  }

  Vector unit_vector(Eigen::Index dim) {
    Vector v(dim);
    do {
      for (Eigen::Index i = 0; i < dim; ++i) v(i) = normal();
    } while (v.norm() < 1e-12);
    return v.normalized();
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

}  // namespace polyfeas
