#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "socert/linalg.hpp"

namespace socert {

// Portable sampler: the engine output of mt19937_64 is fixed by the
// standard, and the conversions below avoid the implementation-defined
// std:: distributions so sampled points are identical across toolchains.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) : engine_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Vector unit_vector(std::size_t n) {
    for (;;) {
      Vector v(n);
      for (double& x : v) x = normal();
      const double nv = norm2(v);
      if (nv > 1e-12) return scaled(1.0 / nv, v);
    }
  }

  // Uniform in the ball of the given radius.
  Vector in_ball(std::size_t n, double radius) {
    const double r = radius * std::pow(uniform(), 1.0 / static_cast<double>(n));
    return scaled(r, unit_vector(n));
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace socert
