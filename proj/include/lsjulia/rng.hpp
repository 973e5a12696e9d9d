#pragma once
#include <cmath>
#include <complex>
#include <cstdint>

namespace lsjulia {

// Counter-based generator: state = splitmix64 walk seeded by (seed, stream).
// Each (seed, stream) pair is an independent substream, so work items can be
// assigned stream = item index and produce identical draws under any thread
// schedule. Gaussian variates use explicit Box-Muller (std::normal_distribution
// is implementation-defined and would break cross-platform reproducibility).
class Rng {
 public:
  Rng(uint64_t seed, uint64_t stream) : state_(mix(mix(seed) ^ mix(stream ^ 0x9e3779b97f4a7c15ull))) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // Uniform in [0, 1).
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  uint64_t below(uint64_t n) { return next_u64() % n; }

  // Standard normal via Box-Muller; one fresh pair per call keeps the draw
  // count per variate fixed (no cached spare, no data-dependent consumption).
  double gaussian() {
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0x1.0p-60) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  std::complex<double> gaussian_complex() {
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0x1.0p-60) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586477 * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

  // Uniform in the closed unit disk (area measure).
  std::complex<double> unit_disk() {
    double r = std::sqrt(uniform());
    double a = 6.283185307179586477 * uniform();
    return {r * std::cos(a), r * std::sin(a)};
  }

 private:
  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  uint64_t state_;
};

}  // namespace lsjulia
