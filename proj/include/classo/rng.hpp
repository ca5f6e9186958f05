#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace classo {

/// splitmix64 finalizer; used for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Per-trial seed for Monte Carlo runs: splitmix64 of the master seed xored
/// with the trial index. Trials seeded this way are independent streams and
/// the mapping is part of the reproducibility contract (see README).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
}

/// Deterministic random source. The engine is std::mt19937_64 (bit-exact by
/// the standard) and all variate mappings below are fixed arithmetic on its
/// raw 64-bit output, so streams are reproducible across platforms for a
/// given seed. Distribution classes from <random> are deliberately not used;
/// their output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller; consumes exactly two engine draws per
  /// pair, second value cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1]: keeps log finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Circular complex Gaussian CN(0, var): independent N(0, var/2) real and
  /// imaginary parts, one Box-Muller pair per draw.
  std::complex<double> cnormal(double var) {
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1)) * std::sqrt(var * 0.5);
    const double a = 2.0 * M_PI * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace classo
