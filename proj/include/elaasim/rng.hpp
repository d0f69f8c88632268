// SPDX-License-Identifier: Apache-2.0
//
// Seeded random number generation and deterministic seed derivation.
// Every stochastic operation in the library takes an explicit Rng so that a
// 64-bit seed fully determines the result, independent of worker scheduling.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace elaasim {

/// Uniform/Gaussian/complex-disk sampler over a mt19937_64 stream.
/// The double-producing paths are hand-rolled from raw engine output so the
/// byte-level stream does not depend on the standard library's distribution
/// implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Standard normal via the Marsaglia polar method (pairs cached).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = uniform(-1.0, 1.0);
      v = uniform(-1.0, 1.0);
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  /// Uniform density over the open unit disk { z : |z| < 1 }, by rejection.
  std::complex<double> complex_unit_disk() {
    double re, im;
    do {
      re = uniform(-1.0, 1.0);
      im = uniform(-1.0, 1.0);
    } while (re * re + im * im >= 1.0);
    return {re, im};
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

namespace detail {
// splitmix64 finalizer; full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Deterministic per-trial seed: trial i of axis point j under a master seed.
/// Growing the trial count leaves earlier trials' seeds unchanged.
inline std::uint64_t derive_trial_seed(std::uint64_t master_seed,
                                       std::uint64_t axis_index,
                                       std::uint64_t trial_index) {
  std::uint64_t h = detail::mix64(master_seed);
  h = detail::mix64(h ^ detail::mix64(axis_index + 0x517cc1b727220a95ULL));
  h = detail::mix64(h ^ detail::mix64(trial_index + 0x2545f4914f6cdd1dULL));
  return h;
}

}  // namespace elaasim
