#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace karst {

/// splitmix64 mix step; used to derive independent sub-seeds.
inline std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix_seed(master + 0x632be59bd9b4e019ULL * (index + 1));
}

/// Seeded pseudo-random stream. Identical seed replays the identical
/// sequence. Distributions are generated from raw mt19937_64 output
/// instead of <random> distribution objects, whose output is
/// implementation-defined and differs across standard libraries.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(mix_seed(seed)) {}

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (cosine branch only).
  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t index_below(std::uint64_t n) { return engine_() % n; }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace karst
