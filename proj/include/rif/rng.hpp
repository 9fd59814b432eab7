#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rif {

/// SplitMix64 stream. Every random draw in the library goes through this so
/// outputs are bit-reproducible from a seed.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1): the top 53 bits of the next output times 2^-53.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double low, double high) { return low + (high - low) * uniform(); }

  /// Standard normal from two consecutive uniforms (Box-Muller, cosine branch).
  double gaussian() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform integer in [0, bound) via floor(uniform() * bound).
  std::uint64_t below(std::uint64_t bound) {
    const auto v = static_cast<std::uint64_t>(uniform() * static_cast<double>(bound));
    return v < bound ? v : bound - 1;
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

/// Seed of the independent stream for item `index` under `base_seed`.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) {
  RngStream mixer(base_seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
  return mixer.next_u64();
}

}  // namespace rif
