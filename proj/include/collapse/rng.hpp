#pragma once

#include <cstdint>

namespace collapse {

/// splitmix64 (Steele, Lea, Flood 2014): 64-bit state advanced by the golden
/// gamma and scrambled by the variant-13 finalizer. Chosen because child
/// streams are pure functions of (seed, index), which keeps parallel and
/// serial ensemble runs bit-identical.
struct SplitMix64 {
  std::uint64_t state = 0;

  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t next() {
    state += kGamma;
    return mix(state);
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

/// Seed of trajectory `index` under `master_seed`: the (index+1)-th output of
/// a splitmix64 stream seeded with master_seed, computed in O(1).
inline constexpr std::uint64_t child_seed(std::uint64_t master_seed,
                                          std::uint64_t index) {
  return SplitMix64::mix(master_seed + (index + 1) * SplitMix64::kGamma);
}

}  // namespace collapse
