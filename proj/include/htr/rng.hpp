#pragma once

#include <cstdint>

namespace htr {

// splitmix64. Fully specified here so seeded output is identical across
// platforms and standard libraries (std:: distributions are not).
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform draw from [0, bound) via rejection, no modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }
};

// Stable per-row seed derivation for sweeps.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a,
                              std::uint64_t b) {
  SplitMix64 rng(seed ^ (a * 0xD6E8FEB86659FD93ull) ^
                 (b * 0xCA5A826395121157ull));
  return rng.next();
}

}  // namespace htr
