#pragma once

#include <cstdint>
#include <string_view>

namespace freqbias {

// Pinned random number scheme, v1. Every stochastic result in this project is
// a deterministic function of a 64-bit seed through these generators:
//
//   * SplitMix64 (Vigna 2015) expands seeds and derives per-stream seeds.
//   * xoshiro256** 1.0 (Blackman & Vigna 2018) produces all random draws.
//
// The standard-library distributions are deliberately not used: their output
// sequences are unspecified and differ between standard library
// implementations, which would break the bit-reproducibility contract.
// Changing any of these algorithms is a breaking change to recorded seeds.

struct SplitMix64 {
  std::uint64_t state;

  constexpr std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

/// xoshiro256** seeded through SplitMix64.
class Rng {
 public:
  explicit constexpr Rng(std::uint64_t seed) : s_{} {
    SplitMix64 sm{seed};
    for (auto& word : s_) word = sm.next();
  }

  constexpr std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  constexpr double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  constexpr bool bernoulli(double p) { return next_double() < p; }

  /// Unbiased integer in [0, n), n >= 1. Rejection sampling.
  constexpr std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

/// Seed for sub-stream `stream` of a master seed. Injective in `stream` for a
/// fixed master, so replicate i of a run always sees stream seed
/// derive_seed(seed, i) no matter how work is scheduled.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  SplitMix64 sm{master ^ (0x9e3779b97f4a7c15ULL * (stream + 0x632be59bd9b4e019ULL))};
  return sm.next();
}

/// Seed for a named pipeline stage: FNV-1a of the stage name folded into the
/// master seed. Stage names are part of the reproducibility contract.
std::uint64_t stage_seed(std::uint64_t master, std::string_view stage);

}  // namespace freqbias
