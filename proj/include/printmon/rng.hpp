#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace printmon {

// splitmix64 (Vigna). Used to expand seeds and to derive substream seeds.
struct SplitMix64 {
  std::uint64_t state;

  constexpr explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  constexpr std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

/// xoshiro256** with splitmix64 seeding. All simulator randomness flows
/// through this generator so that (spec, seed) pairs reproduce bit-exactly.
///
/// Substream rule: substream k of seed s is seeded from
/// splitmix64(s XOR (k+1)*0x9E3779B97F4A7C15).next(); each simulated channel
/// draws from its own substream so channels can be rendered in any order.
class Xoshiro256 {
public:
  explicit Xoshiro256(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : state_) word = sm.next();
  }

  static Xoshiro256 substream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 sm(seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
    return Xoshiro256(sm.next());
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double next_range(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  /// Standard normal via Box-Muller (polar-free variant): both values of each
  /// pair are consumed, the sine branch is cached and returned on the next call.
  double next_gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = next_unit();
    if (u1 <= 0.0) u1 = 0x1.0p-53;  // log(0) guard
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace printmon
