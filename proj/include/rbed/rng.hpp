#pragma once

#include <bit>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace rbed {

/// splitmix64 step. Used only to expand a 64-bit seed into generator state.
constexpr std::uint64_t splitmix64(std::uint64_t& x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// xoshiro256** seeded through splitmix64.
///
/// One instance per run. The harness threads the same generator through
/// environment resets, exploration draws and argmax tie-breaks, so a run is
/// a pure function of its seed. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Rng(std::uint64_t seed) noexcept {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type next_u64() noexcept {
    const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
  }

  constexpr result_type operator()() noexcept { return next_u64(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  constexpr double next_f64() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on {0, ..., n-1}. Rejection sampling keeps it unbiased.
  std::uint64_t next_int_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("next_int_below: n must be >= 1");
    // 2^64 mod n; draws below this value would over-represent small residues.
    const std::uint64_t floor = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= floor) return r % n;
    }
  }

  friend constexpr bool operator==(const Rng&, const Rng&) = default;

 private:
  std::uint64_t s_[4]{};
};

inline Rng seed_rng(std::uint64_t seed) noexcept { return Rng{seed}; }

}  // namespace rbed
