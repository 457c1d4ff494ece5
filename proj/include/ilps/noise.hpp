#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace ilps {

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).  Stateless: the output is
/// a pure function of (counter, key).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter apply(Counter c, Key k) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        k[0] += kWeyl0;
        k[1] += kWeyl1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
  }
};

/// Maps two 32-bit words to a double in the open interval (0, 1).
inline double open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 12;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
}

/// Standard normal variates keyed by (seed, step, particle, component).
///
/// Components 2k and 2k+1 share one Philox block (counter = {k, particle,
/// step_lo, step_hi}, key = seed) and are the Box-Muller pair built from it.
/// The same key always yields the same variate regardless of call order.
class NoiseStream {
 public:
  /// Step index reserved for drawing initial ensembles.
  static constexpr std::uint64_t kInitStep = std::numeric_limits<std::uint64_t>::max();

  explicit NoiseStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  double normal(std::uint64_t step, std::uint64_t particle, std::uint64_t component) const {
    const auto out = Philox4x32::apply(
        {static_cast<std::uint32_t>(component / 2), static_cast<std::uint32_t>(particle),
         static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32)},
        {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
    const double u1 = open_unit(out[0], out[1]);
    const double u2 = open_unit(out[2], out[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return (component % 2 == 0) ? r * std::cos(theta) : r * std::sin(theta);
  }

 private:
  std::uint64_t seed_;
};

/// Noise source that always returns 0; turns em_step into explicit Euler on the drift.
struct ZeroNoise {
  double normal(std::uint64_t, std::uint64_t, std::uint64_t) const { return 0.0; }
};

/// SplitMix64 finalizer, used to derive independent seeds from one user seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace ilps
