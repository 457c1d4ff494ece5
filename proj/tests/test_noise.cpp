#include <cmath>

#include <gtest/gtest.h>

#include "ilps/noise.hpp"

using namespace ilps;

// Known-answer vectors for Philox4x32-10 from the Random123 distribution.
TEST(Philox, KnownAnswers) {
  EXPECT_EQ(Philox4x32::apply({0, 0, 0, 0}, {0, 0}),
            (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(Philox4x32::apply({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
            (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(Philox4x32::apply({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
            (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(OpenUnit, StaysInsideOpenInterval) {
  EXPECT_GT(open_unit(0, 0), 0.0);
  EXPECT_LT(open_unit(0xffffffffu, 0xffffffffu), 1.0);
}

TEST(NoiseStreamType, SameKeySameVariate) {
  const NoiseStream a(42), b(42);
  EXPECT_EQ(a.normal(7, 3, 1), b.normal(7, 3, 1));
  // Evaluation order does not matter.
  const double later = a.normal(1000, 0, 0);
  (void)a.normal(5, 5, 5);
  EXPECT_EQ(a.normal(1000, 0, 0), later);
}

TEST(NoiseStreamType, DifferentKeysDiffer) {
  const NoiseStream a(42), b(43);
  EXPECT_NE(a.normal(0, 0, 0), b.normal(0, 0, 0));
  EXPECT_NE(a.normal(0, 0, 0), a.normal(1, 0, 0));
  EXPECT_NE(a.normal(0, 0, 0), a.normal(0, 1, 0));
  EXPECT_NE(a.normal(0, 0, 0), a.normal(0, 0, 1));
  EXPECT_NE(a.normal(1ull << 32, 0, 0), a.normal(0, 0, 0));
}

TEST(NoiseStreamType, StandardNormalMoments) {
  const NoiseStream s(2024);
  const int n = 200000;
  double sum = 0.0, sq = 0.0, quart = 0.0, lag = 0.0;
  double prev = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal(static_cast<std::uint64_t>(i / 4), 0, static_cast<std::uint64_t>(i % 4));
    sum += z;
    sq += z * z;
    quart += z * z * z * z;
    lag += z * prev;
    prev = z;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  EXPECT_LT(std::abs(mean), 5.0 / std::sqrt(n));
  EXPECT_LT(std::abs(var - 1.0), 5.0 * std::sqrt(2.0 / n));
  EXPECT_LT(std::abs(quart / n - 3.0), 5.0 * std::sqrt(96.0 / n));
  // Consecutive variates include the Box-Muller pairs; they must be uncorrelated.
  EXPECT_LT(std::abs(lag / n), 5.0 / std::sqrt(n));
}

TEST(NoiseStreamType, ZeroNoiseIsZero) { EXPECT_EQ(ZeroNoise{}.normal(1, 2, 3), 0.0); }

TEST(MixSeed, Spreads) {
  EXPECT_NE(mix_seed(0), mix_seed(1));
  EXPECT_NE(mix_seed(1), 1u);
}
