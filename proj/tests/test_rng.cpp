#include "dpaudit/rng.hpp"

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include <gtest/gtest.h>

namespace dpaudit {
namespace {

TEST(Rng, DeterministicForFixedSeed) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(a.next(), b.next());
  }
}

TEST(Rng, DifferentSeedsDiverge) {
  Rng a(1), b(2);
  int equal = 0;
  for (int i = 0; i < 64; ++i) {
    equal += a.next() == b.next();
  }
  EXPECT_LT(equal, 4);
}

TEST(Rng, UniformIntStaysInBounds) {
  Rng rng(7);
  for (std::uint64_t bound : {1ULL, 2ULL, 3ULL, 10ULL, 1000ULL, 1ULL << 40}) {
    for (int i = 0; i < 200; ++i) {
      EXPECT_LT(rng.uniform_int(bound), bound);
    }
  }
}

// Each residue of a small bound should appear with frequency 1/bound. With
// 60000 draws over bound 6, a 4-sigma band around 10000 is [9512, 10488].
TEST(Rng, UniformIntIsUnbiased) {
  Rng rng(11);
  std::vector<int> counts(6, 0);
  for (int i = 0; i < 60000; ++i) {
    ++counts[rng.uniform_int(6)];
  }
  for (int c : counts) {
    EXPECT_GT(c, 9512);
    EXPECT_LT(c, 10488);
  }
}

TEST(Rng, UniformDoubleIsInHalfOpenUnitInterval) {
  Rng rng(3);
  double min = 1, max = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform_double();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    min = std::min(min, u);
    max = std::max(max, u);
  }
  // 1e5 draws should cover the interval reasonably well.
  EXPECT_LT(min, 0.001);
  EXPECT_GT(max, 0.999);
}

// P(laplace_int == 0) = 1 - e^{-eps}. At eps = 1 that is 0.632; a 4-sigma
// band around 63212 of 1e5 draws is [62602, 63822].
TEST(Rng, LaplaceIntZeroMass) {
  Rng rng(13);
  int zeros = 0;
  for (int i = 0; i < 100000; ++i) {
    zeros += rng.laplace_int(1.0) == 0;
  }
  EXPECT_GT(zeros, 62602);
  EXPECT_LT(zeros, 63822);
}

// Symmetry: positive and negative draws are exchangeable. The sign count
// among nonzero draws is Binomial(k, 1/2).
TEST(Rng, LaplaceIntIsSymmetric) {
  Rng rng(17);
  int pos = 0, neg = 0;
  for (int i = 0; i < 100000; ++i) {
    const long long l = rng.laplace_int(0.5);
    pos += l > 0;
    neg += l < 0;
  }
  const double n = pos + neg;
  const double z = (pos - n / 2) / std::sqrt(n / 4);
  EXPECT_LT(std::abs(z), 4.0);
}

TEST(Rng, DeriveIsStableAndLabelSensitive) {
  const std::uint64_t base = Rng::derive(99, {1, 2, 3});
  EXPECT_EQ(base, Rng::derive(99, {1, 2, 3}));
  EXPECT_NE(base, Rng::derive(99, {1, 2, 4}));
  EXPECT_NE(base, Rng::derive(99, {1, 2}));
  EXPECT_NE(base, Rng::derive(98, {1, 2, 3}));
}

// Streams derived with distinct labels should look mutually independent:
// no collisions across a batch of derived seeds.
TEST(Rng, DeriveProducesDistinctStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    seen.insert(Rng::derive(4242, {i}));
    seen.insert(Rng::derive(i, {4242}));
  }
  EXPECT_EQ(seen.size(), 2000u);
}

}  // namespace
}  // namespace dpaudit
