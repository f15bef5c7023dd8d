#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "kboot/rng.hpp"

using namespace kboot;

namespace {

using Block = std::array<std::uint32_t, 4>;

}  // namespace

// Known-answer vectors for Philox4x32-10 from the Random123 distribution.
TEST(Philox, KnownAnswerZero) {
  const Block out = philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerAllOnes) {
  const Block out = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
  const Block out = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(RngStream, SameKeySameSequence) {
  RngStream a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(RngStream, DistinctKeysDiffer) {
  RngStream a(1), b(2);
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += a.next_u64() == b.next_u64();
  EXPECT_EQ(equal, 0);
}

TEST(RngStream, SubstreamsDependOnlyOnIndex) {
  const RngStream root(7);
  RngStream parent = root;
  for (int i = 0; i < 10; ++i) parent.next_u64();
  // advancing the parent does not move its children
  RngStream a = root.substream(3), b = parent.substream(3);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
  std::set<std::uint64_t> keys;
  for (std::uint64_t i = 0; i < 1000; ++i) keys.insert(root.substream(i).key());
  EXPECT_EQ(keys.size(), 1000u);
}

TEST(RngStream, DeriveKeyIsOrderSensitive) {
  EXPECT_NE(derive_key({1, 2, 3}), derive_key({3, 2, 1}));
  EXPECT_NE(derive_key({1, 2}), derive_key({1, 2, 0}));
  EXPECT_EQ(derive_key(9, 4, StreamRole::Data), derive_key({9, 4, 1}));
}

TEST(RngStream, UniformMomentsAndRange) {
  RngStream rng(11);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum2 += u * u;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sum2 / n - mean * mean, 1.0 / 12.0, 2e-3);
}

TEST(RngStream, UniformIndexCoversRangeEvenly) {
  RngStream rng(5);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[rng.uniform_index(7)];
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 4.0 * std::sqrt(n * (1.0 / 7) * (6.0 / 7)));
}

TEST(RngStream, NormalMoments) {
  RngStream rng(13);
  const int n = 400000;
  double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    m1 += z;
    m2 += z * z;
    m3 += z * z * z;
    m4 += z * z * z * z;
  }
  EXPECT_NEAR(m1 / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(m2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(m3 / n, 0.0, 4.0 * std::sqrt(15.0 / n));
  EXPECT_NEAR(m4 / n, 3.0, 4.0 * std::sqrt(96.0 / n));
}

TEST(RngStream, GammaMeanAndVariance) {
  for (double shape : {0.05, 0.5, 1.0, 3.7}) {
    RngStream rng(derive_key({17, static_cast<std::uint64_t>(shape * 100)}));
    const int n = 200000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
      const double g = rng.gamma(shape);
      ASSERT_GE(g, 0.0);
      s += g;
      s2 += g * g;
    }
    const double mean = s / n;
    EXPECT_NEAR(mean, shape, 4.0 * std::sqrt(shape / n)) << "shape " << shape;
    EXPECT_NEAR(s2 / n - mean * mean, shape, 0.05 * shape + 0.01) << "shape " << shape;
  }
}
