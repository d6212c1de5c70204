#include <gtest/gtest.h>

#include <set>

#include "surropt/rng.hpp"

namespace surropt {
namespace {

TEST(Rng, DeriveSeedSeparatesStreamsAndIndices) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t stream = 1; stream <= 6; ++stream)
    for (std::uint64_t index = 0; index < 100; ++index) seen.insert(derive_seed(42, stream, index));
  EXPECT_EQ(seen.size(), 600u);
  EXPECT_EQ(derive_seed(42, Stream::kGbdt, 3), derive_seed(42, 6, 3));
  EXPECT_NE(derive_seed(42, 1, 0), derive_seed(43, 1, 0));
}

TEST(Rng, Uniform01InUnitInterval) {
  Rng rng = make_rng(1);
  double sum = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const double u = uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000.0, 0.5, 0.01);
}

TEST(Rng, UniformBelowCoversRangeEvenly) {
  Rng rng = make_rng(2);
  std::vector<int> counts(7, 0);
  for (int k = 0; k < 70000; ++k) ++counts[uniform_below(rng, 7)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
  EXPECT_EQ(uniform_below(rng, 1), 0u);
}

TEST(Rng, SameSeedSameStream) {
  Rng a = make_rng(99), b = make_rng(99);
  for (int k = 0; k < 1000; ++k) ASSERT_EQ(a(), b());
}

TEST(Rng, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

}  // namespace
}  // namespace surropt
