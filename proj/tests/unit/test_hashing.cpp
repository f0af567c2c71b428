#include <cstdlib>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "setix/errors.hpp"
#include "setix/hashing.hpp"

using namespace setix;

TEST(SeedStream, SameSeedSameSequence) {
    SeedStream a(99), b(99), c(100);
    for (int i = 0; i < 10; ++i) {
        const auto x = a.next();
        EXPECT_EQ(x, b.next());
        EXPECT_NE(x, c.next());
    }
}

TEST(ResolveSeed, FlagBeatsEnvironment) {
    ::setenv("SETIX_SEED", "1234", 1);
    EXPECT_EQ(resolve_seed(7), 7u);
    EXPECT_EQ(resolve_seed(), 1234u);
    ::setenv("SETIX_SEED", "0x10", 1);
    EXPECT_EQ(resolve_seed(), 16u);
    ::setenv("SETIX_SEED", "12abc", 1);
    EXPECT_THROW(resolve_seed(), UsageError);
    ::unsetenv("SETIX_SEED");
}

TEST(BucketHash, StaysInRange) {
    SeedStream seeds(3);
    BucketHash h(48, seeds);
    EXPECT_EQ(h.num_buckets(), 48u);
    for (ElementKey x = 0; x < 10000; ++x) ASSERT_LT(h(x), 48u);
    EXPECT_THROW(BucketHash(0, seeds), UsageError);
}

TEST(BucketHash, RoughlyUniform) {
    SeedStream seeds(4);
    BucketHash h(16, seeds);
    std::vector<int> load(16, 0);
    std::mt19937_64 rng(1);
    constexpr int kKeys = 160000;
    for (int i = 0; i < kKeys; ++i) ++load[h(rng())];
    double chi2 = 0;
    for (int l : load) chi2 += (l - kKeys / 16.0) * (l - kKeys / 16.0) / (kKeys / 16.0);
    EXPECT_LT(chi2, 45.0);  // 15 degrees of freedom; p ~ 1e-4
}

TEST(FingerprintHash, RangeIsWordSquared) {
    SeedStream seeds(5);
    FingerprintHash f(12, seeds);
    EXPECT_EQ(f.range(), 4096u);
    for (ElementKey x = 0; x < 10000; ++x) ASSERT_LT(f(x), 4096u);
    EXPECT_THROW(FingerprintHash(0, seeds), UsageError);
}

TEST(FingerprintHash, PairCollisionRateNearOneOverRange) {
    // over random functions, a fixed pair collides with probability about 1/4096
    int collisions = 0;
    constexpr int kFunctions = 200000;
    for (int i = 0; i < kFunctions; ++i) {
        SeedStream seeds(static_cast<std::uint64_t>(i));
        FingerprintHash f(12, seeds);
        collisions += f(12345) == f(987654321) ? 1 : 0;
    }
    EXPECT_LT(collisions, 2 * kFunctions / 4096);
}
