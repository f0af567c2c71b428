#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "setix/oracle.hpp"
#include "setix/packed_sets.hpp"

using namespace setix;

namespace {

constexpr SetId A{1}, B{2}, C{3};

std::vector<ElementKey> sorted(std::vector<ElementKey> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST(PackedFamily, BucketCountFollowsCapacity) {
    // ceil(d * log2(w) / w), at least one
    for (std::size_t d : {1u, 10u, 16u, 128u, 512u, 1000u}) {
        const std::size_t expect = std::max<std::size_t>(1, (d * 6 + 63) / 64);
        EXPECT_EQ(PackedFamily::bucket_count_for(d), expect);
    }
    EXPECT_EQ(PackedFamily::bucket_count_for(512), 48u);
    EXPECT_EQ(PackedFamily32::bucket_count_for(512), 80u);
}

TEST(PackedFamily, ZeroCapIsAUsageError) { EXPECT_THROW(PackedFamily(0, 1), UsageError); }

TEST(PackedFamily, BasicMembership) {
    PackedFamily f(16, 7);
    f.insert(A, 10);
    f.insert(A, 11);
    EXPECT_TRUE(f.contains(A, 10));
    EXPECT_FALSE(f.contains(A, 12));
    EXPECT_EQ(f.size(A), 2u);
    EXPECT_THROW(f.insert(A, 10), DuplicateError);
    f.erase(A, 10);
    EXPECT_FALSE(f.contains(A, 10));
    EXPECT_THROW(f.erase(A, 10), NotFoundError);
    EXPECT_THROW(f.size(C), NotFoundError);
    EXPECT_THROW(f.intersect_report(A, C), NotFoundError);
}

TEST(PackedFamily, CapIsAStrictBound) {
    PackedFamily f(4, 1);
    f.insert(A, 1);
    f.insert(A, 2);
    f.insert(A, 3);
    EXPECT_THROW(f.insert(A, 4), CapacityError);
    EXPECT_EQ(f.size(A), 3u);
}

TEST(PackedFamily, EmptyAndSelfIntersections) {
    PackedFamily f(16, 2);
    f.add_set(A);
    f.insert(B, 5);
    EXPECT_TRUE(f.intersect_report(A, B).empty());
    EXPECT_FALSE(f.intersect_witness(A, B));
    f.insert(A, 5);
    f.insert(A, 6);
    EXPECT_EQ(sorted(f.intersect_report(A, A)), (std::vector<ElementKey>{5, 6}));
    EXPECT_EQ(f.intersect_witness(A, B), 5u);
}

TEST(PackedFamily, FingerprintListsMirrorChains) {
    PackedFamily f(128, 3);
    for (ElementKey e = 0; e < 100; ++e) f.insert(A, e * 7919);
    std::size_t total = 0;
    for (const auto &b : f.buckets(A)) {
        std::size_t chained = 0;
        for (const auto &[fp, chain] : b.members) chained += chain.size();
        EXPECT_EQ(b.fingerprints.size(), chained);
        total += chained;
    }
    EXPECT_EQ(total, 100u);
    EXPECT_EQ(sorted(f.elements(A)).size(), 100u);
}

template <class Family>
void random_against_oracle(std::uint64_t seed, std::size_t d, ElementKey universe) {
    std::mt19937_64 rng(seed);
    Family f(d, rng());
    OracleFamily o;
    for (SetId s : {A, B, C}) {
        f.add_set(s);
        o.add_set(s);
    }
    for (int step = 0; step < 2000; ++step) {
        const SetId s{1 + rng() % 3};
        const ElementKey e = rng() % universe;
        if (o.contains(s, e)) {
            f.erase(s, e);
            o.erase(s, e);
        } else if (o.size(s) + 1 < d) {
            f.insert(s, e);
            o.insert(s, e);
        }
        if (step % 10 != 0) continue;
        const SetId x{1 + rng() % 3}, y{1 + rng() % 3};
        const auto expect = o.intersect(x, y);
        ASSERT_EQ(sorted(f.intersect_report(x, y)), expect);
        const auto w = f.intersect_witness(x, y);
        ASSERT_EQ(w.has_value(), !expect.empty());
        if (w) ASSERT_TRUE(std::binary_search(expect.begin(), expect.end(), *w));
    }
}

TEST(PackedFamily, RandomScheduleMatchesOracle) {
    random_against_oracle<PackedFamily>(1, 16, 40);
    random_against_oracle<PackedFamily>(2, 128, 300);
    random_against_oracle<PackedFamily>(3, 512, 1200);
}

TEST(PackedFamily, NarrowLayoutMatchesOracle) {
    random_against_oracle<PackedFamily32>(4, 128, 300);
    random_against_oracle<PackedFamily32>(5, 512, 1200);
}

TEST(PackedFamily, FalsePositivesAreFilteredNotReported) {
    // 1024 fingerprints and hundreds of scattered keys per bucket guarantee collisions
    PackedFamily32 f(2000, 9);
    std::mt19937_64 rng(9);
    std::set<ElementKey> a, b;
    while (a.size() < 1500) a.insert(rng());
    while (b.size() < 1500) b.insert(rng());
    for (auto e : a) f.insert(A, e);
    for (auto e : b) f.insert(B, e);
    CounterScope scope;
    EXPECT_TRUE(f.intersect_report(A, B).empty());
    EXPECT_GT(scope.delta().false_positives, 0u);
    EXPECT_EQ(scope.delta().fingerprint_hits, scope.delta().false_positives);
}

TEST(PackedFamily, SharedFingerprintSurvivesPartialErase) {
    PackedFamily32 f(2000, 11);
    // find two keys in the same bucket with the same fingerprint; random keys,
    // since multiply-shift keeps nearby keys apart
    ElementKey x = 0, y = 0;
    bool found = false;
    std::mt19937_64 rng(11);
    std::map<std::pair<std::size_t, std::uint64_t>, ElementKey> seen;
    for (int i = 0; i < 200000 && !found; ++i) {
        const ElementKey k = rng() >> 20;
        auto [it, fresh] = seen.try_emplace({f.bucket_of(k), f.fingerprint_of(k)}, k);
        if (!fresh && it->second != k) x = it->second, y = k, found = true;
    }
    ASSERT_TRUE(found);
    f.insert(A, x);
    f.insert(A, y);
    f.insert(B, y);
    EXPECT_EQ(f.intersect_report(A, B), (std::vector<ElementKey>{y}));
    f.erase(A, x);
    EXPECT_EQ(f.intersect_report(A, B), (std::vector<ElementKey>{y}));
    f.erase(A, y);
    EXPECT_TRUE(f.intersect_report(A, B).empty());
}

TEST(PackedFamily, EarlyStop) {
    PackedFamily f(64, 4);
    for (ElementKey e = 0; e < 40; ++e) {
        f.insert(A, e);
        f.insert(B, e);
    }
    int seen = 0;
    const bool finished = f.for_each_common(A, B, [&](ElementKey) { return ++seen < 3; });
    EXPECT_FALSE(finished);
    EXPECT_EQ(seen, 3);
}
