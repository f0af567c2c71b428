#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "setix/errors.hpp"
#include "setix/fully_dynamic.hpp"
#include "setix/oracle.hpp"

using namespace setix;

namespace {

constexpr SetId A{1}, B{2};

std::vector<ElementKey> sorted(std::vector<ElementKey> v) {
    std::sort(v.begin(), v.end());
    return v;
}

void expect_agrees(const IntersectionTree &t, const OracleFamily &o, SetId a, SetId b) {
    ASSERT_EQ(sorted(t.report(a, b)), o.intersect(a, b));
    const auto w = t.witness(a, b);
    ASSERT_EQ(w.has_value(), !o.intersect(a, b).empty());
    if (w) {
        ASSERT_TRUE(o.contains(a, *w) && o.contains(b, *w));
    }
}

}  // namespace

TEST(KeyPermutation, IsABijection) {
    for (std::uint64_t n : {1u, 2u, 3u, 17u, 64u, 1000u, 4096u}) {
        KeyPermutation p(n, n * 31);
        std::vector<bool> hit(n);
        for (std::uint64_t x = 0; x < n; ++x) {
            const auto y = p(x);
            ASSERT_LT(y, n);
            ASSERT_FALSE(hit[y]);
            hit[y] = true;
        }
    }
    EXPECT_THROW(KeyPermutation(0, 1), UsageError);
    EXPECT_THROW(KeyPermutation(8, 1)(8), RangeError);
}

TEST(UniverseMap, RefcountsAndExhaustion) {
    UniverseMap u(4, 9);
    const auto k = u.acquire(100);
    EXPECT_EQ(u.acquire(100), k);
    EXPECT_EQ(u.external(k), 100u);
    EXPECT_EQ(u.live(), 1u);
    u.release(100);
    EXPECT_TRUE(u.find(100));
    u.release(100);
    EXPECT_FALSE(u.find(100));
    EXPECT_THROW(u.release(100), NotFoundError);
    u.acquire(1);
    u.acquire(2);
    u.acquire(3);
    EXPECT_TRUE(u.full());  // released keys are not handed out again
    EXPECT_THROW(u.acquire(4), CapacityError);
}

TEST(IntersectionTree, FreshTree) {
    EXPECT_THROW(IntersectionTree(0), UsageError);
    IntersectionTree t(64);
    EXPECT_EQ(t.anchor(), 16u);
    EXPECT_EQ(t.height(), 5u);
    EXPECT_EQ(t.vertex_count(), 0u);
    t.add_set(A);
    t.add_set(B);
    EXPECT_TRUE(t.report(A, B).empty());
    EXPECT_FALSE(t.witness(A, B));
    EXPECT_THROW(t.report(A, SetId{9}), NotFoundError);
}

TEST(IntersectionTree, FirstInsertTouchesOnePath) {
    IntersectionTree t(64);
    t.insert(A, 42);
    EXPECT_EQ(t.vertex_count(), t.height());
    EXPECT_TRUE(t.contains(A, 42));
    EXPECT_THROW(t.insert(A, 42), DuplicateError);
    EXPECT_THROW(t.erase(A, 43), NotFoundError);
    EXPECT_TRUE(t.audit().empty());
}

TEST(IntersectionTree, SharedElementFlipsDisjointness) {
    IntersectionTree t(64);
    t.insert(A, 1);
    t.insert(B, 2);
    EXPECT_FALSE(t.witness(A, B));
    t.insert(B, 1);
    EXPECT_EQ(t.witness(A, B), 1u);
    EXPECT_EQ(t.report(A, B), std::vector<ElementKey>{1});
}

TEST(IntersectionTree, InsertThenDeleteRestoresAnswers) {
    IntersectionTree t(256, 3);
    for (ElementKey x = 0; x < 20; ++x) t.insert(A, x);
    for (ElementKey x = 10; x < 25; ++x) t.insert(B, x);
    const auto before = sorted(t.report(A, B));
    t.insert(A, 22);
    t.erase(A, 22);
    EXPECT_EQ(sorted(t.report(A, B)), before);
    EXPECT_TRUE(t.audit().empty());
}

TEST(IntersectionTree, DeletingUniqueSharedElementLeavesNoStalePointer) {
    IntersectionTree t(1024, 5);
    for (ElementKey x = 0; x < 12; ++x) t.insert(A, x);
    for (ElementKey x = 100; x < 112; ++x) t.insert(B, x);
    t.insert(B, 5);
    ASSERT_EQ(t.report(A, B), std::vector<ElementKey>{5});
    t.erase(B, 5);
    EXPECT_TRUE(t.report(A, B).empty());
    EXPECT_FALSE(t.witness(A, B));
    const auto problems = t.audit();
    EXPECT_TRUE(problems.empty()) << problems.front();
}

TEST(IntersectionTree, SelfReportIsWholeSet) {
    IntersectionTree t(128, 2);
    std::vector<ElementKey> all;
    for (ElementKey x = 0; x < 30; x += 3) {
        t.insert(A, x);
        all.push_back(x);
    }
    EXPECT_EQ(sorted(t.report(A, A)), all);
}

TEST(IntersectionTree, GrowthAcrossPowerOfTwoRebuildsOnce) {
    IntersectionTree t(64);
    for (ElementKey x = 0; x < 33; ++x) t.insert(A, x);
    EXPECT_EQ(t.rebuild_count(), 1u);
    EXPECT_EQ(t.anchor(), 32u);
    EXPECT_LT(t.universe().assigned(), 2 * t.anchor());
    EXPECT_TRUE(t.audit().empty());
}

TEST(IntersectionTree, MassDeletionRebuilds) {
    IntersectionTree t(256, 8);
    OracleFamily o;
    o.add_set(A);
    o.add_set(B);
    for (ElementKey x = 0; x < 60; ++x) {
        t.insert(x % 2 ? A : B, x);
        o.insert(x % 2 ? A : B, x);
        if (x % 3 == 0) {
            t.insert(x % 2 ? B : A, x);
            o.insert(x % 2 ? B : A, x);
        }
    }
    ASSERT_EQ(t.anchor(), 64u);
    const auto rebuilds = t.rebuild_count();
    for (ElementKey x = 0; x < 50; ++x) {
        const SetId s = x % 2 ? A : B;
        t.erase(s, x);
        o.erase(s, x);
    }
    EXPECT_GT(t.rebuild_count(), rebuilds);
    EXPECT_LT(t.anchor(), 64u);
    expect_agrees(t, o, A, B);
    EXPECT_TRUE(t.audit().empty());
}

TEST(IntersectionTree, SpaceStaysWithinBudget) {
    for (std::size_t budget : {64u, 1024u, 16384u}) {
        IntersectionTree t(budget, budget);
        std::mt19937_64 rng(budget);
        for (int i = 0; i < 3000; ++i) {
            const SetId s{rng() % 12};
            const ElementKey x = rng() % 4000;
            if (!t.has_set(s) || !t.contains(s, x)) t.insert(s, x);
        }
        const double bound = 8.0 * static_cast<double>(budget) * std::log2(static_cast<double>(t.anchor()));
        EXPECT_LE(t.space_units(), bound) << "M = " << budget;
        std::size_t level_total = 0;
        for (const auto &level : t.level_stats()) {
            EXPECT_EQ(level.total, t.total_size());
            level_total += level.total;
        }
        EXPECT_EQ(level_total, t.total_size() * t.height());
    }
}

TEST(IntersectionTree, RandomSchedulesMatchOracle) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        std::mt19937_64 rng(seed);
        IntersectionTree t(std::size_t{1} << (6 + seed % 8), seed);
        OracleFamily o;
        for (std::uint64_t s = 0; s < 5; ++s) {
            t.add_set(SetId{s});
            o.add_set(SetId{s});
        }
        for (int step = 0; step < 400; ++step) {
            const SetId s{rng() % 5};
            const ElementKey x = rng() % 150;
            if (o.contains(s, x) && rng() % 3 == 0) {
                t.erase(s, x);
                o.erase(s, x);
            } else if (!o.contains(s, x)) {
                t.insert(s, x);
                o.insert(s, x);
            }
            if (step % 8 == 0) ASSERT_TRUE(t.audit().empty()) << "seed " << seed << " step " << step;
            expect_agrees(t, o, SetId{rng() % 5}, SetId{rng() % 5});
        }
    }
}

TEST(IntersectionTree, TraversalAccounting) {
    IntersectionTree t(1 << 16, 11);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 6000; ++i) {
        const SetId s{rng() % 6};
        const ElementKey x = rng() % 3000;
        if (!t.has_set(s) || !t.contains(s, x)) t.insert(s, x);
    }
    for (std::uint64_t a = 0; a < 6; ++a) {
        for (std::uint64_t b = 0; b < 6; ++b) {
            ReportTrace trace;
            const auto out = t.report(SetId{a}, SetId{b}, &trace);
            EXPECT_LE(trace.type1, trace.type2 + 1);
            if (!out.empty()) EXPECT_LE(trace.type2, out.size());
        }
    }
}
