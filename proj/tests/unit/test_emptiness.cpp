#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "setix/emptiness.hpp"
#include "setix/errors.hpp"
#include "setix/oracle.hpp"

using namespace setix;

namespace {

constexpr SetId A{1}, B{2}, C{3}, D{4};

// Every computed table entry against the oracle, and both directions for large pairs.
void expect_tables_exact(const EmptinessStructure &es, const OracleFamily &o) {
    const auto snap = es.snapshot();
    std::vector<SetId> by_slot(64, SetId{~0ull});
    for (const auto &s : snap.sets) {
        if (s.slot) by_slot.at(*s.slot) = s.id;
    }
    for (const auto &s : snap.sets) {
        for (auto [slot, value] : s.table) {
            ASSERT_EQ(value, o.intersect(s.id, by_slot.at(slot)).size());
        }
    }
    for (const auto &s : snap.sets) {
        for (const auto &t : snap.sets) {
            if (s.id == t.id || s.size_class != SizeClass::Large || t.size_class != SizeClass::Large) continue;
            const auto n = es.large_intersection_size(s.id, t.id);
            ASSERT_TRUE(n.has_value());
            ASSERT_EQ(*n, o.intersect(s.id, t.id).size());
            ASSERT_EQ(*n, *es.large_intersection_size(t.id, s.id));
        }
    }
}

void insert_both(EmptinessStructure &es, OracleFamily &o, SetId s, ElementKey x) {
    es.insert(s, x);
    o.insert(s, x);
}

}  // namespace

TEST(Emptiness, ZeroBudgetIsAUsageError) { EXPECT_THROW(EmptinessStructure(0), UsageError); }

TEST(Emptiness, FreshStructure) {
    EmptinessStructure es(16);
    es.add_set(A);
    es.add_set(B);
    EXPECT_TRUE(es.disjoint(A, B));
    EXPECT_TRUE(es.disjoint(A, A));
    EXPECT_EQ(es.registry_size(), 0u);
    EXPECT_EQ(es.anchor(), 16u);
    EXPECT_THROW(es.disjoint(A, C), NotFoundError);
}

TEST(Emptiness, ThresholdsAtSmallestAnchor) {
    EmptinessStructure es(16);
    // 2N'/sqrt(M) with N' = 16, M = 16
    EXPECT_DOUBLE_EQ(es.large_threshold(), 2.0 * 16 / std::sqrt(16.0));
    EXPECT_DOUBLE_EQ(es.large_threshold(), 8.0);
    EXPECT_DOUBLE_EQ(es.small_threshold(), 4.0);
}

TEST(Emptiness, NearestPowerOfTwo) {
    EXPECT_EQ(nearest_power_of_two(0, 16), 16u);
    EXPECT_EQ(nearest_power_of_two(33, 16), 32u);
    EXPECT_EQ(nearest_power_of_two(48, 16), 32u);  // tie goes down
    EXPECT_EQ(nearest_power_of_two(49, 16), 64u);
}

TEST(Emptiness, SmallSetsDoNoTableWork) {
    EmptinessStructure es(16);
    CounterScope scope;
    es.insert(A, 1);
    es.insert(A, 2);
    es.insert(B, 2);
    EXPECT_EQ(scope.delta().catchup_steps, 0u);
    EXPECT_EQ(es.size_class(A), SizeClass::Small);
    EXPECT_FALSE(es.disjoint(A, B));
}

TEST(Emptiness, SetTurningLargeHasCompleteTables) {
    EmptinessStructure es(16);
    OracleFamily o;
    // B and C large and static
    for (ElementKey x = 0; x < 9; ++x) insert_both(es, o, B, x);
    for (ElementKey x = 5; x < 14; ++x) insert_both(es, o, C, x);
    ASSERT_TRUE(es.is_large(B));
    ASSERT_TRUE(es.is_large(C));
    const auto forced = es.forced_catchups();
    for (ElementKey x = 3; !es.has_set(A) || !es.is_large(A); ++x) insert_both(es, o, A, x);
    EXPECT_EQ(es.forced_catchups(), forced);  // the incremental schedule finished on time
    expect_tables_exact(es, o);
    EXPECT_TRUE(es.audit().empty());
}

TEST(Emptiness, InterleavedPromotionsSeeEachOther) {
    EmptinessStructure es(16);
    OracleFamily o;
    // A and B turn medium one insertion apart: B is missing from A's catch-up
    // list, so only B's catch-up covers the pair, and it must fill both sides
    for (ElementKey x = 0; x < 4; ++x) {
        insert_both(es, o, A, x);
        insert_both(es, o, B, x + 2);
    }
    ASSERT_EQ(es.size_class(A), SizeClass::Medium);
    ASSERT_EQ(es.size_class(B), SizeClass::Medium);
    for (ElementKey x = 4; x < 9; ++x) {
        insert_both(es, o, A, x);
        insert_both(es, o, B, x + 2);
    }
    ASSERT_TRUE(es.is_large(A));
    ASSERT_TRUE(es.is_large(B));
    EXPECT_EQ(es.large_intersection_size(A, B), o.intersect(A, B).size());
    EXPECT_EQ(es.large_intersection_size(B, A), o.intersect(A, B).size());
    EXPECT_TRUE(es.audit().empty());
}

TEST(Emptiness, InsertThenDeleteRestoresState) {
    EmptinessStructure es(16);
    for (ElementKey x = 0; x < 6; ++x) es.insert(A, x);
    const auto before = es.size_class(A);
    es.insert(A, 100);
    es.erase(A, 100);
    EXPECT_EQ(es.size_class(A), before);
    EXPECT_EQ(es.size(A), 6u);
    EXPECT_THROW(es.erase(A, 100), NotFoundError);
    EXPECT_THROW(es.insert(A, 1), DuplicateError);
}

TEST(Emptiness, DemotionReleasesSlotAndEntries) {
    EmptinessStructure es(16);
    OracleFamily o;
    for (ElementKey x = 0; x < 5; ++x) insert_both(es, o, A, x);
    for (ElementKey x = 0; x < 5; ++x) insert_both(es, o, B, x);
    const auto slot_a = es.slot(A);
    ASSERT_TRUE(slot_a.has_value());
    for (ElementKey x = 0; x < 3; ++x) {
        es.erase(A, x);
        o.erase(A, x);
    }
    EXPECT_EQ(es.size_class(A), SizeClass::Small);
    EXPECT_FALSE(es.slot(A).has_value());
    EXPECT_TRUE(es.audit().empty());  // includes "no entry for a freed slot"
    for (ElementKey x = 10; x < 14; ++x) insert_both(es, o, C, x);
    EXPECT_EQ(es.slot(C), slot_a);  // reused
    expect_tables_exact(es, o);
}

TEST(Emptiness, DeletingASharedElementDecrementsBothEntries) {
    EmptinessStructure es(16);
    for (ElementKey x = 0; x < 9; ++x) es.insert(A, x);
    for (ElementKey x = 4; x < 13; ++x) es.insert(B, x);
    ASSERT_EQ(es.large_intersection_size(A, B), 5u);
    es.erase(A, 6);
    EXPECT_EQ(es.large_intersection_size(A, B), 4u);
    EXPECT_EQ(es.large_intersection_size(B, A), 4u);
}

TEST(Emptiness, GrowthFiresOneRebuild) {
    EmptinessStructure es(16);
    for (ElementKey x = 0; x < 16; ++x) es.insert(SetId{x % 3}, x);
    EXPECT_EQ(es.rebuild_count(), 0u);
    for (ElementKey x = 16; x < 40; ++x) es.insert(SetId{x % 3}, x);
    EXPECT_EQ(es.rebuild_count(), 1u);
    EXPECT_EQ(es.anchor(), 32u);
    EXPECT_TRUE(es.audit().empty());
}

TEST(Emptiness, ShrinkFiresRebuild) {
    EmptinessStructure es(16);
    for (ElementKey x = 0; x < 40; ++x) es.insert(SetId{x % 3}, x);
    const auto rebuilds = es.rebuild_count();
    ASSERT_EQ(es.anchor(), 32u);
    for (ElementKey x = 0; x < 25; ++x) es.erase(SetId{x % 3}, x);
    EXPECT_EQ(es.rebuild_count(), rebuilds + 1);
    EXPECT_EQ(es.anchor(), 16u);
    EXPECT_TRUE(es.audit().empty());
}

TEST(Emptiness, RandomInterleavingMatchesOracle) {
    std::mt19937_64 rng(2024);
    EmptinessStructure es(64);
    OracleFamily o;
    for (std::uint64_t s = 0; s < 8; ++s) {
        es.add_set(SetId{s});
        o.add_set(SetId{s});
    }
    const double root_m = std::sqrt(64.0);
    for (int step = 0; step < 100000; ++step) {
        const SetId s{rng() % 8};
        const ElementKey x = rng() % 120;
        const bool grow = (step / 5000) % 2 == 0 ? rng() % 4 != 0 : rng() % 3 == 0;
        if (grow && !o.contains(s, x)) {
            insert_both(es, o, s, x);
        } else if (!grow && o.contains(s, x)) {
            es.erase(s, x);
            o.erase(s, x);
        }
        const SetId a{rng() % 8}, b{rng() % 8};
        ASSERT_EQ(es.disjoint(a, b), o.intersect(a, b).empty()) << "step " << step;
        ASSERT_LE(static_cast<double>(es.registry_size()), 2 * root_m + 1);
        if (step % 97 == 0) ASSERT_TRUE(es.audit().empty()) << "step " << step;
    }
}

TEST(Emptiness, AssignRebuildsOnce) {
    EmptinessStructure es(16);
    es.assign({{A, {1, 2, 3, 4, 5, 6, 7, 8, 9}}, {B, {9, 10}}, {C, {}}});
    EXPECT_EQ(es.rebuild_count(), 1u);
    EXPECT_EQ(es.total_size(), 11u);
    EXPECT_FALSE(es.disjoint(A, B));
    EXPECT_TRUE(es.disjoint(A, C));
    EXPECT_TRUE(es.audit().empty());
}

TEST(Emptiness, AuditCatchesInjectedFault) {
    EmptinessStructure es(EmptinessOptions{.space_budget = 16, .fault_skip_reciprocal = true});
    for (ElementKey x = 0; x < 9; ++x) es.insert(A, x);
    for (ElementKey x = 20; x < 29; ++x) es.insert(B, x);
    ASSERT_TRUE(es.is_large(A) && es.is_large(B));
    es.insert(A, 25);  // shared now; only one direction gets updated
    EXPECT_FALSE(es.audit().empty());
}

TEST(Emptiness, ProbesPerUpdateScaleWithRootM) {
    std::mt19937_64 rng(8);
    for (std::size_t n : {1024u, 4096u}) {
        EmptinessStructure es(n);
        CounterScope scope;
        std::size_t updates = 0;
        std::vector<std::vector<ElementKey>> sets(16);
        while (es.total_size() < n) {
            const std::size_t s = rng() % 16;
            const ElementKey x = rng();
            es.insert(SetId{s}, x);
            sets[s].push_back(x);
            ++updates;
        }
        const double per_update = static_cast<double>(scope.delta().membership_probes) / static_cast<double>(updates);
        EXPECT_LE(per_update, 4 * std::sqrt(static_cast<double>(n)));
    }
}
