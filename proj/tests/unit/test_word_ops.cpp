#include <algorithm>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "setix/word_ops.hpp"

using namespace setix;
using namespace setix::word;

namespace {

// scalar oracles
template <class L>
typename L::word_type scalar_pack(const std::vector<FieldValue> &v, std::size_t word) {
    typename L::word_type w = 0;
    for (unsigned i = 0; i < L::fields_per_word && word * L::fields_per_word + i < v.size(); ++i) {
        w |= static_cast<typename L::word_type>(v[word * L::fields_per_word + i]) << (i * L::field_width);
    }
    return w;
}

unsigned scalar_msb(std::uint64_t x) {
    unsigned i = 0;
    while (x >>= 1) ++i;
    return i;
}

std::vector<std::size_t> scalar_duplicates(const std::vector<FieldValue> &v) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] == v[i - 1]) out.push_back(i);
    }
    return out;
}

template <class L>
std::vector<FieldValue> random_sorted(std::mt19937_64 &rng, std::size_t n, FieldValue hi = L::max_value) {
    std::uniform_int_distribution<FieldValue> pick(0, hi);
    std::vector<FieldValue> v(n);
    for (auto &x : v) x = pick(rng);
    std::sort(v.begin(), v.end());
    return v;
}

template <class L>
void expect_controls_clear(const PackedList<L> &c) {
    for (auto w : c.words()) EXPECT_EQ(w & L::control_bits, 0u);
}

}  // namespace

TEST(FieldLayout, SixtyFourBitGeometry) {
    EXPECT_EQ(Layout64::field_width, 13u);
    EXPECT_EQ(Layout64::fields_per_word, 4u);
    EXPECT_EQ(Layout64::max_value, 4095u);
    EXPECT_EQ(Layout64::value_range, 4096u);
}

TEST(FieldLayout, ThirtyTwoBitGeometry) {
    EXPECT_EQ(Layout32::field_width, 11u);
    EXPECT_EQ(Layout32::fields_per_word, 2u);
    EXPECT_EQ(Layout32::max_value, 1023u);
}

TEST(PackFields, MatchesShiftOrOracle) {
    const auto c = pack_fields<Layout64>({1, 3, 5, 7});
    ASSERT_EQ(c.words().size(), 1u);
    EXPECT_EQ(c.words()[0], scalar_pack<Layout64>({1, 3, 5, 7}, 0));
    EXPECT_EQ(c.words()[0], 0x38014006001ull);  // 1 | 3<<13 | 5<<26 | 7<<39
}

TEST(PackFields, ThirtyTwoBitWords) {
    const auto c = pack_fields<Layout32>({1, 2, 3, 4});
    ASSERT_EQ(c.words().size(), 2u);
    EXPECT_EQ(c.words()[0], 4097u);
    EXPECT_EQ(c.words()[1], 8195u);
}

TEST(PackFields, RejectsOverflowAndDisorder) {
    EXPECT_THROW(pack_fields<Layout64>({1, 4096}), RangeError);
    EXPECT_THROW(pack_fields<Layout32>({1024}), RangeError);
    EXPECT_THROW(pack_fields<Layout64>({5, 3}), UsageError);
}

TEST(PackFields, EmptyAndPartialWords) {
    EXPECT_TRUE(pack_fields<Layout64>({}).empty());
    const auto c = pack_fields<Layout64>({0, 0, 9, 12, 4095});
    EXPECT_EQ(c.size(), 5u);
    EXPECT_EQ(c.words().size(), 2u);
    EXPECT_EQ(c.occupancy(1), 1u);
    EXPECT_EQ(c.unpack(), (std::vector<FieldValue>{0, 0, 9, 12, 4095}));
}

TEST(MsbIndex, AgreesWithLoop) {
    std::mt19937_64 rng(11);
    for (unsigned b = 0; b < 64; ++b) {
        const std::uint64_t x = std::uint64_t{1} << b;
        EXPECT_EQ(msb_index(x), b);
        EXPECT_EQ(msb_index_multiply(x), b);
        EXPECT_EQ(msb_index_multiply(x | (x - 1)), b);
    }
    for (int i = 0; i < 100000; ++i) {
        const std::uint64_t x = rng() >> (rng() % 64);
        if (x == 0) continue;
        ASSERT_EQ(msb_index(x), scalar_msb(x));
        ASSERT_EQ(msb_index_multiply(x), scalar_msb(x));
    }
}

TEST(MsbIndex, ZeroIsADomainError) {
    EXPECT_THROW(msb_index(std::uint64_t{0}), DomainError);
    EXPECT_THROW(msb_index_multiply(0), DomainError);
}

template <class L>
class WordKernels : public ::testing::Test {};
using Layouts = ::testing::Types<Layout64, Layout32>;
TYPED_TEST_SUITE(WordKernels, Layouts);

TYPED_TEST(WordKernels, MergeMatchesStdMerge) {
    using L = TypeParam;
    std::mt19937_64 rng(L::word_bits);
    for (int trial = 0; trial < 3000; ++trial) {
        const auto a = random_sorted<L>(rng, rng() % 40, trial % 3 == 0 ? 15 : L::max_value);
        const auto b = random_sorted<L>(rng, rng() % 40, trial % 3 == 0 ? 15 : L::max_value);
        std::vector<FieldValue> expect;
        std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(expect));
        const auto c = merge_sorted_words(pack_fields<L>(a), pack_fields<L>(b));
        ASSERT_EQ(c.unpack(), expect);
        expect_controls_clear(c);
    }
}

TYPED_TEST(WordKernels, MergeExtremes) {
    using L = TypeParam;
    const auto top = pack_fields<L>({L::max_value, L::max_value});
    const auto low = pack_fields<L>({0});
    EXPECT_EQ(merge_sorted_words(top, low).unpack(), (std::vector<FieldValue>{0, L::max_value, L::max_value}));
    EXPECT_EQ(merge_sorted_words(PackedList<L>{}, low).unpack(), (std::vector<FieldValue>{0}));
}

TYPED_TEST(WordKernels, DuplicatesMatchAdjacentScan) {
    using L = TypeParam;
    std::mt19937_64 rng(L::word_bits + 1);
    for (int trial = 0; trial < 3000; ++trial) {
        const auto v = random_sorted<L>(rng, rng() % 50, trial % 2 ? 20 : L::max_value);
        ASSERT_EQ(find_duplicates(pack_fields<L>(v)), scalar_duplicates(v));
    }
}

TYPED_TEST(WordKernels, DuplicatesAcrossWordBoundary) {
    using L = TypeParam;
    std::vector<FieldValue> v(L::fields_per_word, 1);
    v.back() = 2;
    v.push_back(2);
    EXPECT_EQ(find_duplicates(pack_fields<L>(v)), scalar_duplicates(v));
    // zero is a legal value, and field 0 has no predecessor
    EXPECT_EQ(find_duplicates(pack_fields<L>({0, 0})), (std::vector<std::size_t>{1}));
    EXPECT_TRUE(find_duplicates(pack_fields<L>({0})).empty());
}

TYPED_TEST(WordKernels, InsertDeleteMatchVector) {
    using L = TypeParam;
    std::mt19937_64 rng(L::word_bits + 2);
    std::uniform_int_distribution<FieldValue> pick(0, L::max_value);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<FieldValue> ref;
        PackedList<L> c;
        for (int op = 0; op < 60; ++op) {
            if (ref.empty() || rng() % 3) {
                const FieldValue v = trial % 2 ? pick(rng) % 8 : pick(rng);
                ref.insert(std::upper_bound(ref.begin(), ref.end(), v), v);
                c = insert_field(c, v);
            } else {
                const FieldValue v = ref[rng() % ref.size()];
                ref.erase(std::lower_bound(ref.begin(), ref.end(), v));
                c = delete_field(c, v);
            }
            ASSERT_EQ(c.unpack(), ref);
        }
        expect_controls_clear(c);
    }
}

TYPED_TEST(WordKernels, InsertDeleteErrors) {
    using L = TypeParam;
    auto c = pack_fields<L>({1, 2});
    EXPECT_THROW(c.insert(L::max_value + 1), RangeError);
    EXPECT_THROW(c.erase(3), NotFoundError);
    c.erase(1);
    c.erase(2);
    EXPECT_TRUE(c.empty());
    EXPECT_THROW(c.erase(2), NotFoundError);
}

TEST(WordOpsCounter, SingleWordMergeIsLogarithmic) {
    reset_counters();
    const auto a = pack_fields<Layout64>({1, 5, 9, 13});
    const auto b = pack_fields<Layout64>({2, 6, 10, 14});
    CounterScope scope;
    (void)merge_sorted_words(a, b);
    const auto ops = scope.delta().word_ops;
    EXPECT_GT(ops, 0u);
    EXPECT_LT(ops, 200u);
}

TEST(WordOpsCounter, MergeIsLinearInWords) {
    std::mt19937_64 rng(5);
    auto cost = [&](std::size_t n) {
        const auto a = pack_fields<Layout64>(random_sorted<Layout64>(rng, n));
        const auto b = pack_fields<Layout64>(random_sorted<Layout64>(rng, n));
        CounterScope scope;
        (void)merge_sorted_words(a, b);
        return static_cast<double>(scope.delta().word_ops);
    };
    const double small = cost(256), big = cost(1024);
    EXPECT_NEAR(big / small, 4.0, 0.5);
}
