#pragma once

// SWAR primitives on sorted lists of fixed-width fields packed into machine
// words.
//
// Every field is 2*log2(w)+1 bits wide: the low 2*log2(w) bits carry a value
// in [0, w^2) and the top bit is a control bit. Control bits are zero in every
// list at rest; kernels set them temporarily so that field-wise subtraction
// never borrows across field boundaries. Fields are numbered from the least
// significant end, so field i of word j holds list position j*K + i where K
// is the number of fields per word.

#include <algorithm>
#include <bit>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "setix/counters.hpp"
#include "setix/errors.hpp"

namespace setix::word {

using FieldValue = std::uint32_t;

template <std::unsigned_integral Word>
struct FieldLayout {
    using word_type = Word;

    static constexpr unsigned word_bits = std::numeric_limits<Word>::digits;
    static_assert(std::has_single_bit(word_bits), "word size must be a power of two");
    static constexpr unsigned log_w = std::countr_zero(word_bits);
    static constexpr unsigned field_width = 2 * log_w + 1;
    static constexpr unsigned value_bits = field_width - 1;
    static constexpr unsigned fields_per_word = word_bits / field_width;
    static_assert(field_width * fields_per_word <= word_bits);
    static_assert(std::has_single_bit(fields_per_word), "bitonic network needs 2^k fields per word");

    /// Largest storable value; fingerprints live in [0, w^2) = [0, max_value].
    static constexpr FieldValue max_value = (FieldValue{1} << value_bits) - 1;
    static constexpr std::uint64_t value_range = std::uint64_t{1} << value_bits;

    static constexpr Word low_bits = [] {
        Word m = 0;
        for (unsigned i = 0; i < fields_per_word; ++i) m |= Word{1} << (i * field_width);
        return m;
    }();
    static constexpr Word control_bits = static_cast<Word>(low_bits << value_bits);
    static constexpr Word value_mask = static_cast<Word>(low_bits * max_value);

    /// All bits (value and control) of fields [0, k).
    static constexpr Word span_below(unsigned k) noexcept {
        return k == 0 ? Word{0} : static_cast<Word>((Word{1} << (k * field_width)) - 1);
    }
    static constexpr Word values_below(unsigned k) noexcept { return span_below(k) & value_mask; }
    static constexpr Word controls_below(unsigned k) noexcept { return span_below(k) & control_bits; }

    /// Value bits of the fields i with (i mod 2j) < j.
    static constexpr Word lower_blocks(unsigned j) noexcept {
        Word m = 0;
        for (unsigned i = 0; i < fields_per_word; ++i) {
            if (i % (2 * j) < j) m |= static_cast<Word>(Word{max_value} << (i * field_width));
        }
        return m;
    }

    static constexpr FieldValue field(Word w, unsigned i) noexcept {
        return static_cast<FieldValue>((w >> (i * field_width)) & max_value);
    }

    static constexpr Word broadcast(FieldValue v) noexcept { return static_cast<Word>(low_bits * v); }
};

using Layout64 = FieldLayout<std::uint64_t>;
using Layout32 = FieldLayout<std::uint32_t>;

/// Index of the highest set bit. Uses the hardware count-leading-zeros path.
template <std::unsigned_integral Word>
constexpr unsigned msb_index(Word x) {
    if (x == 0) throw DomainError("msb_index of zero");
    return static_cast<unsigned>(std::bit_width(x)) - 1;
}

namespace detail {

// msb of a value in [1, 255] with one parallel comparison against 2^1..2^7 in
// seven 9-bit fields and a multiplication that sums the surviving control bits.
constexpr unsigned msb_of_byte(std::uint64_t v) noexcept {
    constexpr std::uint64_t kRep = 0x0040201008040201ull;  // 1 in each 9-bit field 0..6
    constexpr std::uint64_t kCtl = kRep << 8;
    constexpr std::uint64_t kPow = [] {
        std::uint64_t p = 0;
        for (unsigned k = 0; k < 7; ++k) p |= (std::uint64_t{2} << k) << (9 * k);
        return p;
    }();
    const std::uint64_t ge = (((v * kRep) | kCtl) - kPow) & kCtl;
    return static_cast<unsigned>((((ge >> 8) * kRep) >> 54) & 0x1FF);
}

}  // namespace detail

/// Constant-time msb using only multiplication, shifts and masks (no clz).
constexpr unsigned msb_index_multiply(std::uint64_t x) {
    if (x == 0) throw DomainError("msb_index of zero");
    constexpr std::uint64_t kHigh = 0x8080808080808080ull;
    constexpr std::uint64_t kLow7 = ~kHigh;
    // top bit of each byte set iff the byte is nonzero
    const std::uint64_t nonzero = ((x & kHigh) | (((x & kLow7) + kLow7) & kHigh)) >> 7;
    const std::uint64_t byte_mask = (nonzero * 0x0102040810204080ull) >> 56;
    const unsigned byte = detail::msb_of_byte(byte_mask);
    return 8 * byte + detail::msb_of_byte((x >> (8 * byte)) & 0xFF);
}

namespace detail {

inline void tick(std::uint64_t n) noexcept { counters().word_ops += n; }

// Field-wise (min, max) of two words whose control bits are clear.
template <class L>
constexpr std::pair<typename L::word_type, typename L::word_type> compare_exchange(
    typename L::word_type x, typename L::word_type y) noexcept {
    using W = typename L::word_type;
    const W ge = static_cast<W>(((x | L::control_bits) - y) & L::control_bits);
    const W sel = static_cast<W>(ge - (ge >> L::value_bits));  // value bits where x >= y
    const W inv = static_cast<W>(~sel & L::value_mask);
    tick(10);
    return {static_cast<W>((y & sel) | (x & inv)), static_cast<W>((x & sel) | (y & inv))};
}

// Reverse the field order of a word in log2(K) swap stages.
template <class L>
constexpr typename L::word_type reverse_fields(typename L::word_type w) noexcept {
    using W = typename L::word_type;
    for (unsigned j = L::fields_per_word / 2; j >= 1; j /= 2) {
        const W lo = w & L::lower_blocks(j);
        const W hi = static_cast<W>(w >> (j * L::field_width)) & L::lower_blocks(j);
        w = static_cast<W>((lo << (j * L::field_width)) | hi);
        tick(5);
    }
    return w;
}

// Sort a bitonic word with half-cleaner stages at field distances K/2, ..., 1.
template <class L>
constexpr typename L::word_type bitonic_clean(typename L::word_type w) noexcept {
    using W = typename L::word_type;
    for (unsigned j = L::fields_per_word / 2; j >= 1; j /= 2) {
        const W lo = w & L::lower_blocks(j);
        const W hi = static_cast<W>(w >> (j * L::field_width)) & L::lower_blocks(j);
        auto [mn, mx] = compare_exchange<L>(lo, hi);
        w = static_cast<W>(mn | (mx << (j * L::field_width)));
        tick(5);
    }
    return w;
}

// Merge two sorted full words: returns the K smallest and the K largest fields,
// each sorted. O(log w) word operations.
template <class L>
constexpr std::pair<typename L::word_type, typename L::word_type> merge_words(
    typename L::word_type a, typename L::word_type b) noexcept {
    auto [lo, hi] = compare_exchange<L>(a, reverse_fields<L>(b));
    return {bitonic_clean<L>(lo), bitonic_clean<L>(hi)};
}

}  // namespace detail

/// Sorted sequence of fields packed K per word. Tail fields are zero and the
/// occupancy is tracked by an explicit length, so zero is a legal value.
template <class Layout>
class PackedList {
  public:
    using layout_type = Layout;
    using Word = typename Layout::word_type;
    static constexpr unsigned K = Layout::fields_per_word;

    PackedList() = default;

    std::size_t size() const noexcept { return length_; }
    bool empty() const noexcept { return length_ == 0; }
    std::span<const Word> words() const noexcept { return words_; }

    FieldValue operator[](std::size_t i) const noexcept {
        return Layout::field(words_[i / K], static_cast<unsigned>(i % K));
    }

    std::vector<FieldValue> unpack() const {
        std::vector<FieldValue> out(length_);
        for (std::size_t i = 0; i < length_; ++i) out[i] = (*this)[i];
        return out;
    }

    /// Number of occupied fields in word j.
    unsigned occupancy(std::size_t j) const noexcept {
        const std::size_t full = length_ / K;
        if (j < full) return K;
        return j == full ? static_cast<unsigned>(length_ % K) : 0;
    }

    /// Insert v at its successor position. Cost: O(1) word operations per word.
    void insert(FieldValue v) {
        check_value(v);
        const Word probe = Layout::broadcast(v);
        std::size_t pos = length_;
        for (std::size_t j = 0; j < words_.size(); ++j) {
            // control bit survives (w|H) - v exactly in the fields holding a value >= v
            const Word ge = static_cast<Word>(((words_[j] | Layout::control_bits) - probe) &
                                              Layout::controls_below(occupancy(j)));
            detail::tick(4);
            if (ge != 0) {
                pos = j * K + msb_index<Word>(static_cast<Word>(ge & (~ge + 1))) / Layout::field_width;
                break;
            }
        }
        if (length_ % K == 0) words_.push_back(0);
        insert_at(pos, v);
    }

    /// Remove one occurrence of v; throws NotFoundError if absent.
    void erase(FieldValue v) {
        check_value(v);
        const Word probe = Layout::broadcast(v);
        for (std::size_t j = 0; j < words_.size(); ++j) {
            const Word diff = words_[j] ^ probe;
            const Word nonzero = static_cast<Word>(((diff | Layout::control_bits) - Layout::low_bits) &
                                                   Layout::control_bits);
            const Word eq = static_cast<Word>(~nonzero & Layout::controls_below(occupancy(j)));
            detail::tick(6);
            if (eq != 0) {
                erase_at(j * K + msb_index<Word>(static_cast<Word>(eq & (~eq + 1))) / Layout::field_width);
                return;
            }
        }
        throw NotFoundError("value " + std::to_string(v) + " not in packed list");
    }

    /// Builds a list from words produced by a kernel. Tail fields past
    /// `length` are cleared.
    static PackedList adopt(std::vector<Word> words, std::size_t length) {
        PackedList out;
        out.words_ = std::move(words);
        out.length_ = length;
        out.words_.resize((length + K - 1) / K);
        if (length % K != 0) out.words_.back() &= Layout::values_below(length % K);
        return out;
    }

    friend bool operator==(const PackedList &a, const PackedList &b) = default;

  private:
    static void check_value(FieldValue v) {
        if (v > Layout::max_value) {
            throw RangeError("field value " + std::to_string(v) + " exceeds " +
                             std::to_string(Layout::max_value));
        }
    }

    static FieldValue top_field(Word w) noexcept { return Layout::field(w, K - 1); }

    void insert_at(std::size_t pos, FieldValue v) {
        const std::size_t j = pos / K;
        const unsigned i = static_cast<unsigned>(pos % K);
        Word w = words_[j];
        Word carry = top_field(w);
        const Word below = w & Layout::values_below(i);
        const Word above = static_cast<Word>((w & ~Layout::values_below(i)) << Layout::field_width);
        words_[j] = static_cast<Word>(below | (Word{v} << (i * Layout::field_width)) | (above & Layout::value_mask));
        detail::tick(8);
        for (std::size_t k = j + 1; k < words_.size(); ++k) {
            const Word next = top_field(words_[k]);
            words_[k] = static_cast<Word>(((words_[k] << Layout::field_width) & Layout::value_mask) | carry);
            carry = next;
            detail::tick(4);
        }
        ++length_;
    }

    void erase_at(std::size_t pos) {
        const std::size_t j = pos / K;
        const unsigned i = static_cast<unsigned>(pos % K);
        constexpr unsigned top_shift = (K - 1) * Layout::field_width;
        const Word w = words_[j];
        const Word below = w & Layout::values_below(i);
        const Word above = static_cast<Word>((w & ~Layout::values_below(i + 1) & Layout::value_mask) >>
                                             Layout::field_width);
        words_[j] = below | above;
        detail::tick(7);
        for (std::size_t k = j; k + 1 < words_.size(); ++k) {
            words_[k] |= static_cast<Word>(Word{Layout::field(words_[k + 1], 0)} << top_shift);
            words_[k + 1] >>= Layout::field_width;
            detail::tick(4);
        }
        --length_;
        if (length_ % K == 0) words_.pop_back();
    }

    std::vector<Word> words_;
    std::size_t length_ = 0;
};

/// Packs sorted values LSB-first, K per word.
template <class Layout = Layout64>
PackedList<Layout> pack_fields(std::span<const FieldValue> values) {
    using Word = typename Layout::word_type;
    constexpr unsigned K = Layout::fields_per_word;
    std::vector<Word> words((values.size() + K - 1) / K, 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] > Layout::max_value) {
            throw RangeError("field value " + std::to_string(values[i]) + " exceeds " +
                             std::to_string(Layout::max_value));
        }
        if (i > 0 && values[i] < values[i - 1]) throw UsageError("pack_fields requires sorted input");
        words[i / K] |= static_cast<Word>(Word{values[i]} << ((i % K) * Layout::field_width));
    }
    return PackedList<Layout>::adopt(std::move(words), values.size());
}

template <class Layout = Layout64>
PackedList<Layout> pack_fields(std::initializer_list<FieldValue> values) {
    return pack_fields<Layout>(std::span<const FieldValue>(values.begin(), values.size()));
}

/// Sorted multiset union. Word pairs are merged with a bitonic network of
/// O(log w) word operations; the lists are combined with the usual blocked
/// merge that keeps one pending word and feeds it the word with the smaller head.
template <class Layout>
PackedList<Layout> merge_sorted_words(const PackedList<Layout> &a, const PackedList<Layout> &b) {
    using Word = typename Layout::word_type;
    if (a.empty()) return b;
    if (b.empty()) return a;

    // The partial last word is padded with max_value; padding sorts to the end
    // (ties with real max_value entries are indistinguishable) and is cut off
    // by the final length.
    auto load = [](const PackedList<Layout> &l, std::size_t j) -> Word {
        const unsigned occ = l.occupancy(j);
        Word w = l.words()[j];
        if (occ < Layout::fields_per_word) {
            w |= static_cast<Word>(Layout::value_mask & ~Layout::values_below(occ));
        }
        return w;
    };

    const auto aw = a.words();
    const auto bw = b.words();
    std::vector<Word> out;
    out.reserve(aw.size() + bw.size());

    auto [lo, carry] = detail::merge_words<Layout>(load(a, 0), load(b, 0));
    out.push_back(lo);
    std::size_t ia = 1;
    std::size_t ib = 1;
    while (ia < aw.size() || ib < bw.size()) {
        Word next;
        if (ib >= bw.size() || (ia < aw.size() && Layout::field(aw[ia], 0) <= Layout::field(bw[ib], 0))) {
            next = load(a, ia++);
        } else {
            next = load(b, ib++);
        }
        auto [l, h] = detail::merge_words<Layout>(carry, next);
        out.push_back(l);
        carry = h;
        detail::tick(2);
    }
    out.push_back(carry);
    return PackedList<Layout>::adopt(std::move(out), a.size() + b.size());
}

/// Calls fn(i) for every index i >= 1 with field(i) == field(i-1), in
/// increasing order. Precondition: the list is sorted. If fn returns bool,
/// returning false stops the scan; the function returns false in that case.
///
/// Each word is differenced against itself shifted by one field with control
/// bits set, the nonzero test is distilled to one bit per field by repeated
/// halving, and the surviving zero-flags are read off one at a time.
template <class Layout, class Fn>
bool for_each_duplicate(const PackedList<Layout> &c, Fn &&fn) {
    using Word = typename Layout::word_type;
    constexpr unsigned F = Layout::field_width;
    constexpr unsigned K = Layout::fields_per_word;
    const auto words = c.words();
    for (std::size_t j = 0; j < words.size(); ++j) {
        const Word w = words[j];
        const Word prev_top = j == 0 ? Word{0} : Word{Layout::field(words[j - 1], K - 1)};
        const Word shifted = static_cast<Word>(((w << F) & Layout::value_mask) | prev_top);
        Word t = static_cast<Word>(((w | Layout::control_bits) - shifted) & Layout::value_mask);
        detail::tick(5);
        for (unsigned n = Layout::value_bits; n > 1;) {
            const unsigned s = n / 2;
            n -= s;
            t = static_cast<Word>((t | (t >> s)) & (Layout::low_bits * ((Word{1} << n) - 1)));
            detail::tick(3);
        }
        Word zero = static_cast<Word>(~t & Layout::low_bits & Layout::span_below(c.occupancy(j)));
        if (j == 0) zero &= static_cast<Word>(~Word{1});
        detail::tick(3);
        while (zero != 0) {
            const unsigned bit = msb_index<Word>(static_cast<Word>(zero & (~zero + 1)));
            detail::tick(3);
            if constexpr (std::is_same_v<std::invoke_result_t<Fn &, std::size_t>, bool>) {
                if (!fn(j * K + bit / F)) return false;
            } else {
                fn(j * K + bit / F);
            }
            zero &= static_cast<Word>(zero - 1);
        }
    }
    return true;
}

template <class Layout>
std::vector<std::size_t> find_duplicates(const PackedList<Layout> &c) {
    std::vector<std::size_t> out;
    for_each_duplicate(c, [&](std::size_t i) { out.push_back(i); });
    return out;
}

template <class Layout>
PackedList<Layout> insert_field(PackedList<Layout> c, FieldValue v) {
    c.insert(v);
    return c;
}

template <class Layout>
PackedList<Layout> delete_field(PackedList<Layout> c, FieldValue v) {
    c.erase(v);
    return c;
}

}  // namespace setix::word
