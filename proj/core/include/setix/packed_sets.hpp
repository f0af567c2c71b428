#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include "setix/counters.hpp"
#include "setix/errors.hpp"
#include "setix/hashing.hpp"
#include "setix/set_id.hpp"
#include "setix/word_ops.hpp"

namespace setix {

/// A family of sets, each holding fewer than `cap` elements, supporting
/// expected O(1) updates and intersection queries in O(d log^2 w / w) word
/// operations plus output.
///
/// Each set is split into ell buckets by a shared hash h. A bucket keeps the
/// sorted packed list of its elements' fingerprints h'(e) in [0, w^2) and a
/// chained table from fingerprint back to elements. Intersecting two sets
/// merges corresponding bucket lists, reads off adjacent equal fingerprints
/// and verifies the candidates through the chains.
///
/// Mutations need exclusive access; concurrent const queries are safe.
template <class Layout = word::Layout64>
class BasicPackedFamily {
  public:
    using List = word::PackedList<Layout>;
    using Fingerprint = word::FieldValue;

    struct Bucket {
        List fingerprints;
        /// fingerprint -> elements, chain kept in insertion order
        std::unordered_map<Fingerprint, std::vector<ElementKey>> members;
    };

    /// ell = max(1, ceil(d log2 w / w)).
    static constexpr std::size_t bucket_count_for(std::size_t cap) noexcept {
        const std::size_t num = cap * Layout::log_w;
        const std::size_t b = (num + Layout::word_bits - 1) / Layout::word_bits;
        return b == 0 ? 1 : b;
    }

    BasicPackedFamily(std::size_t cap, std::uint64_t seed) : cap_(cap), ell_(bucket_count_for(cap)) {
        if (cap == 0) throw UsageError("packed family cap must be positive");
        SeedStream seeds(seed);
        bucket_hash_.emplace(ell_, seeds);
        fingerprint_hash_.emplace(Layout::value_bits, seeds);
    }

    std::size_t cap() const noexcept { return cap_; }
    std::size_t bucket_count() const noexcept { return ell_; }
    std::size_t set_count() const noexcept { return sets_.size(); }

    std::size_t bucket_of(ElementKey e) const noexcept { return static_cast<std::size_t>((*bucket_hash_)(e)); }
    Fingerprint fingerprint_of(ElementKey e) const noexcept { return (*fingerprint_hash_)(e); }

    /// Registers an empty set; no-op if it already exists.
    void add_set(SetId s) { sets_.try_emplace(s, ell_); }
    bool has_set(SetId s) const noexcept { return sets_.contains(s); }
    /// Forgets a set and its elements; no-op for unknown ids.
    void remove_set(SetId s) { sets_.erase(s); }
    std::size_t size(SetId s) const { return find(s).size; }

    bool contains(SetId s, ElementKey e) const {
        const auto &b = find(s).buckets[bucket_of(e)];
        return chain_contains(b, fingerprint_of(e), e);
    }

    void insert(SetId s, ElementKey e) {
        auto &rec = sets_.try_emplace(s, ell_).first->second;
        auto &bucket = rec.buckets[bucket_of(e)];
        const Fingerprint fp = fingerprint_of(e);
        if (chain_contains(bucket, fp, e)) {
            throw DuplicateError("element " + std::to_string(e) + " already in set " +
                                 std::to_string(to_underlying(s)));
        }
        if (rec.size + 1 >= cap_) {
            throw CapacityError("set " + std::to_string(to_underlying(s)) + " would reach cap " +
                                std::to_string(cap_));
        }
        bucket.fingerprints.insert(fp);
        bucket.members[fp].push_back(e);
        ++rec.size;
    }

    void erase(SetId s, ElementKey e) {
        auto it = sets_.find(s);
        if (it == sets_.end()) throw NotFoundError("unknown set " + std::to_string(to_underlying(s)));
        auto &bucket = it->second.buckets[bucket_of(e)];
        const Fingerprint fp = fingerprint_of(e);
        auto chain = bucket.members.find(fp);
        if (chain == bucket.members.end()) throw element_missing(s, e);
        auto &elems = chain->second;
        auto pos = std::find(elems.begin(), elems.end(), e);
        if (pos == elems.end()) throw element_missing(s, e);
        elems.erase(pos);
        if (elems.empty()) bucket.members.erase(chain);
        bucket.fingerprints.erase(fp);
        --it->second.size;
    }

    /// Calls fn(e) for each e in s1 ∩ s2 (each exactly once, unspecified
    /// order). fn may return bool; false stops the enumeration early.
    /// Returns false iff stopped early.
    template <class Fn>
    bool for_each_common(SetId s1, SetId s2, Fn &&fn) const {
        const auto &a = find(s1);
        const auto &b = find(s2);
        if (a.size == 0 || b.size == 0) return true;
        auto &ctr = counters();
        for (std::size_t i = 0; i < ell_; ++i) {
            const Bucket &ba = a.buckets[i];
            const Bucket &bb = b.buckets[i];
            if (ba.fingerprints.empty() || bb.fingerprints.empty()) continue;
            const List merged = word::merge_sorted_words(ba.fingerprints, bb.fingerprints);
            std::int64_t last = -1;
            const bool finished = word::for_each_duplicate(merged, [&](std::size_t idx) -> bool {
                const Fingerprint fp = merged[idx];
                if (static_cast<std::int64_t>(fp) == last) return true;
                last = fp;
                ++ctr.fingerprint_hits;
                const auto ca = ba.members.find(fp);
                const auto cb = bb.members.find(fp);
                bool verified = false;
                if (ca != ba.members.end() && cb != bb.members.end()) {
                    for (ElementKey x : ca->second) {
                        for (ElementKey y : cb->second) {
                            ++ctr.verify_probes;
                            if (x != y) continue;
                            verified = true;
                            if constexpr (std::is_same_v<std::invoke_result_t<Fn &, ElementKey>, bool>) {
                                if (!fn(x)) return false;
                            } else {
                                fn(x);
                            }
                        }
                    }
                }
                if (!verified) ++ctr.false_positives;
                return true;
            });
            if (!finished) return false;
        }
        return true;
    }

    /// All of s1 ∩ s2, unspecified order.
    std::vector<ElementKey> intersect_report(SetId s1, SetId s2) const {
        std::vector<ElementKey> out;
        for_each_common(s1, s2, [&](ElementKey e) { out.push_back(e); });
        return out;
    }

    /// Some element of s1 ∩ s2, or nullopt when disjoint.
    std::optional<ElementKey> intersect_witness(SetId s1, SetId s2) const {
        std::optional<ElementKey> found;
        for_each_common(s1, s2, [&](ElementKey e) {
            found = e;
            return false;
        });
        return found;
    }

    /// Introspection: the buckets of a set.
    const std::vector<Bucket> &buckets(SetId s) const { return find(s).buckets; }

    std::vector<ElementKey> elements(SetId s) const {
        std::vector<ElementKey> out;
        for (const auto &b : find(s).buckets) {
            for (const auto &[fp, chain] : b.members) out.insert(out.end(), chain.begin(), chain.end());
        }
        return out;
    }

  private:
    struct SetRecord {
        explicit SetRecord(std::size_t ell) : buckets(ell) {}
        std::size_t size = 0;
        std::vector<Bucket> buckets;
    };

    const SetRecord &find(SetId s) const {
        auto it = sets_.find(s);
        if (it == sets_.end()) throw NotFoundError("unknown set " + std::to_string(to_underlying(s)));
        return it->second;
    }

    static bool chain_contains(const Bucket &b, Fingerprint fp, ElementKey e) {
        auto it = b.members.find(fp);
        if (it == b.members.end()) return false;
        return std::find(it->second.begin(), it->second.end(), e) != it->second.end();
    }

    static NotFoundError element_missing(SetId s, ElementKey e) {
        return NotFoundError("element " + std::to_string(e) + " not in set " + std::to_string(to_underlying(s)));
    }

    std::size_t cap_;
    std::size_t ell_;
    std::optional<BucketHash> bucket_hash_;
    std::optional<FingerprintHash> fingerprint_hash_;
    std::unordered_map<SetId, SetRecord> sets_;
};

using PackedFamily = BasicPackedFamily<word::Layout64>;
using PackedFamily32 = BasicPackedFamily<word::Layout32>;

}  // namespace setix
