#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "setix/emptiness.hpp"
#include "setix/hashing.hpp"
#include "setix/packed_sets.hpp"
#include "setix/set_id.hpp"

namespace setix {

/// w / log2(w)^2 rounded to the nearest positive integer (2 for w = 64).
unsigned default_tau(unsigned word_bits = 64) noexcept;

struct WitnessOptions {
    unsigned tau = 0;  ///< 0 selects default_tau()
    std::size_t min_anchor = 16;
    std::uint64_t seed = 0;
};

enum class WitnessEntryState : std::uint8_t { Unset, Null, Set };

struct WitnessSnapshot {
    struct Entry {
        SetId large{};
        WitnessEntryState state = WitnessEntryState::Unset;
        ElementKey value = 0;
    };
    struct SetEntry {
        SetId id{};
        std::size_t size = 0;
        SizeClass size_class = SizeClass::Small;
        std::size_t stash = 0;
        std::size_t primary = 0;
        std::optional<std::uint32_t> slot;
        bool tabled = false;
        std::vector<Entry> table;  ///< one per large set, by slot
    };
    std::size_t anchor = 0;
    std::size_t total = 0;
    std::size_t rebuilds = 0;
    std::size_t dumps = 0;
    std::vector<SetEntry> sets;  ///< sorted by id
};

/// Insert-only family answering witness queries (some element of S ∩ S').
///
/// With L = floor(sqrt(N' tau)): Small sets have fewer than
/// ceil(sqrt(N'/tau)) elements, Medium sets up to L, Large sets more. A
/// Medium set lives entirely in its stash, a packed set of the inner
/// PackedFamily; a Large set keeps its newest elements in the stash and dumps
/// them into its primary part whenever the stash reaches L. Every set from
/// size ceil(sqrt(N'/2tau)) on owns a witness table P_S holding, per Large
/// set S', one element of S ∩ primary(S') or null. Entries are write-once.
///
/// A query scans a Small operand against the other set; otherwise it reads
/// both table directions and falls back to a packed stash intersection.
class WitnessStructure {
  public:
    explicit WitnessStructure(const WitnessOptions &opts = {});

    void add_set(SetId s);
    bool has_set(SetId s) const noexcept { return sets_.contains(s); }

    void insert(SetId s, ElementKey x);

    std::optional<ElementKey> witness(SetId s1, SetId s2) const;
    bool disjoint(SetId s1, SetId s2) const { return !witness(s1, s2).has_value(); }

    std::size_t size(SetId s) const;
    bool contains(SetId s, ElementKey x) const;
    SizeClass size_class(SetId s) const;
    std::size_t stash_size(SetId s) const;
    std::size_t primary_size(SetId s) const;

    unsigned tau() const noexcept { return tau_; }
    std::size_t anchor() const noexcept { return anchor_; }
    std::size_t table_threshold() const noexcept { return table_threshold_; }
    std::size_t medium_threshold() const noexcept { return medium_threshold_; }
    /// L: largest Medium size and the stash capacity.
    std::size_t large_threshold() const noexcept { return large_threshold_; }
    std::size_t total_size() const noexcept { return total_; }
    std::size_t set_count() const noexcept { return sets_.size(); }
    std::size_t large_count() const noexcept { return large_count_; }
    std::size_t rebuild_count() const noexcept { return rebuilds_; }
    std::size_t dump_count() const noexcept { return dumps_; }
    std::size_t forced_catchups() const noexcept { return forced_catchups_; }
    /// Queries that found an uncomputed table entry and fell back to a scan.
    std::size_t table_misses() const noexcept { return table_misses_; }

    WitnessSnapshot snapshot() const;
    std::vector<std::string> audit() const;

  private:
    static constexpr std::uint32_t kNoSlot = UINT32_MAX;

    struct Entry {
        WitnessEntryState state = WitnessEntryState::Unset;
        ElementKey value = 0;
    };

    struct SetState {
        std::unordered_set<ElementKey> members;
        std::unordered_set<ElementKey> primary;
        std::vector<ElementKey> stash;  // mirror of the packed stash, insertion order
        SizeClass cls = SizeClass::Small;
        std::uint32_t slot = kNoSlot;  // Large only
        bool tabled = false;
        std::vector<Entry> table;  // by large slot
        // witnesses whose row or column a rebuild retired, by large set; reused
        // when the entry comes back so it keeps its value
        std::unordered_map<SetId, ElementKey> retired;
        std::vector<SetId> pending;
        std::size_t cursor = 0;
    };

    SetState &state(SetId s);
    const SetState &state(SetId s) const;

    void recompute_thresholds();
    Entry &entry(SetState &st, std::uint32_t slot);
    static const Entry *find_entry(const SetState &st, std::uint32_t slot);
    void write_entry(SetState &st, std::uint32_t slot, std::optional<ElementKey> value);

    std::optional<ElementKey> scan_witness(const std::unordered_set<ElementKey> &a,
                                           const std::unordered_set<ElementKey> &b) const;

    void start_table(SetState &st);
    void catch_up(SetState &st, std::size_t steps);
    void finish_table(SetState &st);
    void become_medium(SetId s, SetState &st);
    void become_large(SetId s, SetState &st, ElementKey newest);
    void dump_stash(SetId s, SetState &st);
    void refresh_against_large(SetState &st, SetId s, ElementKey x);
    std::uint32_t take_slot(SetId s);
    void rebuild(std::size_t anchor);

    WitnessOptions opts_;
    unsigned tau_;
    SeedStream seeds_;
    std::unique_ptr<PackedFamily> stashes_;
    std::unordered_map<SetId, SetState> sets_;
    std::vector<SetId> large_owner_;
    std::size_t large_count_ = 0;
    std::size_t total_ = 0;
    std::size_t anchor_;
    std::size_t table_threshold_ = 0;
    std::size_t medium_threshold_ = 0;
    std::size_t large_threshold_ = 0;
    std::size_t rebuilds_ = 0;
    std::size_t dumps_ = 0;
    std::size_t forced_catchups_ = 0;
    mutable std::size_t table_misses_ = 0;
};

}  // namespace setix
