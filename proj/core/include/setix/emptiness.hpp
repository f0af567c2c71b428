#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "setix/hashing.hpp"
#include "setix/set_id.hpp"

namespace setix {

enum class SizeClass : std::uint8_t { Small, Medium, Large };

const char *to_string(SizeClass c) noexcept;

/// Rounds n to the nearest power of two (ties go down), at least `floor`.
std::size_t nearest_power_of_two(std::size_t n, std::size_t floor);

struct EmptinessOptions {
    /// Space budget M in words. Ignored when budget_per_anchor > 0.
    std::size_t space_budget = 0;
    /// When positive, M is re-derived as max(1, budget_per_anchor * N') at
    /// every rebuild, so the budget tracks the structure's own size.
    double budget_per_anchor = 0.0;
    std::size_t min_anchor = 16;
    /// Test hook: drops the reciprocal half of every ±1 table adjustment.
    bool fault_skip_reciprocal = false;
};

/// Introspection snapshot; not a stable API.
struct EmptinessSnapshot {
    struct SetEntry {
        SetId id{};
        std::size_t size = 0;
        SizeClass size_class = SizeClass::Small;
        std::optional<std::uint32_t> slot;
        std::vector<std::pair<std::uint32_t, std::size_t>> table;  ///< (slot, |S ∩ S'|) for computed entries
        std::size_t pending_catchup = 0;
    };
    std::size_t anchor = 0;
    std::size_t total = 0;
    double space_budget = 0;
    std::size_t registry_size = 0;
    std::size_t rebuilds = 0;
    std::vector<SetEntry> sets;  ///< sorted by id
};

/// Fully dynamic family answering emptiness queries S ∩ S' = ∅.
///
/// Sets are Small, Medium or Large relative to N'/sqrt(M) (hysteresis: Large
/// is entered above 2N'/sqrt(M) and kept until the size drops below
/// N'/sqrt(M)). Medium and Large sets own a slot and a table T_S holding
/// |S ∩ S'| per slot; for every two Large sets both entries are exact. A set
/// that turns Medium snapshots the registry and fills its table a few pairs
/// per subsequent insertion, so it is complete before the set turns Large.
/// Expected cost: O(sqrt M) per update (amortized over rebuilds) and
/// O(N / sqrt M) per query.
class EmptinessStructure {
  public:
    explicit EmptinessStructure(std::size_t space_budget);
    explicit EmptinessStructure(const EmptinessOptions &opts);

    void add_set(SetId s);
    bool has_set(SetId s) const noexcept { return sets_.contains(s); }
    /// Drops an empty set's record. No-op for unknown ids.
    void remove_set_if_empty(SetId s);

    void insert(SetId s, ElementKey x);
    void erase(SetId s, ElementKey x);

    /// True iff s1 ∩ s2 = ∅.
    bool disjoint(SetId s1, SetId s2) const;

    /// Recomputes classes, slots and tables from scratch and re-anchors N'.
    void rebuild();

    /// Replaces the whole content, then rebuilds once.
    void assign(const std::vector<std::pair<SetId, std::vector<ElementKey>>> &content);

    std::size_t size(SetId s) const;
    bool contains(SetId s, ElementKey x) const;
    const std::unordered_set<ElementKey> &members(SetId s) const;
    SizeClass size_class(SetId s) const;
    bool is_large(SetId s) const { return size_class(s) == SizeClass::Large; }
    std::optional<std::uint32_t> slot(SetId s) const;

    /// |s1 ∩ s2| from the tables; nullopt unless both sets are Large.
    std::optional<std::size_t> large_intersection_size(SetId s1, SetId s2) const;

    template <class Fn>
    void for_each_large(Fn &&fn) const {
        for (std::size_t i = 0; i < slot_owner_.size(); ++i) {
            if (!slot_used_[i]) continue;
            const auto &st = sets_.at(slot_owner_[i]);
            if (st.cls == SizeClass::Large) fn(slot_owner_[i]);
        }
    }

    std::size_t total_size() const noexcept { return total_; }
    std::size_t anchor() const noexcept { return anchor_; }
    double space_budget() const noexcept { return budget_; }
    double small_threshold() const noexcept { return small_threshold_; }
    double large_threshold() const noexcept { return 2.0 * small_threshold_; }
    std::size_t registry_size() const noexcept { return registry_size_; }
    std::size_t rebuild_count() const noexcept { return rebuilds_; }
    std::size_t set_count() const noexcept { return sets_.size(); }
    std::size_t forced_catchups() const noexcept { return forced_catchups_; }

    EmptinessSnapshot snapshot() const;

    /// Checks every known table entry against the structure's own
    /// membership tables; returns one message per violation.
    std::vector<std::string> audit() const;

  private:
    static constexpr std::uint32_t kNoSlot = UINT32_MAX;
    static constexpr std::int64_t kUnknown = -1;

    struct SetState {
        std::unordered_set<ElementKey> members;
        SizeClass cls = SizeClass::Small;
        std::uint32_t slot = kNoSlot;
        std::uint64_t epoch = 0;            // bumped on every entry into the registry
        std::vector<std::int64_t> table;    // by slot; kUnknown when not computed
        std::vector<std::pair<SetId, std::uint64_t>> pending;  // catch-up list L_S with epochs
        std::size_t cursor = 0;
    };

    SetState &state(SetId s);
    const SetState &state(SetId s) const;

    void recompute_thresholds();
    void adjust_pair(SetState &a, SetState &b, std::int64_t delta);
    std::size_t intersection_count(const SetState &a, const SetState &b) const;
    void set_entry(SetState &a, std::uint32_t slot_b, std::size_t value);
    void store_pair(SetState &a, SetState &b);

    void enter_registry(SetId s, SetState &st);
    void leave_registry(SetState &st);
    void catch_up(SetId s, SetState &st, std::size_t steps);
    void after_insert(SetId s, SetState &st);
    void after_erase(SetState &st);
    void maybe_rebuild();
    void rebuild_with_anchor(std::size_t anchor);

    EmptinessOptions opts_;
    std::unordered_map<SetId, SetState> sets_;
    std::vector<SetId> slot_owner_;
    std::vector<bool> slot_used_;
    std::vector<std::uint32_t> free_slots_;
    std::size_t registry_size_ = 0;
    std::size_t total_ = 0;
    std::size_t anchor_;
    double budget_ = 1;
    double small_threshold_ = 0;
    std::size_t rebuilds_ = 0;
    std::size_t forced_catchups_ = 0;
};

}  // namespace setix
