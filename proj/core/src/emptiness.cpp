#include "setix/emptiness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "setix/counters.hpp"
#include "setix/errors.hpp"

namespace setix {

const char *to_string(SizeClass c) noexcept {
    switch (c) {
        case SizeClass::Small: return "small";
        case SizeClass::Medium: return "medium";
        case SizeClass::Large: return "large";
    }
    return "?";
}

std::size_t nearest_power_of_two(std::size_t n, std::size_t floor) {
    if (n <= floor) return floor;
    const std::size_t lo = std::bit_floor(n);
    const std::size_t hi = lo << 1;
    return std::max(floor, (n - lo <= hi - n) ? lo : hi);
}

namespace {

std::uint64_t next_epoch() {
    thread_local std::uint64_t epoch = 0;
    return ++epoch;
}

std::string id_str(SetId s) { return std::to_string(to_underlying(s)); }

}  // namespace

EmptinessStructure::EmptinessStructure(std::size_t space_budget)
    : EmptinessStructure(EmptinessOptions{.space_budget = space_budget}) {}

EmptinessStructure::EmptinessStructure(const EmptinessOptions &opts) : opts_(opts), anchor_(opts.min_anchor) {
    if (opts_.budget_per_anchor <= 0 && opts_.space_budget == 0) {
        throw UsageError("emptiness structure needs a positive space budget");
    }
    if (opts_.min_anchor == 0) throw UsageError("minimum anchor must be positive");
    recompute_thresholds();
}

void EmptinessStructure::recompute_thresholds() {
    budget_ = opts_.budget_per_anchor > 0 ? std::max(1.0, opts_.budget_per_anchor * static_cast<double>(anchor_))
                                          : static_cast<double>(opts_.space_budget);
    small_threshold_ = static_cast<double>(anchor_) / std::sqrt(budget_);
}

EmptinessStructure::SetState &EmptinessStructure::state(SetId s) {
    auto it = sets_.find(s);
    if (it == sets_.end()) throw NotFoundError("unknown set " + id_str(s));
    return it->second;
}

const EmptinessStructure::SetState &EmptinessStructure::state(SetId s) const {
    auto it = sets_.find(s);
    if (it == sets_.end()) throw NotFoundError("unknown set " + id_str(s));
    return it->second;
}

void EmptinessStructure::add_set(SetId s) { sets_.try_emplace(s); }

void EmptinessStructure::remove_set_if_empty(SetId s) {
    auto it = sets_.find(s);
    if (it == sets_.end() || !it->second.members.empty()) return;
    if (it->second.slot != kNoSlot) leave_registry(it->second);
    sets_.erase(it);
}

std::size_t EmptinessStructure::size(SetId s) const { return state(s).members.size(); }

bool EmptinessStructure::contains(SetId s, ElementKey x) const {
    ++counters().membership_probes;
    return state(s).members.contains(x);
}

const std::unordered_set<ElementKey> &EmptinessStructure::members(SetId s) const { return state(s).members; }

SizeClass EmptinessStructure::size_class(SetId s) const { return state(s).cls; }

std::optional<std::uint32_t> EmptinessStructure::slot(SetId s) const {
    const auto &st = state(s);
    if (st.slot == kNoSlot) return std::nullopt;
    return st.slot;
}

std::optional<std::size_t> EmptinessStructure::large_intersection_size(SetId s1, SetId s2) const {
    const auto &a = state(s1);
    const auto &b = state(s2);
    if (a.cls != SizeClass::Large || b.cls != SizeClass::Large) return std::nullopt;
    if (s1 == s2) return a.members.size();
    if (b.slot >= a.table.size() || a.table[b.slot] == kUnknown) return std::nullopt;
    return static_cast<std::size_t>(a.table[b.slot]);
}

std::size_t EmptinessStructure::intersection_count(const SetState &a, const SetState &b) const {
    const auto &small = a.members.size() <= b.members.size() ? a : b;
    const auto &big = &small == &a ? b : a;
    std::size_t n = 0;
    for (ElementKey x : small.members) n += big.members.contains(x) ? 1 : 0;
    counters().membership_probes += small.members.size();
    return n;
}

void EmptinessStructure::set_entry(SetState &a, std::uint32_t slot_b, std::size_t value) {
    if (a.table.size() <= slot_b) a.table.resize(slot_b + 1, kUnknown);
    a.table[slot_b] = static_cast<std::int64_t>(value);
}

void EmptinessStructure::store_pair(SetState &a, SetState &b) {
    const std::size_t n = intersection_count(a, b);
    set_entry(a, b.slot, n);
    set_entry(b, a.slot, n);
}

void EmptinessStructure::adjust_pair(SetState &a, SetState &b, std::int64_t delta) {
    if (b.slot < a.table.size() && a.table[b.slot] != kUnknown) a.table[b.slot] += delta;
    if (opts_.fault_skip_reciprocal) return;
    if (a.slot < b.table.size() && b.table[a.slot] != kUnknown) b.table[a.slot] += delta;
}

void EmptinessStructure::enter_registry(SetId s, SetState &st) {
    std::uint32_t slot;
    if (!free_slots_.empty()) {
        slot = free_slots_.back();
        free_slots_.pop_back();
    } else {
        slot = static_cast<std::uint32_t>(slot_owner_.size());
        slot_owner_.emplace_back();
        slot_used_.push_back(false);
    }
    slot_owner_[slot] = s;
    slot_used_[slot] = true;
    ++registry_size_;
    st.slot = slot;
    st.cls = SizeClass::Medium;
    st.epoch = next_epoch();
    st.table.clear();
    st.pending.clear();
    st.cursor = 0;
}

void EmptinessStructure::leave_registry(SetState &st) {
    const std::uint32_t slot = st.slot;
    for (std::size_t i = 0; i < slot_owner_.size(); ++i) {
        if (!slot_used_[i] || i == slot) continue;
        auto &other = sets_.at(slot_owner_[i]);
        if (slot < other.table.size()) other.table[slot] = kUnknown;
    }
    slot_used_[slot] = false;
    free_slots_.push_back(slot);
    --registry_size_;
    st.slot = kNoSlot;
    st.cls = SizeClass::Small;
    st.table.clear();
    st.table.shrink_to_fit();
    st.pending.clear();
    st.cursor = 0;
}

void EmptinessStructure::catch_up(SetId s, SetState &st, std::size_t steps) {
    while (steps > 0 && st.cursor < st.pending.size()) {
        const auto [id, epoch] = st.pending[st.cursor++];
        auto it = sets_.find(id);
        // entries for sets that left the registry since the snapshot are dropped
        if (id == s || it == sets_.end() || it->second.slot == kNoSlot || it->second.epoch != epoch) continue;
        store_pair(st, it->second);
        ++counters().catchup_steps;
        --steps;
    }
}

void EmptinessStructure::after_insert(SetId s, SetState &st) {
    const double size = static_cast<double>(st.members.size());
    if (st.cls == SizeClass::Small) {
        if (size < small_threshold_) return;
        enter_registry(s, st);
        for (std::size_t i = 0; i < slot_owner_.size(); ++i) {
            if (slot_used_[i] && i != st.slot) st.pending.emplace_back(slot_owner_[i], sets_.at(slot_owner_[i]).epoch);
        }
    }
    if (st.cls == SizeClass::Medium) {
        if (size > large_threshold()) {
            if (st.cursor < st.pending.size()) ++forced_catchups_;
            catch_up(s, st, st.pending.size());
            st.pending.clear();
            st.cursor = 0;
            st.cls = SizeClass::Large;
            return;
        }
        const double quantum = 2.0 * static_cast<double>(st.pending.size()) / small_threshold_;
        catch_up(s, st, std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(quantum))));
    }
}

void EmptinessStructure::after_erase(SetState &st) {
    if (st.cls != SizeClass::Small && static_cast<double>(st.members.size()) < small_threshold_) {
        leave_registry(st);
    }
}

void EmptinessStructure::insert(SetId s, ElementKey x) {
    auto &st = sets_[s];
    ++counters().membership_probes;
    if (!st.members.insert(x).second) {
        throw DuplicateError("element " + std::to_string(x) + " already in set " + id_str(s));
    }
    ++total_;
    if (st.slot != kNoSlot) {
        for (std::size_t i = 0; i < slot_owner_.size(); ++i) {
            if (!slot_used_[i] || i == st.slot) continue;
            auto &other = sets_.at(slot_owner_[i]);
            ++counters().membership_probes;
            if (other.members.contains(x)) adjust_pair(st, other, +1);
        }
    }
    after_insert(s, st);
    maybe_rebuild();
}

void EmptinessStructure::erase(SetId s, ElementKey x) {
    auto &st = state(s);
    ++counters().membership_probes;
    if (st.members.erase(x) == 0) {
        throw NotFoundError("element " + std::to_string(x) + " not in set " + id_str(s));
    }
    --total_;
    if (st.slot != kNoSlot) {
        for (std::size_t i = 0; i < slot_owner_.size(); ++i) {
            if (!slot_used_[i] || i == st.slot) continue;
            auto &other = sets_.at(slot_owner_[i]);
            ++counters().membership_probes;
            if (other.members.contains(x)) adjust_pair(st, other, -1);
        }
    }
    after_erase(st);
    maybe_rebuild();
}

bool EmptinessStructure::disjoint(SetId s1, SetId s2) const {
    const auto &a = state(s1);
    const auto &b = state(s2);
    if (a.members.empty() || b.members.empty()) return true;
    if (s1 == s2) return false;
    if (a.cls == SizeClass::Large && b.cls == SizeClass::Large) {
        if (b.slot < a.table.size() && a.table[b.slot] != kUnknown) return a.table[b.slot] == 0;
    }
    const SetState *scan = &a;
    const SetState *probe = &b;
    if (a.cls == SizeClass::Large && b.cls != SizeClass::Large) {
        std::swap(scan, probe);
    } else if ((a.cls == SizeClass::Large) == (b.cls == SizeClass::Large) && b.members.size() < a.members.size()) {
        std::swap(scan, probe);
    }
    auto &ctr = counters();
    for (ElementKey x : scan->members) {
        ++ctr.membership_probes;
        if (probe->members.contains(x)) return false;
    }
    return true;
}

void EmptinessStructure::maybe_rebuild() {
    if (total_ > 2 * anchor_ || (2 * total_ < anchor_ && anchor_ > opts_.min_anchor)) rebuild();
}

void EmptinessStructure::rebuild() { rebuild_with_anchor(nearest_power_of_two(total_, opts_.min_anchor)); }

void EmptinessStructure::rebuild_with_anchor(std::size_t anchor) {
    anchor_ = anchor;
    recompute_thresholds();
    slot_owner_.clear();
    slot_used_.clear();
    free_slots_.clear();
    registry_size_ = 0;

    std::vector<SetId> ids;
    ids.reserve(sets_.size());
    for (const auto &[id, st] : sets_) ids.push_back(id);
    std::sort(ids.begin(), ids.end());

    std::vector<SetState *> registered;
    for (SetId id : ids) {
        auto &st = sets_.at(id);
        st.slot = kNoSlot;
        st.cls = SizeClass::Small;
        st.table.clear();
        st.pending.clear();
        st.cursor = 0;
        const double size = static_cast<double>(st.members.size());
        if (size < small_threshold_) continue;
        enter_registry(id, st);
        st.cls = size > large_threshold() ? SizeClass::Large : SizeClass::Medium;
        registered.push_back(&st);
    }
    for (std::size_t i = 0; i < registered.size(); ++i) {
        for (std::size_t j = i + 1; j < registered.size(); ++j) store_pair(*registered[i], *registered[j]);
    }
    ++rebuilds_;
}

void EmptinessStructure::assign(const std::vector<std::pair<SetId, std::vector<ElementKey>>> &content) {
    sets_.clear();
    total_ = 0;
    for (const auto &[id, elems] : content) {
        auto &st = sets_[id];
        for (ElementKey x : elems) {
            if (!st.members.insert(x).second) {
                throw DuplicateError("element " + std::to_string(x) + " repeated in set " + id_str(id));
            }
        }
        total_ += elems.size();
    }
    rebuild_with_anchor(nearest_power_of_two(total_, opts_.min_anchor));
}

EmptinessSnapshot EmptinessStructure::snapshot() const {
    EmptinessSnapshot snap;
    snap.anchor = anchor_;
    snap.total = total_;
    snap.space_budget = budget_;
    snap.registry_size = registry_size_;
    snap.rebuilds = rebuilds_;
    for (const auto &[id, st] : sets_) {
        EmptinessSnapshot::SetEntry e;
        e.id = id;
        e.size = st.members.size();
        e.size_class = st.cls;
        if (st.slot != kNoSlot) e.slot = st.slot;
        for (std::size_t i = 0; i < st.table.size(); ++i) {
            if (st.table[i] != kUnknown) e.table.emplace_back(static_cast<std::uint32_t>(i), st.table[i]);
        }
        e.pending_catchup = st.pending.size() - st.cursor;
        snap.sets.push_back(std::move(e));
    }
    std::sort(snap.sets.begin(), snap.sets.end(), [](const auto &x, const auto &y) { return x.id < y.id; });
    return snap;
}

std::vector<std::string> EmptinessStructure::audit() const {
    std::vector<std::string> problems;
    std::size_t registered = 0;
    for (const auto &[id, st] : sets_) {
        const double size = static_cast<double>(st.members.size());
        const bool in_registry = st.slot != kNoSlot;
        registered += in_registry ? 1 : 0;
        if (in_registry != (st.cls != SizeClass::Small)) problems.push_back("set " + id_str(id) + ": slot/class mismatch");
        if (st.cls == SizeClass::Small && size >= small_threshold_) problems.push_back("set " + id_str(id) + ": small but above threshold");
        if (st.cls != SizeClass::Small && size < small_threshold_) problems.push_back("set " + id_str(id) + ": registered but below threshold");
        if (st.cls == SizeClass::Medium && size > large_threshold()) problems.push_back("set " + id_str(id) + ": medium above large threshold");
        if (in_registry && (st.slot >= slot_owner_.size() || !slot_used_[st.slot] || slot_owner_[st.slot] != id)) {
            problems.push_back("set " + id_str(id) + ": slot not owned");
        }
    }
    if (registered != registry_size_) problems.push_back("registry size mismatch");

    for (std::size_t i = 0; i < slot_owner_.size(); ++i) {
        if (!slot_used_[i]) continue;
        const auto &a = sets_.at(slot_owner_[i]);
        for (std::size_t j = 0; j < slot_owner_.size(); ++j) {
            if (i == j) continue;
            const bool live = slot_used_[j];
            const bool known = j < a.table.size() && a.table[j] != kUnknown;
            if (!live) {
                if (known) problems.push_back("stale entry for freed slot " + std::to_string(j));
                continue;
            }
            const auto &b = sets_.at(slot_owner_[j]);
            if (a.cls == SizeClass::Large && b.cls == SizeClass::Large && !known) {
                problems.push_back("large pair " + id_str(slot_owner_[i]) + "," + id_str(slot_owner_[j]) +
                                   " has no table entry");
            }
            if (known) {
                const auto &small = a.members.size() <= b.members.size() ? a.members : b.members;
                const auto &big = &small == &a.members ? b.members : a.members;
                std::size_t exact = 0;
                for (ElementKey x : small) exact += big.contains(x) ? 1 : 0;
                if (static_cast<std::size_t>(a.table[j]) != exact) {
                    problems.push_back("T[" + id_str(slot_owner_[i]) + "][" + id_str(slot_owner_[j]) +
                                       "] = " + std::to_string(a.table[j]) + ", expected " + std::to_string(exact));
                }
            }
        }
    }
    return problems;
}

}  // namespace setix
