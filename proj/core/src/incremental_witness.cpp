#include "setix/incremental_witness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "setix/counters.hpp"
#include "setix/errors.hpp"

namespace setix {

unsigned default_tau(unsigned word_bits) noexcept {
    const double lg = std::log2(static_cast<double>(word_bits));
    const double t = std::round(static_cast<double>(word_bits) / (lg * lg));
    return t < 1 ? 1u : static_cast<unsigned>(t);
}

namespace {

// smallest k >= 1 with k*k*den >= num
std::size_t ceil_sqrt_ratio(std::size_t num, std::size_t den) {
    std::size_t k = static_cast<std::size_t>(std::sqrt(static_cast<double>(num) / static_cast<double>(den)));
    while (k > 0 && (k - 1) * (k - 1) * den >= num) --k;
    while (k * k * den < num) ++k;
    return std::max<std::size_t>(1, k);
}

// largest k with k*k <= n
std::size_t floor_sqrt(std::size_t n) {
    std::size_t k = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    while (k * k > n) --k;
    while ((k + 1) * (k + 1) <= n) ++k;
    return k;
}

std::string id_str(SetId s) { return std::to_string(to_underlying(s)); }

}  // namespace

WitnessStructure::WitnessStructure(const WitnessOptions &opts)
    : opts_(opts), tau_(opts.tau ? opts.tau : default_tau()), seeds_(opts.seed), anchor_(opts.min_anchor) {
    if (opts_.min_anchor == 0) throw UsageError("minimum anchor must be positive");
    recompute_thresholds();
    stashes_ = std::make_unique<PackedFamily>(large_threshold_ + 1, seeds_.next());
}

void WitnessStructure::recompute_thresholds() {
    table_threshold_ = ceil_sqrt_ratio(anchor_, 2 * std::size_t{tau_});
    medium_threshold_ = ceil_sqrt_ratio(anchor_, tau_);
    large_threshold_ = std::max<std::size_t>(1, floor_sqrt(anchor_ * tau_));
}

WitnessStructure::SetState &WitnessStructure::state(SetId s) {
    auto it = sets_.find(s);
    if (it == sets_.end()) throw NotFoundError("unknown set " + id_str(s));
    return it->second;
}

const WitnessStructure::SetState &WitnessStructure::state(SetId s) const {
    auto it = sets_.find(s);
    if (it == sets_.end()) throw NotFoundError("unknown set " + id_str(s));
    return it->second;
}

void WitnessStructure::add_set(SetId s) { sets_.try_emplace(s); }

std::size_t WitnessStructure::size(SetId s) const { return state(s).members.size(); }

bool WitnessStructure::contains(SetId s, ElementKey x) const {
    ++counters().membership_probes;
    return state(s).members.contains(x);
}

SizeClass WitnessStructure::size_class(SetId s) const { return state(s).cls; }
std::size_t WitnessStructure::stash_size(SetId s) const { return state(s).stash.size(); }
std::size_t WitnessStructure::primary_size(SetId s) const { return state(s).primary.size(); }

WitnessStructure::Entry &WitnessStructure::entry(SetState &st, std::uint32_t slot) {
    if (st.table.size() <= slot) st.table.resize(large_owner_.size());
    return st.table[slot];
}

const WitnessStructure::Entry *WitnessStructure::find_entry(const SetState &st, std::uint32_t slot) {
    return slot < st.table.size() ? &st.table[slot] : nullptr;
}

void WitnessStructure::write_entry(SetState &st, std::uint32_t slot, std::optional<ElementKey> value) {
    Entry &e = entry(st, slot);
    if (e.state == WitnessEntryState::Set) return;  // write-once
    if (auto it = st.retired.find(large_owner_[slot]); it != st.retired.end()) {
        value = it->second;
        st.retired.erase(it);
    }
    if (value) {
        e = {WitnessEntryState::Set, *value};
    } else {
        e.state = WitnessEntryState::Null;
    }
}

std::optional<ElementKey> WitnessStructure::scan_witness(const std::unordered_set<ElementKey> &a,
                                                         const std::unordered_set<ElementKey> &b) const {
    const auto &small = a.size() <= b.size() ? a : b;
    const auto &big = &small == &a ? b : a;
    auto &ctr = counters();
    for (ElementKey x : small) {
        ++ctr.membership_probes;
        if (big.contains(x)) return x;
    }
    return std::nullopt;
}

void WitnessStructure::start_table(SetState &st) {
    st.tabled = true;
    st.table.assign(large_owner_.size(), Entry{});
    st.pending = large_owner_;
    st.cursor = 0;
}

void WitnessStructure::catch_up(SetState &st, std::size_t steps) {
    while (steps > 0 && st.cursor < st.pending.size()) {
        const SetId id = st.pending[st.cursor++];
        const SetState &other = sets_.at(id);
        if (&other == &st) continue;
        if (entry(st, other.slot).state != WitnessEntryState::Unset) continue;
        write_entry(st, other.slot, scan_witness(st.members, other.primary));
        ++counters().catchup_steps;
        --steps;
    }
}

void WitnessStructure::finish_table(SetState &st) {
    if (st.cursor < st.pending.size()) {
        ++forced_catchups_;
        catch_up(st, st.pending.size());
    }
    st.pending.clear();
    st.pending.shrink_to_fit();
    st.cursor = 0;
}

void WitnessStructure::become_medium(SetId s, SetState &st) {
    finish_table(st);
    st.cls = SizeClass::Medium;
    stashes_->add_set(s);
    st.stash.assign(st.members.begin(), st.members.end());
    for (ElementKey e : st.stash) stashes_->insert(s, e);
}

void WitnessStructure::become_large(SetId s, SetState &st, ElementKey newest) {
    finish_table(st);
    const bool had_stash = st.cls == SizeClass::Medium;
    const std::uint32_t slot = take_slot(s);
    st.slot = slot;
    // every table gains a column for the new large set, whose primary part is all of s
    for (auto &[id, other] : sets_) {
        if (id == s || !other.tabled) continue;
        std::optional<ElementKey> w;
        if (had_stash && other.cls == SizeClass::Medium) {
            w = stashes_->intersect_witness(id, s);
            ++counters().membership_probes;
            if (!w && other.members.contains(newest)) w = newest;
        } else {
            w = scan_witness(other.members, st.members);
        }
        write_entry(other, slot, w);
    }
    stashes_->remove_set(s);
    stashes_->add_set(s);
    st.primary = st.members;
    st.stash.clear();
    st.cls = SizeClass::Large;
}

void WitnessStructure::dump_stash(SetId s, SetState &st) {
    ++dumps_;
    auto &ctr = counters();
    for (auto &[id, other] : sets_) {
        if (id == s || !other.tabled) continue;
        if (entry(other, st.slot).state != WitnessEntryState::Null) continue;
        std::optional<ElementKey> w;
        if (other.cls == SizeClass::Medium) {
            w = stashes_->intersect_witness(id, s);
        } else {
            for (ElementKey x : st.stash) {
                ++ctr.dump_probes;
                if (other.members.contains(x)) {
                    w = x;
                    break;
                }
            }
        }
        if (w) write_entry(other, st.slot, w);
    }
    st.primary.insert(st.stash.begin(), st.stash.end());
    st.stash.clear();
    stashes_->remove_set(s);
    stashes_->add_set(s);
}

void WitnessStructure::refresh_against_large(SetState &st, SetId s, ElementKey x) {
    auto &ctr = counters();
    for (std::uint32_t i = 0; i < large_owner_.size(); ++i) {
        if (large_owner_[i] == s) continue;
        if (entry(st, i).state != WitnessEntryState::Null) continue;
        ++ctr.membership_probes;
        if (sets_.at(large_owner_[i]).primary.contains(x)) write_entry(st, i, x);
    }
}

std::uint32_t WitnessStructure::take_slot(SetId s) {
    large_owner_.push_back(s);
    ++large_count_;
    return static_cast<std::uint32_t>(large_owner_.size() - 1);
}

void WitnessStructure::insert(SetId s, ElementKey x) {
    auto &st = sets_[s];
    ++counters().membership_probes;
    if (!st.members.insert(x).second) {
        throw DuplicateError("element " + std::to_string(x) + " already in set " + id_str(s));
    }
    ++total_;
    const std::size_t n = st.members.size();
    if (st.tabled) refresh_against_large(st, s, x);

    switch (st.cls) {
        case SizeClass::Small:
            if (!st.tabled && n >= table_threshold_) start_table(st);
            if (!st.tabled) break;
            if (n > large_threshold_) {
                become_large(s, st, x);
            } else if (n >= medium_threshold_) {
                become_medium(s, st);
            } else {
                const std::size_t window = std::max<std::size_t>(1, medium_threshold_ - table_threshold_);
                catch_up(st, std::max<std::size_t>(1, (2 * st.pending.size() + window - 1) / window));
            }
            break;
        case SizeClass::Medium:
            if (n > large_threshold_) {
                become_large(s, st, x);
            } else {
                stashes_->insert(s, x);
                st.stash.push_back(x);
            }
            break;
        case SizeClass::Large:
            stashes_->insert(s, x);
            st.stash.push_back(x);
            if (st.stash.size() >= large_threshold_) dump_stash(s, st);
            break;
    }
    if (total_ > 2 * anchor_) rebuild(nearest_power_of_two(total_, opts_.min_anchor));
}

std::optional<ElementKey> WitnessStructure::witness(SetId s1, SetId s2) const {
    const SetState &a = state(s1);
    const SetState &b = state(s2);
    if (a.members.empty() || b.members.empty()) return std::nullopt;
    if (s1 == s2) return *a.members.begin();

    if (a.cls == SizeClass::Small || b.cls == SizeClass::Small) {
        const SetState &scan = (a.cls == SizeClass::Small && (b.cls != SizeClass::Small || a.members.size() <= b.members.size())) ? a : b;
        const SetState &other = &scan == &a ? b : a;
        auto &ctr = counters();
        for (ElementKey x : scan.members) {
            ++ctr.membership_probes;
            if (other.members.contains(x)) return x;
        }
        return std::nullopt;
    }

    // b ∩ primary(a), then a ∩ primary(b), then stash ∩ stash
    for (const auto &[large, other] : {std::pair{&a, &b}, std::pair{&b, &a}}) {
        if (large->cls != SizeClass::Large) continue;
        const Entry *e = find_entry(*other, large->slot);
        if (e == nullptr || e->state == WitnessEntryState::Unset) {
            ++table_misses_;
            return scan_witness(a.members, b.members);
        }
        if (e->state == WitnessEntryState::Set) return e->value;
    }
    if (!stashes_->has_set(s1) || !stashes_->has_set(s2)) return std::nullopt;
    return stashes_->intersect_witness(s1, s2);
}

void WitnessStructure::rebuild(std::size_t anchor) {
    // remember established witnesses so rebuilding never rewrites them
    std::unordered_map<SetId, std::vector<std::pair<SetId, ElementKey>>> kept;
    for (const auto &[id, st] : sets_) {
        for (std::uint32_t i = 0; i < st.table.size(); ++i) {
            if (st.table[i].state == WitnessEntryState::Set) kept[id].emplace_back(large_owner_[i], st.table[i].value);
        }
    }

    anchor_ = anchor;
    recompute_thresholds();
    stashes_ = std::make_unique<PackedFamily>(large_threshold_ + 1, seeds_.next());
    large_owner_.clear();
    large_count_ = 0;

    std::vector<SetId> ids;
    ids.reserve(sets_.size());
    for (const auto &[id, st] : sets_) ids.push_back(id);
    std::sort(ids.begin(), ids.end());

    for (SetId id : ids) {
        auto &st = sets_.at(id);
        const std::size_t n = st.members.size();
        const bool was_large = st.cls == SizeClass::Large;
        st.primary.clear();
        st.stash.clear();
        st.slot = kNoSlot;
        st.pending.clear();
        st.cursor = 0;
        st.table.clear();
        st.tabled = n >= table_threshold_;
        // large sets keep their class while they stay above the medium threshold
        if (n > large_threshold_ || (was_large && n >= medium_threshold_)) {
            st.cls = SizeClass::Large;
            st.slot = take_slot(id);
            st.primary = st.members;
            st.tabled = true;
            stashes_->add_set(id);
        } else if (n >= medium_threshold_) {
            st.cls = SizeClass::Medium;
            st.tabled = true;
            stashes_->add_set(id);
            st.stash.assign(st.members.begin(), st.members.end());
            for (ElementKey e : st.stash) stashes_->insert(id, e);
        } else {
            st.cls = SizeClass::Small;
        }
    }

    for (SetId id : ids) {
        auto &st = sets_.at(id);
        std::vector<std::pair<SetId, ElementKey>> restore;
        if (auto it = kept.find(id); it != kept.end()) {
            for (const auto &[large, value] : it->second) {
                const auto &other = sets_.at(large);
                if (st.tabled && other.cls == SizeClass::Large) {
                    restore.emplace_back(large, value);
                } else {
                    st.retired.emplace(large, value);
                }
            }
        }
        if (!st.tabled) continue;
        st.table.assign(large_owner_.size(), Entry{});
        for (const auto &[large, value] : restore) st.table[sets_.at(large).slot] = {WitnessEntryState::Set, value};
        for (std::uint32_t i = 0; i < large_owner_.size(); ++i) {
            if (large_owner_[i] == id || st.table[i].state == WitnessEntryState::Set) continue;
            write_entry(st, i, scan_witness(st.members, sets_.at(large_owner_[i]).primary));
        }
    }
    ++rebuilds_;
}

WitnessSnapshot WitnessStructure::snapshot() const {
    WitnessSnapshot snap;
    snap.anchor = anchor_;
    snap.total = total_;
    snap.rebuilds = rebuilds_;
    snap.dumps = dumps_;
    for (const auto &[id, st] : sets_) {
        WitnessSnapshot::SetEntry e;
        e.id = id;
        e.size = st.members.size();
        e.size_class = st.cls;
        e.stash = st.stash.size();
        e.primary = st.primary.size();
        if (st.slot != kNoSlot) e.slot = st.slot;
        e.tabled = st.tabled;
        if (st.tabled) {
            for (std::uint32_t i = 0; i < large_owner_.size(); ++i) {
                if (large_owner_[i] == id) continue;
                const Entry *en = find_entry(st, i);
                e.table.push_back({large_owner_[i], en ? en->state : WitnessEntryState::Unset, en ? en->value : 0});
            }
        }
        snap.sets.push_back(std::move(e));
    }
    std::sort(snap.sets.begin(), snap.sets.end(), [](const auto &x, const auto &y) { return x.id < y.id; });
    return snap;
}

std::vector<std::string> WitnessStructure::audit() const {
    std::vector<std::string> problems;
    auto complain = [&](SetId id, const std::string &what) { problems.push_back("set " + id_str(id) + ": " + what); };
    for (const auto &[id, st] : sets_) {
        const std::size_t n = st.members.size();
        switch (st.cls) {
            case SizeClass::Small:
                if (n >= medium_threshold_) complain(id, "small at or above the medium threshold");
                if (!st.stash.empty() || !st.primary.empty()) complain(id, "small set with stash or primary");
                if (st.tabled != (n >= table_threshold_)) complain(id, "table presence disagrees with size");
                break;
            case SizeClass::Medium:
                if (n < medium_threshold_ || n > large_threshold_) complain(id, "medium size out of range");
                if (st.stash.size() != n || !st.primary.empty()) complain(id, "medium stash is not the whole set");
                break;
            case SizeClass::Large:
                if (n < medium_threshold_) complain(id, "large below the medium threshold");
                if (st.stash.size() >= large_threshold_) complain(id, "stash at capacity");
                if (st.stash.size() + st.primary.size() != n) complain(id, "stash and primary do not cover the set");
                for (ElementKey x : st.stash) {
                    if (st.primary.contains(x)) complain(id, "element in both stash and primary");
                }
                if (st.slot >= large_owner_.size() || large_owner_[st.slot] != id) complain(id, "slot not owned");
                break;
        }
        if (st.cls != SizeClass::Small) {
            if (!st.tabled) complain(id, "missing witness table");
            if (!stashes_->has_set(id) || stashes_->size(id) != st.stash.size()) complain(id, "packed stash out of sync");
        }
        if (!st.tabled) continue;
        for (std::uint32_t i = 0; i < large_owner_.size(); ++i) {
            if (large_owner_[i] == id) continue;
            const auto &large = sets_.at(large_owner_[i]);
            const Entry *e = find_entry(st, i);
            const auto state = e ? e->state : WitnessEntryState::Unset;
            const std::string col = "P[" + id_str(large_owner_[i]) + "]";
            if (state == WitnessEntryState::Unset) {
                if (st.cls != SizeClass::Small) complain(id, col + " not computed");
            } else if (state == WitnessEntryState::Set) {
                if (!st.members.contains(e->value) || !large.primary.contains(e->value)) complain(id, col + " is not a witness");
            } else {
                for (ElementKey x : st.members) {
                    if (large.primary.contains(x)) {
                        complain(id, col + " null but intersection nonempty");
                        break;
                    }
                }
            }
        }
    }
    return problems;
}

}  // namespace setix
