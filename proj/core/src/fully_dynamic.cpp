#include "setix/fully_dynamic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "setix/counters.hpp"
#include "setix/errors.hpp"

namespace setix {

namespace {

std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::string id_str(SetId s) { return std::to_string(to_underlying(s)); }

}  // namespace

KeyPermutation::KeyPermutation(std::uint64_t n, std::uint64_t seed) : n_(n) {
    if (n == 0) throw UsageError("permutation over an empty range");
    const unsigned bits = std::max(2u, static_cast<unsigned>(std::bit_width(n - 1)));
    half_bits_ = (bits + 1) / 2;
    half_mask_ = (std::uint64_t{1} << half_bits_) - 1;
    SeedStream seeds(seed);
    for (auto &k : keys_) k = seeds.next();
}

std::uint64_t KeyPermutation::round_trip(std::uint64_t x) const noexcept {
    std::uint64_t l = x >> half_bits_;
    std::uint64_t r = x & half_mask_;
    for (std::uint64_t k : keys_) {
        const std::uint64_t f = mix64(r ^ k) & half_mask_;
        l = std::exchange(r, l ^ f);
    }
    return (l << half_bits_) | r;
}

std::uint64_t KeyPermutation::operator()(std::uint64_t x) const {
    if (x >= n_) throw RangeError("key " + std::to_string(x) + " outside permutation range");
    do {
        x = round_trip(x);
    } while (x >= n_);
    return x;
}

UniverseMap::UniverseMap(std::uint64_t range, std::uint64_t seed) : range_(range), perm_(range, seed), ext_of_(range) {}

std::optional<std::uint64_t> UniverseMap::find(ElementKey ext) const {
    auto it = map_.find(ext);
    if (it == map_.end()) return std::nullopt;
    return it->second.key;
}

std::uint64_t UniverseMap::acquire(ElementKey ext) {
    auto it = map_.find(ext);
    if (it != map_.end()) {
        ++it->second.refs;
        return it->second.key;
    }
    if (full()) throw CapacityError("universe map exhausted");
    const std::uint64_t key = perm_(next_raw_++);
    map_.emplace(ext, Slot{key, 1});
    ext_of_[key] = ext;
    return key;
}

void UniverseMap::release(ElementKey ext) {
    auto it = map_.find(ext);
    if (it == map_.end()) throw NotFoundError("element " + std::to_string(ext) + " has no key");
    if (--it->second.refs == 0) map_.erase(it);
}

struct IntersectionTree::Vertex {
    explicit Vertex(const EmptinessOptions &o) : es(o) {}

    EmptinessStructure es;
    std::unordered_map<SetPair, Shortcut, SetPairHash> shortcuts;
    std::unordered_map<SetId, std::unordered_set<SetId>> partners;
};

IntersectionTree::IntersectionTree(std::size_t space_budget, std::uint64_t seed)
    : IntersectionTree(FullyDynamicOptions{.space_budget = space_budget, .seed = seed}) {}

IntersectionTree::IntersectionTree(const FullyDynamicOptions &opts) : opts_(opts), seeds_(opts.seed) {
    if (opts_.space_budget == 0) throw UsageError("intersection tree needs a positive space budget");
    if (opts_.min_anchor < 2 || !std::has_single_bit(opts_.min_anchor)) {
        throw UsageError("minimum anchor must be a power of two >= 2");
    }
    set_anchor(opts_.min_anchor);
}

IntersectionTree::~IntersectionTree() = default;
IntersectionTree::IntersectionTree(IntersectionTree &&) noexcept = default;
IntersectionTree &IntersectionTree::operator=(IntersectionTree &&) noexcept = default;

void IntersectionTree::set_anchor(std::size_t anchor) {
    anchor_ = anchor;
    const double levels = std::log2(static_cast<double>(anchor_));
    internal_budget_ = std::max(1.0, static_cast<double>(opts_.space_budget) / levels);
    ratio_ = internal_budget_ / static_cast<double>(anchor_);
    universe_ = std::make_unique<UniverseMap>(2 * anchor_, seeds_.next());
    vertices_.clear();
    vertices_.resize(2 * anchor_);
}

std::size_t IntersectionTree::height() const noexcept { return static_cast<std::size_t>(std::countr_zero(anchor_)) + 1; }

std::size_t IntersectionTree::vertex_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(vertices_.begin(), vertices_.end(), [](const auto &v) { return v != nullptr; }));
}

IntersectionTree::Vertex *IntersectionTree::vertex(std::size_t i) const noexcept {
    return i < vertices_.size() ? vertices_[i].get() : nullptr;
}

IntersectionTree::Vertex &IntersectionTree::ensure_vertex(std::size_t i) {
    if (!vertices_[i]) {
        vertices_[i] = std::make_unique<Vertex>(EmptinessOptions{.budget_per_anchor = ratio_, .min_anchor = 2});
    }
    return *vertices_[i];
}

void IntersectionTree::add_set(SetId s) { sizes_.try_emplace(s, 0); }

std::size_t IntersectionTree::size(SetId s) const {
    auto it = sizes_.find(s);
    if (it == sizes_.end()) throw NotFoundError("unknown set " + id_str(s));
    return it->second;
}

bool IntersectionTree::contains(SetId s, ElementKey x) const {
    if (!has_set(s)) throw NotFoundError("unknown set " + id_str(s));
    const auto key = universe_->find(x);
    const Vertex *root = vertex(1);
    if (!key || !root || !root->es.has_set(s)) return false;
    return root->es.contains(s, *key);
}

bool IntersectionTree::both_large(const Vertex &v, SetId a, SetId b) const {
    return v.es.has_set(a) && v.es.has_set(b) && v.es.is_large(a) && v.es.is_large(b);
}

bool IntersectionTree::nonempty_at(std::size_t i, SetId a, SetId b) const {
    const Vertex *v = vertex(i);
    if (!v || !v->es.has_set(a) || !v->es.has_set(b)) return false;
    if (auto n = v->es.large_intersection_size(a, b)) return *n > 0;
    return !v->es.disjoint(a, b);
}

std::uint32_t IntersectionTree::target(std::size_t i, int side, SetId a, SetId b) const {
    const std::size_t c = 2 * i + static_cast<std::size_t>(side);
    if (!nonempty_at(c, a, b)) return 0;
    const Vertex &vc = *vertex(c);
    if (is_leaf(c) || !both_large(vc, a, b)) return static_cast<std::uint32_t>(c);
    const bool l = nonempty_at(2 * c, a, b);
    const bool r = nonempty_at(2 * c + 1, a, b);
    if (l && r) return static_cast<std::uint32_t>(c);
    auto it = vc.shortcuts.find(SetPair::of(a, b));
    if (it == vc.shortcuts.end()) return static_cast<std::uint32_t>(c);
    return l ? it->second.left : it->second.right;
}

void IntersectionTree::compute_pair(std::size_t i, SetId a, SetId b) {
    Vertex &v = *vertex(i);
    const SetPair key = SetPair::of(a, b);
    if (both_large(v, a, b) && nonempty_at(i, a, b)) {
        Shortcut sc;
        if (!is_leaf(i)) sc = {target(i, 0, a, b), target(i, 1, a, b)};
        v.shortcuts[key] = sc;
        v.partners[a].insert(b);
        v.partners[b].insert(a);
    } else if (v.shortcuts.erase(key) > 0) {
        v.partners[a].erase(b);
        v.partners[b].erase(a);
    }
}

void IntersectionTree::drop_pairs_of(Vertex &v, SetId s) {
    auto it = v.partners.find(s);
    if (it == v.partners.end()) return;
    for (SetId other : it->second) {
        v.shortcuts.erase(SetPair::of(s, other));
        v.partners[other].erase(s);
    }
    v.partners.erase(s);
}

void IntersectionTree::recompute_all(std::size_t i) {
    Vertex &v = *vertex(i);
    v.shortcuts.clear();
    v.partners.clear();
    std::vector<SetId> large;
    v.es.for_each_large([&](SetId s) { large.push_back(s); });
    std::sort(large.begin(), large.end());
    for (std::size_t x = 0; x < large.size(); ++x) {
        for (std::size_t y = x + 1; y < large.size(); ++y) compute_pair(i, large[x], large[y]);
    }
}

void IntersectionTree::repair_path(std::size_t leaf, SetId s, const std::vector<bool> &rebuilt) {
    bool full = false;
    for (std::size_t i = leaf, depth = 0; i >= 1; i /= 2, ++depth) {
        Vertex *v = vertex(i);
        full = full || rebuilt[depth];
        if (!v) continue;
        if (full) {
            recompute_all(i);
            continue;
        }
        drop_pairs_of(*v, s);
        if (!v->es.has_set(s) || !v->es.is_large(s)) continue;
        std::vector<SetId> large;
        v->es.for_each_large([&](SetId o) {
            if (o != s) large.push_back(o);
        });
        for (SetId o : large) compute_pair(i, s, o);
    }
}

void IntersectionTree::insert(SetId s, ElementKey x) {
    const auto existing = universe_->find(x);
    if (existing) {
        const Vertex *root = vertex(1);
        if (root && root->es.has_set(s) && root->es.members(s).contains(*existing)) {
            throw DuplicateError("element " + std::to_string(x) + " already in set " + id_str(s));
        }
    } else if (universe_->full()) {
        rebuild_with(anchor_);
    }
    const std::uint64_t key = universe_->acquire(x);
    const std::size_t leaf = leaf_of(key);
    std::vector<bool> rebuilt;
    for (std::size_t i = leaf; i >= 1; i /= 2) {
        Vertex &v = ensure_vertex(i);
        const std::size_t before = v.es.rebuild_count();
        v.es.insert(s, key);
        rebuilt.push_back(v.es.rebuild_count() != before);
    }
    ++sizes_[s];
    ++total_;
    repair_path(leaf, s, rebuilt);
    if (total_ > 2 * anchor_) rebuild();
}

void IntersectionTree::erase(SetId s, ElementKey x) {
    auto size_it = sizes_.find(s);
    if (size_it == sizes_.end()) throw NotFoundError("unknown set " + id_str(s));
    const auto key = universe_->find(x);
    const Vertex *root = vertex(1);
    if (!key || !root || !root->es.has_set(s) || !root->es.members(s).contains(*key)) {
        throw NotFoundError("element " + std::to_string(x) + " not in set " + id_str(s));
    }
    const std::size_t leaf = leaf_of(*key);
    std::vector<bool> rebuilt;
    for (std::size_t i = leaf; i >= 1; i /= 2) {
        Vertex &v = *vertices_[i];
        const std::size_t before = v.es.rebuild_count();
        v.es.erase(s, *key);
        v.es.remove_set_if_empty(s);
        rebuilt.push_back(v.es.rebuild_count() != before);
        if (v.es.total_size() == 0) vertices_[i].reset();
    }
    universe_->release(x);
    --size_it->second;
    --total_;
    repair_path(leaf, s, rebuilt);
    if (2 * total_ < anchor_ && anchor_ > opts_.min_anchor) rebuild();
}

void IntersectionTree::rebuild() {
    std::size_t anchor = nearest_power_of_two(total_, opts_.min_anchor);
    rebuild_with(anchor);
}

void IntersectionTree::rebuild_with(std::size_t anchor) {
    // gather the content under external names
    std::vector<std::pair<SetId, std::vector<ElementKey>>> content;
    std::vector<ElementKey> distinct;
    if (const Vertex *root = vertex(1)) {
        std::vector<SetId> ids;
        for (const auto &[id, n] : sizes_) {
            if (n > 0) ids.push_back(id);
        }
        std::sort(ids.begin(), ids.end());
        for (SetId id : ids) {
            std::vector<ElementKey> elems;
            for (std::uint64_t k : root->es.members(id)) elems.push_back(universe_->external(k));
            std::sort(elems.begin(), elems.end());
            distinct.insert(distinct.end(), elems.begin(), elems.end());
            content.emplace_back(id, std::move(elems));
        }
    }
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    // leave room for at least one fresh key
    while (2 * anchor < distinct.size() + 1) anchor *= 2;

    set_anchor(anchor);
    for (ElementKey e : distinct) universe_->acquire(e);

    std::unordered_map<std::size_t, std::vector<std::pair<SetId, std::vector<ElementKey>>>> per_vertex;
    for (const auto &[id, elems] : content) {
        for (ElementKey e : elems) {
            const std::uint64_t key = *universe_->find(e);
            for (std::size_t i = leaf_of(key); i >= 1; i /= 2) {
                auto &sets = per_vertex[i];
                if (sets.empty() || sets.back().first != id) sets.emplace_back(id, std::vector<ElementKey>{});
                sets.back().second.push_back(key);
            }
        }
    }
    // reference counts: one per occurrence
    for (const auto &[id, elems] : content) {
        for (ElementKey e : elems) universe_->acquire(e);
    }
    for (ElementKey e : distinct) universe_->release(e);

    std::vector<std::size_t> order;
    order.reserve(per_vertex.size());
    for (auto &[i, sets] : per_vertex) {
        ensure_vertex(i).es.assign(sets);
        order.push_back(i);
    }
    std::sort(order.rbegin(), order.rend());  // children before parents
    for (std::size_t i : order) recompute_all(i);
    ++rebuilds_;
}

std::optional<ElementKey> IntersectionTree::scan(const Vertex &v, SetId a, SetId b, bool first_only,
                                                 std::vector<ElementKey> *out) const {
    const auto &ma = v.es.members(a);
    const auto &mb = v.es.members(b);
    const auto &small = ma.size() <= mb.size() ? ma : mb;
    const auto &big = &small == &ma ? mb : ma;
    auto &ctr = counters();
    for (std::uint64_t k : small) {
        ++ctr.membership_probes;
        if (!big.contains(k)) continue;
        if (first_only) return universe_->external(k);
        out->push_back(universe_->external(k));
    }
    return std::nullopt;
}

void IntersectionTree::collect(std::size_t i, SetId a, SetId b, std::vector<ElementKey> &out,
                               ReportTrace *trace) const {
    const Vertex &v = *vertex(i);
    if (!v.es.has_set(a) || !v.es.has_set(b)) return;
    if (is_leaf(i) || !both_large(v, a, b)) {
        if (trace) ++trace->type2;
        scan(v, a, b, false, &out);
        return;
    }
    auto it = v.shortcuts.find(SetPair::of(a, b));
    if (it == v.shortcuts.end()) return;  // both large and disjoint here
    if (trace) ++trace->type1;
    if (it->second.left) collect(it->second.left, a, b, out, trace);
    if (it->second.right) collect(it->second.right, a, b, out, trace);
}

std::vector<ElementKey> IntersectionTree::report(SetId s1, SetId s2, ReportTrace *trace) const {
    if (!has_set(s1)) throw NotFoundError("unknown set " + id_str(s1));
    if (!has_set(s2)) throw NotFoundError("unknown set " + id_str(s2));
    std::vector<ElementKey> out;
    const Vertex *root = vertex(1);
    if (!root || !root->es.has_set(s1) || !root->es.has_set(s2)) return out;
    if (s1 == s2) {
        for (std::uint64_t k : root->es.members(s1)) out.push_back(universe_->external(k));
        return out;
    }
    collect(1, s1, s2, out, trace);
    return out;
}

std::optional<ElementKey> IntersectionTree::witness(SetId s1, SetId s2, ReportTrace *trace) const {
    if (!has_set(s1)) throw NotFoundError("unknown set " + id_str(s1));
    if (!has_set(s2)) throw NotFoundError("unknown set " + id_str(s2));
    const Vertex *root = vertex(1);
    if (!root || !root->es.has_set(s1) || !root->es.has_set(s2)) return std::nullopt;
    if (s1 == s2) return universe_->external(*root->es.members(s1).begin());
    std::size_t i = 1;
    while (true) {
        const Vertex &v = *vertex(i);
        if (is_leaf(i) || !both_large(v, s1, s2)) {
            if (trace) ++trace->type2;
            return scan(v, s1, s2, true, nullptr);
        }
        auto it = v.shortcuts.find(SetPair::of(s1, s2));
        if (it == v.shortcuts.end()) return std::nullopt;
        if (trace) ++trace->type1;
        i = it->second.left ? it->second.left : it->second.right;
        if (i == 0) return std::nullopt;
    }
}

double IntersectionTree::space_units() const {
    double sum = 0;
    for (const auto &v : vertices_) {
        if (v) sum += v->es.space_budget();
    }
    return sum;
}

std::vector<TreeLevelStats> IntersectionTree::level_stats() const {
    std::vector<TreeLevelStats> levels(height());
    for (std::size_t i = 1; i < vertices_.size(); ++i) {
        const Vertex *v = vertex(i);
        if (!v) continue;
        auto &lv = levels[static_cast<std::size_t>(std::bit_width(i)) - 1];
        ++lv.vertices;
        lv.total += v->es.total_size();
        lv.budget += v->es.space_budget();
        lv.shortcuts += v->shortcuts.size();
    }
    return levels;
}

std::vector<std::string> IntersectionTree::audit() const {
    std::vector<std::string> problems;
    auto where = [](std::size_t i) { return "vertex " + std::to_string(i) + ": "; };

    // recount restrictions from the root content: per set, |S^v| by vertex
    std::vector<std::pair<SetId, std::vector<std::uint32_t>>> expected;
    std::size_t total = 0;
    if (const Vertex *root = vertex(1)) {
        for (const auto &[id, n] : sizes_) {
            if (!root->es.has_set(id)) {
                if (n != 0) problems.push_back("set " + id_str(id) + " missing at the root");
                continue;
            }
            const auto &members = root->es.members(id);
            if (members.size() != n) problems.push_back("set " + id_str(id) + " size mismatch at the root");
            total += members.size();
            auto &counts = expected.emplace_back(id, std::vector<std::uint32_t>(vertices_.size())).second;
            for (std::uint64_t k : members) {
                if (k >= 2 * anchor_) {
                    problems.push_back("key " + std::to_string(k) + " outside [0, 2N')");
                    continue;
                }
                for (std::size_t i = leaf_of(k); i >= 1; i /= 2) ++counts[i];
            }
        }
    }
    if (total != total_) problems.push_back("total size mismatch");

    for (std::size_t i = 1; i < vertices_.size(); ++i) {
        const Vertex *v = vertex(i);
        std::size_t nv = 0;
        for (const auto &[id, counts] : expected) nv += counts[i];
        if (!v) {
            if (nv != 0) problems.push_back(where(i) + "missing but holds elements");
            continue;
        }
        if (nv == 0) {
            problems.push_back(where(i) + "allocated but empty");
            continue;
        }
        for (const auto &[id, counts] : expected) {
            const std::size_t n = counts[i];
            if (n == 0 ? v->es.has_set(id) && v->es.size(id) != 0 : !v->es.has_set(id) || v->es.size(id) != n) {
                problems.push_back(where(i) + "size of set " + id_str(id));
            }
        }
        if (nv != v->es.total_size()) problems.push_back(where(i) + "N_v mismatch");
        // keys at v lie in its dyadic range
        const std::size_t depth = static_cast<std::size_t>(std::bit_width(i)) - 1;
        const std::uint64_t width = (2 * anchor_) >> depth;
        const std::uint64_t lo = (i - (std::size_t{1} << depth)) * width;
        for (const auto &[id, counts] : expected) {
            if (counts[i] == 0 || !v->es.has_set(id)) continue;
            for (std::uint64_t k : v->es.members(id)) {
                if (k < lo || k >= lo + width) problems.push_back(where(i) + "key outside range");
            }
        }
        for (auto &msg : v->es.audit()) problems.push_back(where(i) + msg);
    }

    // shortcut pointers, recomputed from the root content: a pair intersects at
    // v iff some common key lies below v
    std::unordered_map<SetPair, std::vector<bool>, SetPairHash> nonempty_cache;
    auto raw_nonempty = [&](std::size_t i, SetId a, SetId b) {
        const SetPair key = SetPair::of(a, b);
        auto it = nonempty_cache.find(key);
        if (it == nonempty_cache.end()) {
            std::vector<bool> marks(vertices_.size());
            const Vertex *root = vertex(1);
            if (root && root->es.has_set(a) && root->es.has_set(b)) {
                const auto &ma = root->es.members(a);
                const auto &mb = root->es.members(b);
                const auto &small = ma.size() <= mb.size() ? ma : mb;
                const auto &big = &small == &ma ? mb : ma;
                for (std::uint64_t k : small) {
                    if (!big.contains(k)) continue;
                    for (std::size_t j = leaf_of(k); j >= 1 && !marks[j]; j /= 2) marks[j] = true;
                }
            }
            it = nonempty_cache.emplace(key, std::move(marks)).first;
        }
        return it->second[i];
    };
    auto raw_target = [&](auto &self, std::size_t i, int side, SetId a, SetId b) -> std::uint32_t {
        const std::size_t c = 2 * i + static_cast<std::size_t>(side);
        if (!raw_nonempty(c, a, b)) return 0;
        if (is_leaf(c) || !both_large(*vertex(c), a, b)) return static_cast<std::uint32_t>(c);
        const bool l = raw_nonempty(2 * c, a, b);
        const bool r = raw_nonempty(2 * c + 1, a, b);
        if (l && r) return static_cast<std::uint32_t>(c);
        return self(self, c, l ? 0 : 1, a, b);
    };
    std::vector<SetId> large;
    for (std::size_t i = 1; i < vertices_.size(); ++i) {
        const Vertex *v = vertex(i);
        if (!v) continue;
        large.clear();
        v->es.for_each_large([&](SetId s) { large.push_back(s); });
        std::size_t present = 0;
        for (std::size_t x = 0; x < large.size(); ++x) {
            for (std::size_t y = x + 1; y < large.size(); ++y) {
                const SetId a = large[x], b = large[y];
                auto it = v->shortcuts.find(SetPair::of(a, b));
                const bool want = raw_nonempty(i, a, b);
                auto pair = [&] { return "(" + id_str(a) + "," + id_str(b) + ")"; };
                if (want != (it != v->shortcuts.end())) {
                    problems.push_back(where(i) + "shortcut presence for " + pair());
                    continue;
                }
                if (!want) continue;
                ++present;
                if (is_leaf(i)) continue;
                const Shortcut exp{raw_target(raw_target, i, 0, a, b), raw_target(raw_target, i, 1, a, b)};
                if (!(exp == it->second)) {
                    problems.push_back(where(i) + "shortcut " + pair() + " points to (" + std::to_string(it->second.left) +
                                       "," + std::to_string(it->second.right) + "), expected (" +
                                       std::to_string(exp.left) + "," + std::to_string(exp.right) + ")");
                }
            }
        }
        if (present != v->shortcuts.size()) problems.push_back(where(i) + "stale shortcut entries");
        std::size_t partner_links = 0;
        for (const auto &[s, others] : v->partners) partner_links += others.size();
        if (partner_links != 2 * v->shortcuts.size()) problems.push_back(where(i) + "partner index out of sync");
    }
    return problems;
}

}  // namespace setix
