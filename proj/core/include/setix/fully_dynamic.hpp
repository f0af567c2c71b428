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
#include "setix/set_id.hpp"

namespace setix {

/// Keyed pseudo-random bijection on [0, n): a 4-round Feistel network over
/// the smallest even bit width covering n, cycle-walked back into range.
class KeyPermutation {
  public:
    KeyPermutation(std::uint64_t n, std::uint64_t seed);

    std::uint64_t size() const noexcept { return n_; }
    std::uint64_t operator()(std::uint64_t x) const;

  private:
    std::uint64_t round_trip(std::uint64_t x) const noexcept;

    std::uint64_t n_;
    unsigned half_bits_;
    std::uint64_t half_mask_;
    std::uint64_t keys_[4];
};

/// Assigns external elements to internal keys in [0, range): raw keys are
/// handed out in increasing order, then spread by a KeyPermutation. Keys of
/// released elements are not reused until the map is rebuilt.
class UniverseMap {
  public:
    UniverseMap(std::uint64_t range, std::uint64_t seed);

    std::uint64_t range() const noexcept { return range_; }
    bool full() const noexcept { return next_raw_ == range_; }
    std::size_t live() const noexcept { return map_.size(); }
    std::uint64_t assigned() const noexcept { return next_raw_; }

    std::optional<std::uint64_t> find(ElementKey ext) const;
    /// Takes a reference on ext, assigning a key if it has none.
    std::uint64_t acquire(ElementKey ext);
    void release(ElementKey ext);
    ElementKey external(std::uint64_t key) const { return ext_of_[key]; }

  private:
    struct Slot {
        std::uint64_t key;
        std::size_t refs;
    };

    std::uint64_t range_;
    std::uint64_t next_raw_ = 0;
    KeyPermutation perm_;
    std::unordered_map<ElementKey, Slot> map_;
    std::vector<ElementKey> ext_of_;
};

struct FullyDynamicOptions {
    std::size_t space_budget = 0;  ///< M, in words
    std::uint64_t seed = 0;
    std::size_t min_anchor = 16;
};

/// Vertices visited by one reporting or witness query.
struct ReportTrace {
    std::size_t type1 = 0;  ///< both sets large: followed shortcut pointers
    std::size_t type2 = 0;  ///< scanned the smaller part against the larger
};

struct TreeLevelStats {
    std::size_t vertices = 0;
    std::size_t total = 0;      ///< sum of N_v
    double budget = 0;          ///< sum of M_v
    std::size_t shortcuts = 0;
};

/// Fully dynamic family with reporting and witness queries.
///
/// Elements are mapped to internal keys in [0, 2N'); a complete binary tree
/// of height log2(N') + 1 covers that range, each vertex v holding an
/// EmptinessStructure over the restrictions S^v = S ∩ range(v) with a
/// budget proportional to N_v. For every two sets that are both large at v
/// and intersect there, v stores a pointer per side to the first descendant
/// where the intersection branches, or where one set stops being large, so
/// a query only visits vertices that contribute output.
///
/// Vertices are allocated lazily and freed when they become empty.
class IntersectionTree {
  public:
    explicit IntersectionTree(std::size_t space_budget, std::uint64_t seed = 0);
    explicit IntersectionTree(const FullyDynamicOptions &opts);
    ~IntersectionTree();
    IntersectionTree(IntersectionTree &&) noexcept;
    IntersectionTree &operator=(IntersectionTree &&) noexcept;

    void add_set(SetId s);
    bool has_set(SetId s) const noexcept { return sizes_.contains(s); }

    void insert(SetId s, ElementKey x);
    void erase(SetId s, ElementKey x);

    std::vector<ElementKey> report(SetId s1, SetId s2, ReportTrace *trace = nullptr) const;
    std::optional<ElementKey> witness(SetId s1, SetId s2, ReportTrace *trace = nullptr) const;

    bool contains(SetId s, ElementKey x) const;
    std::size_t size(SetId s) const;

    /// Reassigns keys and rebuilds every vertex from scratch.
    void rebuild();

    std::size_t total_size() const noexcept { return total_; }
    std::size_t anchor() const noexcept { return anchor_; }
    /// Number of levels, log2(N') + 1.
    std::size_t height() const noexcept;
    std::size_t rebuild_count() const noexcept { return rebuilds_; }
    std::size_t vertex_count() const noexcept;
    double internal_budget() const noexcept { return internal_budget_; }
    /// Sum over vertices of M_v.
    double space_units() const;
    const UniverseMap &universe() const noexcept { return *universe_; }

    std::vector<TreeLevelStats> level_stats() const;

    /// Recounts N_v and per-vertex set sizes from the root content, runs the
    /// vertex audits, and recomputes every shortcut pointer from scratch.
    std::vector<std::string> audit() const;

  private:
    struct Vertex;
    struct Shortcut {
        std::uint32_t left = 0;  // heap index, 0 = none
        std::uint32_t right = 0;
        friend bool operator==(const Shortcut &, const Shortcut &) = default;
    };

    Vertex *vertex(std::size_t i) const noexcept;
    Vertex &ensure_vertex(std::size_t i);
    bool is_leaf(std::size_t i) const noexcept { return i >= anchor_; }
    std::size_t leaf_of(std::uint64_t key) const noexcept { return anchor_ + key / 2; }

    bool both_large(const Vertex &v, SetId a, SetId b) const;
    bool nonempty_at(std::size_t i, SetId a, SetId b) const;
    std::uint32_t target(std::size_t i, int side, SetId a, SetId b) const;
    void compute_pair(std::size_t i, SetId a, SetId b);
    void drop_pairs_of(Vertex &v, SetId s);
    void recompute_all(std::size_t i);
    void repair_path(std::size_t leaf, SetId s, const std::vector<bool> &rebuilt);

    void collect(std::size_t i, SetId a, SetId b, std::vector<ElementKey> &out, ReportTrace *trace) const;
    std::optional<ElementKey> scan(const Vertex &v, SetId a, SetId b, bool first_only,
                                   std::vector<ElementKey> *out) const;

    void rebuild_with(std::size_t anchor);
    void set_anchor(std::size_t anchor);

    FullyDynamicOptions opts_;
    SeedStream seeds_;
    std::size_t anchor_ = 0;
    double internal_budget_ = 0;
    double ratio_ = 0;  // M_v / N'_v
    std::unique_ptr<UniverseMap> universe_;
    std::vector<std::unique_ptr<Vertex>> vertices_;  // heap order, root at 1
    std::unordered_map<SetId, std::size_t> sizes_;
    std::size_t total_ = 0;
    std::size_t rebuilds_ = 0;
};

}  // namespace setix
