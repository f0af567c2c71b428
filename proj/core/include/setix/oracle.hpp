#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <vector>

#include "setix/hashing.hpp"
#include "setix/set_id.hpp"
#include "setix/triangle_enum.hpp"

namespace setix {

/// Reference family on ordered sets. Slow on purpose.
class OracleFamily {
  public:
    void add_set(SetId s) { sets_.try_emplace(s); }
    bool has_set(SetId s) const { return sets_.contains(s); }

    void insert(SetId s, ElementKey x);
    void erase(SetId s, ElementKey x);

    bool contains(SetId s, ElementKey x) const { return members(s).contains(x); }
    std::size_t size(SetId s) const { return members(s).size(); }
    const std::set<ElementKey> &members(SetId s) const;
    const std::map<SetId, std::set<ElementKey>> &sets() const noexcept { return sets_; }

    /// Sorted s1 ∩ s2 by a linear merge.
    std::vector<ElementKey> intersect(SetId s1, SetId s2) const;

  private:
    std::map<SetId, std::set<ElementKey>> sets_;
};

/// Second, independent intersection oracle: hash lookups, sorted output.
std::vector<ElementKey> hash_intersect(const std::vector<ElementKey> &a, const std::vector<ElementKey> &b);

/// Every vertex triple checked against an adjacency matrix; sorted output.
std::vector<Triangle> oracle_triangles(const Graph &g);

/// Edge-iterator listing: for each edge (u, v), u < v, merge the sorted
/// neighbour lists above v. Sorted output.
std::vector<Triangle> oracle_triangles_edge_iterator(const Graph &g);

/// Degeneracy by quadratic peeling (max over removals of the minimum degree).
std::size_t oracle_degeneracy(const Graph &g);

}  // namespace setix
