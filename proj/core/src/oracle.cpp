#include "setix/oracle.hpp"

#include <algorithm>
#include <iterator>
#include <string>
#include <unordered_set>

#include "setix/errors.hpp"

namespace setix {

const std::set<ElementKey> &OracleFamily::members(SetId s) const {
    auto it = sets_.find(s);
    if (it == sets_.end()) throw NotFoundError("unknown set " + std::to_string(to_underlying(s)));
    return it->second;
}

void OracleFamily::insert(SetId s, ElementKey x) {
    if (!sets_[s].insert(x).second) throw DuplicateError("element " + std::to_string(x) + " already present");
}

void OracleFamily::erase(SetId s, ElementKey x) {
    auto it = sets_.find(s);
    if (it == sets_.end()) throw NotFoundError("unknown set " + std::to_string(to_underlying(s)));
    if (it->second.erase(x) == 0) throw NotFoundError("element " + std::to_string(x) + " not present");
}

std::vector<ElementKey> OracleFamily::intersect(SetId s1, SetId s2) const {
    const auto &a = members(s1);
    const auto &b = members(s2);
    std::vector<ElementKey> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<ElementKey> hash_intersect(const std::vector<ElementKey> &a, const std::vector<ElementKey> &b) {
    const std::unordered_set<ElementKey> lookup(b.begin(), b.end());
    std::unordered_set<ElementKey> seen;
    std::vector<ElementKey> out;
    for (ElementKey x : a) {
        if (lookup.contains(x) && seen.insert(x).second) out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Triangle> oracle_triangles(const Graph &g) {
    const std::size_t n = g.vertex_count();
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (auto [u, v] : g.edges()) adj[u][v] = adj[v][u] = true;
    std::vector<Triangle> out;
    for (Vertex a = 0; a < n; ++a) {
        for (Vertex b = a + 1; b < n; ++b) {
            if (!adj[a][b]) continue;
            for (Vertex c = b + 1; c < n; ++c) {
                if (adj[a][c] && adj[b][c]) out.push_back({a, b, c});
            }
        }
    }
    return out;
}

std::vector<Triangle> oracle_triangles_edge_iterator(const Graph &g) {
    std::vector<Triangle> out;
    for (auto [u, v] : g.edges()) {
        const auto &nu = g.neighbors(u);
        const auto &nv = g.neighbors(v);
        auto iu = std::upper_bound(nu.begin(), nu.end(), v);
        auto iv = std::upper_bound(nv.begin(), nv.end(), v);
        while (iu != nu.end() && iv != nv.end()) {
            if (*iu < *iv) {
                ++iu;
            } else if (*iv < *iu) {
                ++iv;
            } else {
                out.push_back({u, v, *iu});
                ++iu;
                ++iv;
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t oracle_degeneracy(const Graph &g) {
    const std::size_t n = g.vertex_count();
    std::vector<std::size_t> degree(n);
    std::vector<bool> removed(n, false);
    for (Vertex v = 0; v < n; ++v) degree[v] = g.degree(v);
    std::size_t best = 0;
    for (std::size_t step = 0; step < n; ++step) {
        Vertex pick = 0;
        bool found = false;
        for (Vertex v = 0; v < n; ++v) {
            if (!removed[v] && (!found || degree[v] < degree[pick])) {
                pick = v;
                found = true;
            }
        }
        best = std::max(best, degree[pick]);
        removed[pick] = true;
        for (Vertex w : g.neighbors(pick)) {
            if (!removed[w]) --degree[w];
        }
    }
    return best;
}

}  // namespace setix
