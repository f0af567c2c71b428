#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "setix/counters.hpp"

namespace setix {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;
/// Vertex triple sorted ascending.
using Triangle = std::array<Vertex, 3>;

/// Simple undirected graph: no self-loops, no parallel edges.
class Graph {
  public:
    Graph() = default;

    /// Builds a graph on vertices [0, n). Self-loops are dropped and parallel
    /// edges merged; an endpoint >= n is a UsageError.
    static Graph from_edges(std::size_t n, std::span<const Edge> edges);

    /// Complete graph K_n.
    static Graph complete(std::size_t n);

    std::size_t vertex_count() const noexcept { return adjacency_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    /// Edges with first < second, sorted lexicographically.
    const std::vector<Edge> &edges() const noexcept { return edges_; }
    const std::vector<Vertex> &neighbors(Vertex v) const { return adjacency_[v]; }
    std::size_t degree(Vertex v) const { return adjacency_[v].size(); }

  private:
    std::vector<Edge> edges_;
    std::vector<std::vector<Vertex>> adjacency_;
};

/// Acyclic low out-degree orientation obtained by degeneracy peeling.
struct Orientation {
    std::vector<Vertex> order;                   ///< peeling order
    std::vector<std::size_t> rank;               ///< rank[v] = position of v in order
    std::vector<std::vector<Vertex>> out;        ///< out-neighbours, each later in the order
    std::size_t max_out_degree = 0;
};

/// Repeatedly removes a minimum-degree vertex (lowest id on ties) and orients
/// its remaining edges away from it. Out-degrees are bounded by the degeneracy.
Orientation orient(const Graph &g);

/// Word layout of the packed fingerprint lists: the native 64-bit words or
/// the 32-bit test layout.
enum class WordLayout : std::uint8_t { Native64, Test32 };

struct TriangleOptions {
    std::uint64_t seed = 0x7269616e676c6573ull;
    unsigned threads = 1;
    WordLayout layout = WordLayout::Native64;
};

/// All triangles, each exactly once, as ascending triples in unspecified order.
///
/// One packed intersection query Γ+(u) ∩ Γ+(v) per oriented edge (u, v) over a
/// packed family built on the out-neighbourhoods with cap max out-degree + 1.
std::vector<Triangle> enumerate_triangles(const Graph &g, const TriangleOptions &opts = {});

/// Number of triangles, without materialising them.
std::uint64_t count_triangles(const Graph &g, const TriangleOptions &opts = {});

}  // namespace setix
