#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "setix/triangle_enum.hpp"

namespace setix::cli {

struct LoadStats {
    std::size_t lines = 0;
    std::size_t self_loops = 0;
    std::size_t duplicates = 0;
};

struct LoadedGraph {
    Graph graph;
    std::vector<std::uint64_t> labels;  ///< original id of each compacted vertex, ascending
    LoadStats stats;
};

/// Parses an edge list: one "u v" pair per line, '#' starts a comment,
/// blank lines are skipped. Vertex ids are compacted to [0, n) by rank.
LoadedGraph parse_edge_list(std::istream &in);

/// Opens and parses `path`. Only the "edgelist" format exists.
LoadedGraph load_graph(const std::string &path, const std::string &format = "edgelist");

void write_edge_list(std::ostream &out, const Graph &g);

/// G(n, p).
Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed);

/// Every vertex v >= k picks k distinct earlier neighbours uniformly at
/// random (the first k + 1 vertices form a clique), so the degeneracy is k.
Graph degenerate_graph(std::size_t n, std::size_t k, std::uint64_t seed);

}  // namespace setix::cli
