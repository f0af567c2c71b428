#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "setix/triangle_enum.hpp"

namespace setix::cli {

struct BenchRow {
    std::string structure;
    std::string op;
    std::string param;
    std::uint64_t value = 0;
    std::string counter;
    double mean = 0;
    double stddev = 0;
    std::size_t reps = 0;
};

/// Header `structure,op,param,value,counter,mean,stddev,reps`, then one line per row.
void write_csv(std::ostream &out, const std::vector<BenchRow> &rows);

/// Per-query means over all pairs of a family of full sets (size d - 1).
struct PackedPoint {
    double word_ops = 0;
    double fingerprint_hits = 0;
    double false_positives = 0;
    double output = 0;
};
PackedPoint packed_report_workload(std::size_t d, std::uint64_t seed, WordLayout layout = WordLayout::Native64);

/// Emptiness structure with M = N: a fill phase up to n elements (a few
/// large sets, many small ones), then n delete/insert churn updates, then
/// random disjointness queries.
struct EmptinessPoint {
    double update_probes = 0;  ///< membership probes per update, fill and churn
    double query_probes = 0;
    std::size_t rebuilds = 0;
};
EmptinessPoint emptiness_workload(std::size_t n, std::uint64_t seed);

/// Triangle counting on a degenerate_graph with about m edges.
struct TrianglePoint {
    std::size_t edges = 0;
    std::uint64_t triangles = 0;
    double word_ops_per_edge = 0;
};
TrianglePoint triangle_workload(std::size_t m, std::size_t degeneracy, std::uint64_t seed,
                                WordLayout layout = WordLayout::Native64);

struct BenchConfig {
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::size_t reps = 3;
    WordLayout layout = WordLayout::Native64;
};

std::vector<BenchRow> run_bench(const BenchConfig &cfg);

}  // namespace setix::cli
