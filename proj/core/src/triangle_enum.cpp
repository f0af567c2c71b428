#include "setix/triangle_enum.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <string>
#include <thread>

#include "setix/errors.hpp"
#include "setix/packed_sets.hpp"

namespace setix {

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges) {
    Graph g;
    g.adjacency_.resize(n);
    g.edges_.reserve(edges.size());
    for (auto [u, v] : edges) {
        if (u >= n || v >= n) {
            throw UsageError("edge (" + std::to_string(u) + ", " + std::to_string(v) + ") outside [0, " +
                             std::to_string(n) + ")");
        }
        if (u == v) continue;
        g.edges_.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(g.edges_.begin(), g.edges_.end());
    g.edges_.erase(std::unique(g.edges_.begin(), g.edges_.end()), g.edges_.end());
    for (auto [u, v] : g.edges_) {
        g.adjacency_[u].push_back(v);
        g.adjacency_[v].push_back(u);
    }
    return g;
}

Graph Graph::complete(std::size_t n) {
    std::vector<Edge> edges;
    for (Vertex u = 0; u < n; ++u) {
        for (Vertex v = u + 1; v < n; ++v) edges.emplace_back(u, v);
    }
    return from_edges(n, edges);
}

Orientation orient(const Graph &g) {
    const std::size_t n = g.vertex_count();
    Orientation o;
    o.rank.assign(n, 0);
    o.out.resize(n);
    o.order.reserve(n);

    std::vector<std::size_t> degree(n);
    std::vector<bool> removed(n, false);
    using Entry = std::pair<std::size_t, Vertex>;  // (degree, id); min-heap gives the lowest id on ties
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (Vertex v = 0; v < n; ++v) {
        degree[v] = g.degree(v);
        heap.emplace(degree[v], v);
    }
    while (!heap.empty()) {
        auto [d, v] = heap.top();
        heap.pop();
        if (removed[v] || d != degree[v]) continue;
        removed[v] = true;
        o.rank[v] = o.order.size();
        o.order.push_back(v);
        for (Vertex u : g.neighbors(v)) {
            if (removed[u]) continue;
            o.out[v].push_back(u);
            heap.emplace(--degree[u], u);
        }
        o.max_out_degree = std::max(o.max_out_degree, o.out[v].size());
    }
    return o;
}

namespace {

// Runs fn(u, v, w) for each triangle, split over `threads` workers by
// interleaved source vertex. Worker counter deltas are folded into the caller's.
template <class Family, class Fn>
void visit_with(const Graph &g, const TriangleOptions &opts, Fn &&fn_for_worker) {
    const Orientation o = orient(g);
    Family family(o.max_out_degree + 1, opts.seed);
    const std::size_t n = g.vertex_count();
    for (Vertex u = 0; u < n; ++u) {
        if (o.out[u].empty()) continue;
        for (Vertex v : o.out[u]) family.insert(SetId{u}, v);
    }

    auto work = [&](unsigned worker, unsigned stride) {
        auto &&emit = fn_for_worker(worker);
        for (Vertex u = worker; u < n; u += stride) {
            if (o.out[u].empty()) continue;
            for (Vertex v : o.out[u]) {
                if (o.out[v].empty()) continue;
                family.for_each_common(SetId{u}, SetId{v}, [&](ElementKey w) {
                    Triangle t{u, v, static_cast<Vertex>(w)};
                    std::sort(t.begin(), t.end());
                    emit(t);
                });
            }
        }
    };

    const unsigned threads = std::max(1u, opts.threads);
    if (threads == 1) {
        work(0, 1);
        return;
    }
    std::vector<OpCounters> deltas(threads);
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                CounterScope scope;
                work(t, threads);
                deltas[t] = scope.delta();
            });
        }
    }
    for (const auto &d : deltas) counters() += d;
}

template <class Fn>
void visit_triangles(const Graph &g, const TriangleOptions &opts, Fn &&fn_for_worker) {
    if (opts.layout == WordLayout::Test32) {
        visit_with<PackedFamily32>(g, opts, fn_for_worker);
    } else {
        visit_with<PackedFamily>(g, opts, fn_for_worker);
    }
}

}  // namespace

std::vector<Triangle> enumerate_triangles(const Graph &g, const TriangleOptions &opts) {
    const unsigned threads = std::max(1u, opts.threads);
    std::vector<std::vector<Triangle>> parts(threads);
    visit_triangles(g, opts, [&](unsigned worker) {
        return [&out = parts[worker]](const Triangle &t) { out.push_back(t); };
    });
    std::vector<Triangle> all = std::move(parts[0]);
    for (unsigned t = 1; t < threads; ++t) all.insert(all.end(), parts[t].begin(), parts[t].end());
    return all;
}

std::uint64_t count_triangles(const Graph &g, const TriangleOptions &opts) {
    const unsigned threads = std::max(1u, opts.threads);
    std::vector<std::uint64_t> counts(threads, 0);
    visit_triangles(g, opts, [&](unsigned worker) {
        return [&c = counts[worker]](const Triangle &) { ++c; };
    });
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    return total;
}

}  // namespace setix
