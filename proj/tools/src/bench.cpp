#include "setix_cli/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <thread>
#include <unordered_set>

#include "setix/counters.hpp"
#include "setix/emptiness.hpp"
#include "setix/packed_sets.hpp"
#include "setix_cli/graph_io.hpp"

namespace setix::cli {

namespace {

// Runs fn(rep) for rep in [0, reps) on up to `threads` workers; results in rep order.
template <class Fn>
auto parallel_reps(std::size_t reps, unsigned threads, Fn fn) {
    std::vector<decltype(fn(std::size_t{0}))> out(reps);
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(reps)));
    if (threads == 1) {
        for (std::size_t r = 0; r < reps; ++r) out[r] = fn(r);
        return out;
    }
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t r = t; r < reps; r += threads) out[r] = fn(r);
        });
    }
    pool.clear();
    return out;
}

template <class T, class Get>
BenchRow summarize(std::string structure, std::string op, std::string param, std::uint64_t value,
                   std::string counter, const std::vector<T> &points, Get get) {
    BenchRow row{std::move(structure), std::move(op), std::move(param), value, std::move(counter), 0, 0, points.size()};
    for (const auto &p : points) row.mean += get(p);
    row.mean /= static_cast<double>(points.size());
    if (points.size() > 1) {
        double ss = 0;
        for (const auto &p : points) ss += (get(p) - row.mean) * (get(p) - row.mean);
        row.stddev = std::sqrt(ss / static_cast<double>(points.size() - 1));
    }
    return row;
}

std::uint64_t rep_seed(std::uint64_t seed, std::uint64_t salt, std::size_t rep) {
    SeedStream s(seed ^ (salt * 0x9E3779B97F4A7C15ull) ^ (rep * 0xD1B54A32D192ED03ull));
    return s.next();
}

template <class Family>
PackedPoint packed_report_impl(std::size_t d, std::uint64_t seed) {
    constexpr std::size_t kSets = 8;
    std::mt19937_64 rng(seed);
    Family family(d, rng());
    std::uniform_int_distribution<ElementKey> pick(0, 4 * d - 1);
    for (std::size_t s = 0; s < kSets; ++s) {
        std::unordered_set<ElementKey> seen;
        while (seen.size() < d - 1) {
            const ElementKey e = pick(rng);
            if (seen.insert(e).second) family.insert(SetId{s}, e);
        }
    }
    PackedPoint p;
    std::size_t queries = 0;
    for (std::size_t a = 0; a < kSets; ++a) {
        for (std::size_t b = a + 1; b < kSets; ++b) {
            CounterScope scope;
            p.output += static_cast<double>(family.intersect_report(SetId{a}, SetId{b}).size());
            const OpCounters c = scope.delta();
            p.word_ops += static_cast<double>(c.word_ops);
            p.fingerprint_hits += static_cast<double>(c.fingerprint_hits);
            p.false_positives += static_cast<double>(c.false_positives);
            ++queries;
        }
    }
    const double q = static_cast<double>(queries);
    return {p.word_ops / q, p.fingerprint_hits / q, p.false_positives / q, p.output / q};
}

}  // namespace

void write_csv(std::ostream &out, const std::vector<BenchRow> &rows) {
    out << "structure,op,param,value,counter,mean,stddev,reps\n";
    char buf[64];
    for (const auto &r : rows) {
        out << r.structure << ',' << r.op << ',' << r.param << ',' << r.value << ',' << r.counter << ',';
        std::snprintf(buf, sizeof buf, "%.4f", r.mean);
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.4f", r.stddev);
        out << buf << ',' << r.reps << '\n';
    }
}

PackedPoint packed_report_workload(std::size_t d, std::uint64_t seed, WordLayout layout) {
    return layout == WordLayout::Test32 ? packed_report_impl<PackedFamily32>(d, seed)
                                        : packed_report_impl<PackedFamily>(d, seed);
}

EmptinessPoint emptiness_workload(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    EmptinessStructure es(n);
    const std::size_t root = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    const std::size_t large_sets = std::max<std::size_t>(2, root / 4);
    const std::size_t large_size = 3 * root;
    const std::size_t small_size = std::max<std::size_t>(1, root / 4);
    const std::size_t large_total = large_sets * large_size;
    const std::size_t small_sets = n > large_total ? (n - large_total) / small_size : 0;
    const std::size_t num_sets = large_sets + small_sets;

    // fill order: every set's insertions, shuffled together
    std::vector<std::size_t> order;
    for (std::size_t s = 0; s < num_sets; ++s) order.insert(order.end(), s < large_sets ? large_size : small_size, s);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<std::vector<ElementKey>> content(num_sets);
    std::vector<std::unordered_set<ElementKey>> mirror(num_sets);
    std::uniform_int_distribution<ElementKey> pick(0, 4 * n - 1);
    auto fresh = [&](std::size_t s) {
        ElementKey e;
        do {
            e = pick(rng);
        } while (mirror[s].contains(e));
        return e;
    };

    CounterScope updates;
    std::size_t update_count = 0;
    for (std::size_t s : order) {
        const ElementKey e = fresh(s);
        mirror[s].insert(e);
        content[s].push_back(e);
        es.insert(SetId{s}, e);
        ++update_count;
    }
    // churn: delete a random element of a set picked proportionally to size, insert a fresh one into it
    for (std::size_t step = 0; step < n / 2; ++step) {
        const std::size_t s = order[std::uniform_int_distribution<std::size_t>(0, order.size() - 1)(rng)];
        auto &elems = content[s];
        const std::size_t at = std::uniform_int_distribution<std::size_t>(0, elems.size() - 1)(rng);
        std::swap(elems[at], elems.back());
        const ElementKey gone = elems.back();
        elems.pop_back();
        mirror[s].erase(gone);
        es.erase(SetId{s}, gone);
        const ElementKey e = fresh(s);
        mirror[s].insert(e);
        elems.push_back(e);
        es.insert(SetId{s}, e);
        update_count += 2;
    }
    EmptinessPoint p;
    p.update_probes = static_cast<double>(updates.delta().membership_probes) / static_cast<double>(update_count);

    constexpr std::size_t kQueries = 2000;
    std::uniform_int_distribution<std::size_t> any(0, num_sets - 1);
    CounterScope queries;
    for (std::size_t q = 0; q < kQueries; ++q) (void)es.disjoint(SetId{any(rng)}, SetId{any(rng)});
    p.query_probes = static_cast<double>(queries.delta().membership_probes) / kQueries;
    p.rebuilds = es.rebuild_count();
    return p;
}

TrianglePoint triangle_workload(std::size_t m, std::size_t degeneracy, std::uint64_t seed, WordLayout layout) {
    const std::size_t n = degeneracy + 1 + m / degeneracy;
    const Graph g = degenerate_graph(n, degeneracy, seed);
    TrianglePoint p;
    p.edges = g.edge_count();
    CounterScope scope;
    p.triangles = count_triangles(g, TriangleOptions{.seed = seed ^ 0x5eedull, .threads = 1, .layout = layout});
    p.word_ops_per_edge = static_cast<double>(scope.delta().word_ops) / static_cast<double>(p.edges);
    return p;
}

std::vector<BenchRow> run_bench(const BenchConfig &cfg) {
    std::vector<BenchRow> rows;
    for (std::size_t d : {128, 256, 512}) {
        auto pts = parallel_reps(cfg.reps, cfg.threads,
                                 [&](std::size_t r) { return packed_report_workload(d, rep_seed(cfg.seed, d, r), cfg.layout); });
        rows.push_back(summarize("packed", "report", "d", d, "word_ops", pts, [](const PackedPoint &p) { return p.word_ops; }));
        rows.push_back(summarize("packed", "report", "d", d, "fingerprint_hits", pts,
                                 [](const PackedPoint &p) { return p.fingerprint_hits; }));
        rows.push_back(summarize("packed", "report", "d", d, "false_positives", pts,
                                 [](const PackedPoint &p) { return p.false_positives; }));
    }
    for (std::size_t k = 12; k <= 16; ++k) {
        const std::size_t n = std::size_t{1} << k;
        auto pts = parallel_reps(cfg.reps, cfg.threads, [&](std::size_t r) { return emptiness_workload(n, rep_seed(cfg.seed, n, r)); });
        rows.push_back(summarize("emptiness", "update", "N", n, "membership_probes", pts,
                                 [](const EmptinessPoint &p) { return p.update_probes; }));
        rows.push_back(summarize("emptiness", "query", "N", n, "membership_probes", pts,
                                 [](const EmptinessPoint &p) { return p.query_probes; }));
    }
    for (std::size_t m : {10000, 20000, 50000, 100000}) {
        auto pts = parallel_reps(cfg.reps, cfg.threads,
                                 [&](std::size_t r) { return triangle_workload(m, 8, rep_seed(cfg.seed, m + 1, r), cfg.layout); });
        rows.push_back(summarize("triangles", "enumerate", "m", m, "word_ops_per_edge", pts,
                                 [](const TrianglePoint &p) { return p.word_ops_per_edge; }));
    }
    return rows;
}

}  // namespace setix::cli
