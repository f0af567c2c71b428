#include <algorithm>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "setix/emptiness.hpp"
#include "setix/packed_sets.hpp"
#include "setix/triangle_enum.hpp"
#include "setix/word_ops.hpp"
#include "setix_cli/graph_io.hpp"

using namespace setix;

namespace {

template <class L>
void BM_MergeSortedWords(benchmark::State &state) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<word::FieldValue> pick(0, L::max_value);
    std::vector<word::FieldValue> a(static_cast<std::size_t>(state.range(0))), b(a.size());
    for (auto &x : a) x = pick(rng);
    for (auto &x : b) x = pick(rng);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const auto pa = word::pack_fields<L>(a);
    const auto pb = word::pack_fields<L>(b);
    for (auto _ : state) benchmark::DoNotOptimize(word::merge_sorted_words(pa, pb));
    state.SetItemsProcessed(state.iterations() * 2 * state.range(0));
}
BENCHMARK(BM_MergeSortedWords<word::Layout64>)->RangeMultiplier(4)->Range(4, 1024);
BENCHMARK(BM_MergeSortedWords<word::Layout32>)->RangeMultiplier(4)->Range(4, 1024);

void BM_PackedReport(benchmark::State &state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(2);
    PackedFamily f(d, 3);
    for (std::uint64_t s = 0; s < 2; ++s) {
        f.add_set(SetId{s});
        for (std::size_t i = 0; i + 1 < d; ++i) {
            const ElementKey x = rng() % (4 * d);
            if (!f.contains(SetId{s}, x)) f.insert(SetId{s}, x);
        }
    }
    for (auto _ : state) benchmark::DoNotOptimize(f.intersect_report(SetId{0}, SetId{1}));
}
BENCHMARK(BM_PackedReport)->Arg(16)->Arg(128)->Arg(512);

void BM_EmptinessUpdate(benchmark::State &state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(4);
    EmptinessStructure es(n);
    std::vector<std::pair<SetId, ElementKey>> live;
    while (live.size() < n) {
        const SetId s{rng() % 64};
        const ElementKey x = rng() % (4 * n);
        if (es.has_set(s) && es.contains(s, x)) continue;
        es.insert(s, x);
        live.emplace_back(s, x);
    }
    for (auto _ : state) {
        // one delete and one insert keep N fixed
        const std::size_t i = rng() % live.size();
        es.erase(live[i].first, live[i].second);
        SetId s{rng() % 64};
        ElementKey x = rng() % (4 * n);
        while (es.has_set(s) && es.contains(s, x)) x = rng() % (4 * n);
        es.insert(s, x);
        live[i] = {s, x};
    }
    state.SetItemsProcessed(state.iterations() * 2);
}
BENCHMARK(BM_EmptinessUpdate)->RangeMultiplier(4)->Range(1 << 12, 1 << 16);

void BM_CountTriangles(benchmark::State &state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    const auto g = cli::degenerate_graph(m / 8, 8, 5);
    for (auto _ : state) benchmark::DoNotOptimize(count_triangles(g));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.edge_count()));
}
BENCHMARK(BM_CountTriangles)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
