#include "setix_cli/selftest.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <string>

#include "setix/emptiness.hpp"
#include "setix/fully_dynamic.hpp"
#include "setix/incremental_witness.hpp"
#include "setix/oracle.hpp"
#include "setix/packed_sets.hpp"
#include "setix_cli/graph_io.hpp"

namespace setix::cli {

namespace {

struct Failure {
    std::size_t step;
    std::string what;
};

using Schedule = std::function<std::optional<Failure>(std::uint64_t seed)>;

template <class Family>
std::optional<Failure> packed_schedule(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t caps[] = {16, 128, 512};
    const std::size_t d = caps[rng() % 3];
    Family family(d, rng());
    OracleFamily oracle;
    constexpr std::size_t kSets = 5;
    for (std::size_t s = 0; s < kSets; ++s) {
        family.add_set(SetId{s});
        oracle.add_set(SetId{s});
    }
    std::uniform_int_distribution<ElementKey> pick(0, 2 * d);
    for (std::size_t step = 0; step < 4 * d; ++step) {
        const SetId s{rng() % kSets};
        const ElementKey e = pick(rng);
        if (oracle.contains(s, e)) {
            family.erase(s, e);
            oracle.erase(s, e);
        } else if (oracle.size(s) + 2 < d) {
            family.insert(s, e);
            oracle.insert(s, e);
        }
        const SetId a{rng() % kSets}, b{rng() % kSets};
        auto got = family.intersect_report(a, b);
        std::sort(got.begin(), got.end());
        if (got != oracle.intersect(a, b)) return Failure{step, "report differs from oracle"};
        const auto w = family.intersect_witness(a, b);
        if (w.has_value() == got.empty() || (w && !std::binary_search(got.begin(), got.end(), *w))) {
            return Failure{step, "witness differs from oracle"};
        }
    }
    return std::nullopt;
}

std::optional<Failure> emptiness_schedule(std::uint64_t seed, bool fault) {
    std::mt19937_64 rng(seed);
    EmptinessStructure es(EmptinessOptions{.space_budget = rng() % 2 ? 16u : 64u, .fault_skip_reciprocal = fault});
    OracleFamily oracle;
    constexpr std::size_t kSets = 6;
    for (std::size_t s = 0; s < kSets; ++s) {
        es.add_set(SetId{s});
        oracle.add_set(SetId{s});
    }
    for (std::size_t step = 0; step < 1500; ++step) {
        const SetId s{rng() % kSets};
        const ElementKey e = rng() % 80;
        const bool grow = rng() % 100 < (step < 700 ? 75u : 35u);
        if (grow && !oracle.contains(s, e)) {
            es.insert(s, e);
            oracle.insert(s, e);
        } else if (!grow && oracle.contains(s, e)) {
            es.erase(s, e);
            oracle.erase(s, e);
        }
        if (auto p = es.audit(); !p.empty()) return Failure{step, p.front()};
        const SetId a{rng() % kSets}, b{rng() % kSets};
        if (es.disjoint(a, b) != oracle.intersect(a, b).empty()) return Failure{step, "disjointness differs from oracle"};
    }
    return std::nullopt;
}

std::optional<Failure> witness_schedule(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    WitnessStructure ws(WitnessOptions{.tau = rng() % 2 ? 16u : 0u, .seed = rng()});
    OracleFamily oracle;
    constexpr std::size_t kSets = 6;
    for (std::size_t s = 0; s < kSets; ++s) {
        ws.add_set(SetId{s});
        oracle.add_set(SetId{s});
    }
    for (std::size_t step = 0; step < 1200; ++step) {
        // a few sets receive most insertions so every class is reached
        const SetId s{rng() % (step % 3 ? 2 : kSets)};
        const ElementKey e = rng() % 600;
        if (!oracle.contains(s, e)) {
            ws.insert(s, e);
            oracle.insert(s, e);
        }
        if (auto p = ws.audit(); !p.empty()) return Failure{step, p.front()};
        const SetId a{rng() % kSets}, b{rng() % kSets};
        const auto w = ws.witness(a, b);
        const auto expect = oracle.intersect(a, b);
        if (w.has_value() == expect.empty() || (w && !std::binary_search(expect.begin(), expect.end(), *w))) {
            return Failure{step, "witness differs from oracle"};
        }
    }
    return std::nullopt;
}

std::optional<Failure> tree_schedule(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    IntersectionTree tree(rng() % 2 ? 64 : 4096, rng());
    OracleFamily oracle;
    constexpr std::size_t kSets = 5;
    for (std::size_t s = 0; s < kSets; ++s) {
        tree.add_set(SetId{s});
        oracle.add_set(SetId{s});
    }
    for (std::size_t step = 0; step < 800; ++step) {
        const SetId s{rng() % kSets};
        const ElementKey e = rng() % 150;
        const bool grow = rng() % 100 < (step < 500 ? 80u : 30u);
        if (grow && !oracle.contains(s, e)) {
            tree.insert(s, e);
            oracle.insert(s, e);
        } else if (!grow && oracle.contains(s, e)) {
            tree.erase(s, e);
            oracle.erase(s, e);
        }
        if (auto p = tree.audit(); !p.empty()) return Failure{step, p.front()};
        const SetId a{rng() % kSets}, b{rng() % kSets};
        auto got = tree.report(a, b);
        std::sort(got.begin(), got.end());
        const auto expect = oracle.intersect(a, b);
        if (got != expect) return Failure{step, "report differs from oracle"};
        const auto w = tree.witness(a, b);
        if (w.has_value() == expect.empty() || (w && !std::binary_search(expect.begin(), expect.end(), *w))) {
            return Failure{step, "witness differs from oracle"};
        }
    }
    return std::nullopt;
}

std::optional<Failure> triangle_schedule(std::uint64_t seed, WordLayout layout) {
    std::mt19937_64 rng(seed);
    const double ps[] = {0.05, 0.2, 0.5};
    const Graph g = erdos_renyi(20 + rng() % 60, ps[rng() % 3], rng());
    auto got = enumerate_triangles(g, TriangleOptions{.seed = rng(), .layout = layout});
    std::sort(got.begin(), got.end());
    if (got != oracle_triangles(g)) return Failure{0, "triangles differ from oracle"};
    return std::nullopt;
}

}  // namespace

bool run_selftest(const SelftestConfig &cfg, std::ostream &out) {
    struct Suite {
        const char *name;
        std::size_t schedules;
        Schedule run;
    };
    const bool narrow = cfg.layout == WordLayout::Test32;
    const Suite suites[] = {
        {"packed", 60,
         [narrow](std::uint64_t s) { return narrow ? packed_schedule<PackedFamily32>(s) : packed_schedule<PackedFamily>(s); }},
        {"triangles", 40, [&](std::uint64_t s) { return triangle_schedule(s, cfg.layout); }},
        {"emptiness", 12, [&](std::uint64_t s) { return emptiness_schedule(s, cfg.inject_fault); }},
        {"witness", 12, witness_schedule},
        {"tree", 4, tree_schedule},
    };
    SeedStream seeds(cfg.seed);
    bool ok = true;
    for (const auto &suite : suites) {
        std::size_t passed = 0;
        std::optional<std::pair<std::uint64_t, Failure>> failed;
        for (std::size_t i = 0; i < suite.schedules; ++i) {
            const std::uint64_t s = seeds.next();
            if (auto f = suite.run(s)) {
                failed.emplace(s, *f);
                break;
            }
            ++passed;
        }
        if (failed) {
            ok = false;
            out << suite.name << ": FAIL schedule seed=" << failed->first << " step=" << failed->second.step << ": "
                << failed->second.what << '\n';
        } else {
            out << suite.name << ": ok (" << passed << " schedules)\n";
        }
    }
    return ok;
}

}  // namespace setix::cli
