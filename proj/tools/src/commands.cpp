#include "setix_cli/commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>

#include "setix/errors.hpp"
#include "setix/hashing.hpp"
#include "setix/oracle.hpp"
#include "setix_cli/bench.hpp"
#include "setix_cli/graph_io.hpp"
#include "setix_cli/selftest.hpp"

namespace setix::cli {

namespace {

// "-" is standard output.
class Output {
  public:
    explicit Output(const std::string &path) {
        if (path == "-") return;
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_) throw std::runtime_error("cannot write '" + path + "'");
    }
    std::ostream &stream() { return file_ ? *file_ : std::cout; }

  private:
    std::unique_ptr<std::ofstream> file_;
};

}  // namespace

WordLayout parse_layout(const std::string &s) {
    if (s == "64") return WordLayout::Native64;
    if (s == "32") return WordLayout::Test32;
    throw UsageError("word layout must be 64 or 32, got '" + s + "'");
}

int cmd_triangles(const RunConfig &cfg, std::ostream &err) {
    if (cfg.input.empty()) throw UsageError("triangles needs --input");
    const LoadedGraph loaded = load_graph(cfg.input, cfg.format);
    if (loaded.stats.self_loops + loaded.stats.duplicates > 0) {
        err << "warning: dropped " << loaded.stats.self_loops << " self-loop(s) and " << loaded.stats.duplicates
            << " duplicate edge(s)\n";
    }
    const Graph &g = loaded.graph;
    const TriangleOptions opts{.seed = resolve_seed(cfg.seed), .threads = cfg.threads, .layout = cfg.layout};
    Output out(cfg.output);

    if (cfg.count && !cfg.check) {
        out.stream() << count_triangles(g, opts) << '\n';
        return kOk;
    }
    auto tris = enumerate_triangles(g, opts);
    if (cfg.check) {
        auto got = tris;
        std::sort(got.begin(), got.end());
        // the cubic oracle for small graphs, the edge iterator beyond
        const auto expect = g.vertex_count() <= 300 ? oracle_triangles(g) : oracle_triangles_edge_iterator(g);
        if (got != expect) {
            err << "check failed: " << got.size() << " triangles, oracle has " << expect.size() << '\n';
            return kVerifyFailed;
        }
    }
    if (cfg.count) {
        out.stream() << tris.size() << '\n';
        return kOk;
    }
    if (cfg.sorted) std::sort(tris.begin(), tris.end());
    auto &os = out.stream();
    for (const auto &t : tris) {
        os << loaded.labels[t[0]] << ' ' << loaded.labels[t[1]] << ' ' << loaded.labels[t[2]] << '\n';
    }
    return kOk;
}

int cmd_bench(const RunConfig &cfg, std::ostream &) {
    const BenchConfig bc{.seed = resolve_seed(cfg.seed), .threads = cfg.threads, .layout = cfg.layout};
    const auto rows = run_bench(bc);
    Output out(cfg.output);
    write_csv(out.stream(), rows);
    return kOk;
}

int cmd_selftest(const RunConfig &cfg, std::ostream &err) {
    const SelftestConfig sc{.seed = resolve_seed(cfg.seed), .layout = cfg.layout, .inject_fault = cfg.inject_fault};
    Output out(cfg.output);
    if (run_selftest(sc, out.stream())) return kOk;
    err << "selftest failed\n";
    return kVerifyFailed;
}

}  // namespace setix::cli
