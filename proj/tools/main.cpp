#include <iostream>

#include <CLI11.hpp>

#include "setix/errors.hpp"
#include "setix_cli/commands.hpp"

using namespace setix::cli;

int main(int argc, char **argv) {
    CLI::App app{"Set intersection structures: triangle listing, benchmarks and self-checks"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string layout = "64";
    auto common = [&](CLI::App *cmd) {
        cmd->add_option("--seed", cfg.seed, "64-bit seed (default: SETIX_SEED, then random)");
        cmd->add_option("--word-layout", layout, "packed word layout: 64 or 32 (test layout)")
            ->check(CLI::IsMember({"64", "32"}));
        cmd->add_option("--output,-o", cfg.output, "output path, - for standard output");
        cmd->add_option("--threads", cfg.threads, "worker threads")->check(CLI::Range(1u, 256u));
    };

    auto *tri = app.add_subcommand("triangles", "list or count the triangles of a graph");
    common(tri);
    tri->add_option("--input,-i", cfg.input, "edge-list file")->required();
    tri->add_option("--format", cfg.format, "input format")->check(CLI::IsMember({"edgelist"}));
    tri->add_flag("--count", cfg.count, "print only the number of triangles");
    tri->add_flag("--sorted", cfg.sorted, "print triples in lexicographic order");
    tri->add_flag("--check", cfg.check, "verify against a brute-force oracle");

    auto *bench = app.add_subcommand("bench", "run the counter sweeps and print CSV");
    common(bench);

    auto *self = app.add_subcommand("selftest", "randomized oracle-equivalence schedules");
    common(self);
    self->add_flag("--inject-fault", cfg.inject_fault, "break the emptiness table updates on purpose")
        ->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kUsage;
    }

    try {
        cfg.layout = parse_layout(layout);
        if (*tri) return cmd_triangles(cfg, std::cerr);
        if (*bench) return cmd_bench(cfg, std::cerr);
        return cmd_selftest(cfg, std::cerr);
    } catch (const setix::ParseError &e) {
        std::cerr << "error: " << cfg.input << ": " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
}
