#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "setix/errors.hpp"
#include "setix_cli/graph_io.hpp"

using namespace setix;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string &args) {
    const std::string cmd = std::string(SETIX_BINARY) + " " + args + " 2>/dev/null";
    Run r;
    std::unique_ptr<FILE, int (*)(FILE *)> pipe(popen(cmd.c_str(), "r"), pclose);
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe.release());
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path write_temp(const std::string &name, const std::string &content) {
    const auto dir = fs::temp_directory_path() / "setix_cli_test";
    fs::create_directories(dir);
    const auto p = dir / name;
    std::ofstream(p) << content;
    return p;
}

const char *kK4 = "# K4\n10 20\n10 30\n10 40\n20 30\n20 40\n30 40\n";

}  // namespace

TEST(EdgeList, ParsesTriangle) {
    std::istringstream in("0 1\n1 2\n\n# comment\n2 0\n");
    const auto g = cli::parse_edge_list(in);
    EXPECT_EQ(g.graph.vertex_count(), 3u);
    EXPECT_EQ(g.graph.edge_count(), 3u);
    EXPECT_EQ(g.stats.self_loops, 0u);
}

TEST(EdgeList, CountsDroppedEdges) {
    std::istringstream in("1 2\n2 1\n3 3\n5 7\n");
    const auto g = cli::parse_edge_list(in);
    EXPECT_EQ(g.stats.duplicates, 1u);
    EXPECT_EQ(g.stats.self_loops, 1u);
    EXPECT_EQ(g.graph.edge_count(), 2u);
    EXPECT_EQ(g.labels, (std::vector<std::uint64_t>{1, 2, 3, 5, 7}));
}

TEST(EdgeList, ParseErrorNamesLine) {
    std::istringstream in("1 2\n3\n");
    try {
        cli::parse_edge_list(in);
        FAIL() << "expected a parse error";
    } catch (const ParseError &e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
}

TEST(EdgeList, RoundTrip) {
    const auto g = cli::erdos_renyi(2000, 0.05, 3);
    ASSERT_GT(g.edge_count(), 90000u);
    std::stringstream buf;
    cli::write_edge_list(buf, g);
    const auto back = cli::parse_edge_list(buf);
    EXPECT_EQ(back.graph.edges(), g.edges());
}

TEST(Cli, CountsK4) {
    const auto p = write_temp("k4.txt", kK4);
    const auto r = run("triangles -i " + p.string() + " --count");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "4\n");
}

TEST(Cli, SortedCheckedOutputUsesOriginalLabels) {
    const auto p = write_temp("k4.txt", kK4);
    const auto r = run("triangles -i " + p.string() + " --sorted --check");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "10 20 30\n10 20 40\n10 30 40\n20 30 40\n");
}

TEST(Cli, ErrorsExitWithUsage) {
    EXPECT_EQ(run("triangles -i /nonexistent/graph.txt").code, 2);
    const auto bad = write_temp("bad.txt", "1 x\n");
    EXPECT_EQ(run("triangles -i " + bad.string()).code, 2);
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("triangles -i " + bad.string() + " --word-layout 48").code, 2);
}

TEST(Cli, SeededRunsAreDeterministic) {
    const auto a = run("selftest --seed 5");
    const auto b = run("selftest --seed 5");
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, InjectedFaultIsReported) {
    const auto r = run("selftest --seed 5 --inject-fault");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("FAIL schedule seed="), std::string::npos);
}
