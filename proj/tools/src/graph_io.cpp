#include "setix_cli/graph_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string_view>
#include <unordered_set>

#include "setix/errors.hpp"

namespace setix::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool next_token(std::string_view &rest, std::string_view &tok) {
    rest = trim(rest);
    if (rest.empty()) return false;
    const auto end = rest.find_first_of(" \t");
    tok = rest.substr(0, end);
    rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end);
    return true;
}

std::uint64_t parse_id(std::string_view tok, std::size_t line) {
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size()) {
        throw ParseError(line, "expected a vertex id, got '" + std::string(tok) + "'");
    }
    return v;
}

}  // namespace

LoadedGraph parse_edge_list(std::istream &in) {
    LoadedGraph out;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view rest = line;
        if (auto hash = rest.find('#'); hash != std::string_view::npos) rest = rest.substr(0, hash);
        std::string_view a, b, extra;
        if (!next_token(rest, a)) continue;
        if (!next_token(rest, b)) throw ParseError(lineno, "expected two vertex ids");
        if (next_token(rest, extra)) throw ParseError(lineno, "unexpected token '" + std::string(extra) + "'");
        raw.emplace_back(parse_id(a, lineno), parse_id(b, lineno));
    }
    out.stats.lines = lineno;

    for (auto [u, v] : raw) {
        out.labels.push_back(u);
        out.labels.push_back(v);
    }
    std::sort(out.labels.begin(), out.labels.end());
    out.labels.erase(std::unique(out.labels.begin(), out.labels.end()), out.labels.end());
    auto rank = [&](std::uint64_t id) {
        return static_cast<Vertex>(std::lower_bound(out.labels.begin(), out.labels.end(), id) - out.labels.begin());
    };

    std::vector<Edge> edges;
    edges.reserve(raw.size());
    for (auto [u, v] : raw) {
        if (u == v) {
            ++out.stats.self_loops;
            continue;
        }
        const Vertex a = rank(u), b = rank(v);
        edges.emplace_back(std::min(a, b), std::max(a, b));
    }
    out.graph = Graph::from_edges(out.labels.size(), edges);
    out.stats.duplicates = edges.size() - out.graph.edge_count();
    return out;
}

LoadedGraph load_graph(const std::string &path, const std::string &format) {
    if (format != "edgelist") throw UsageError("unknown graph format '" + format + "'");
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return parse_edge_list(in);
}

void write_edge_list(std::ostream &out, const Graph &g) {
    for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(p);
    std::vector<Edge> edges;
    for (Vertex u = 0; u < n; ++u) {
        for (Vertex v = u + 1; v < n; ++v) {
            if (coin(rng)) edges.emplace_back(u, v);
        }
    }
    return Graph::from_edges(n, edges);
}

Graph degenerate_graph(std::size_t n, std::size_t k, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Edge> edges;
    edges.reserve(n * k);
    for (Vertex v = 0; v < n; ++v) {
        if (v <= k) {
            for (Vertex u = 0; u < v; ++u) edges.emplace_back(u, v);
            continue;
        }
        std::unordered_set<Vertex> picked;
        std::uniform_int_distribution<Vertex> pick(0, v - 1);
        while (picked.size() < k) {
            const Vertex u = pick(rng);
            if (picked.insert(u).second) edges.emplace_back(u, v);
        }
    }
    return Graph::from_edges(n, edges);
}

}  // namespace setix::cli
