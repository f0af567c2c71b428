#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "setix/triangle_enum.hpp"

namespace setix::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kUsage = 2 };

struct RunConfig {
    std::optional<std::uint64_t> seed;  ///< falls back to SETIX_SEED, then entropy
    WordLayout layout = WordLayout::Native64;
    std::string input;
    std::string output = "-";
    std::string format = "edgelist";
    bool count = false;
    bool sorted = false;
    bool check = false;
    unsigned threads = 1;
    bool inject_fault = false;
};

/// "64" or "32".
WordLayout parse_layout(const std::string &s);

int cmd_triangles(const RunConfig &cfg, std::ostream &err);
int cmd_bench(const RunConfig &cfg, std::ostream &err);
int cmd_selftest(const RunConfig &cfg, std::ostream &err);

}  // namespace setix::cli
