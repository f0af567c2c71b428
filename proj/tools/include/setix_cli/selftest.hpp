#pragma once

#include <cstdint>
#include <iosfwd>

#include "setix/triangle_enum.hpp"

namespace setix::cli {

struct SelftestConfig {
    std::uint64_t seed = 0;
    WordLayout layout = WordLayout::Native64;
    /// Test hook: emptiness structures skip the reciprocal table update.
    bool inject_fault = false;
};

/// Randomized oracle-equivalence schedules for every structure. Writes one
/// line per structure; on a mismatch names the schedule seed and the first
/// failing step. Returns true iff everything agreed.
bool run_selftest(const SelftestConfig &cfg, std::ostream &out);

}  // namespace setix::cli
