#pragma once

#include <cstdint>
#include <functional>
#include <utility>

namespace setix {

/// Identifier of a set within a family.
enum class SetId : std::uint64_t {};

constexpr std::uint64_t to_underlying(SetId s) noexcept { return static_cast<std::uint64_t>(s); }

/// Unordered pair of set ids, normalised so that first <= second.
struct SetPair {
    SetId first;
    SetId second;

    static constexpr SetPair of(SetId a, SetId b) noexcept { return a < b ? SetPair{a, b} : SetPair{b, a}; }

    friend constexpr bool operator==(const SetPair &, const SetPair &) = default;
};

struct SetPairHash {
    std::size_t operator()(const SetPair &p) const noexcept {
        const std::uint64_t h = to_underlying(p.first) * 0x9E3779B97F4A7C15ull ^ to_underlying(p.second);
        return std::hash<std::uint64_t>{}(h);
    }
};

}  // namespace setix
