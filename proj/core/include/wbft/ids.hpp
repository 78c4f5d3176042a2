#pragma once

#include <cstdint>
#include <functional>

namespace wbft {

// Dense node index, unique within a scenario and stable across rounds.
struct NodeId {
    std::uint32_t value = 0;

    constexpr NodeId() = default;
    constexpr explicit NodeId(std::uint32_t v) : value(v) {}

    constexpr auto operator<=>(const NodeId&) const = default;
};

// Simulated-clock time. One tick is tick_seconds (0.1 ms by default);
// wall time never enters the simulation.
using Ticks = std::int64_t;

} // namespace wbft

template <>
struct std::hash<wbft::NodeId> {
    std::size_t operator()(const wbft::NodeId& id) const noexcept {
        return std::hash<std::uint32_t>{}(id.value);
    }
};
