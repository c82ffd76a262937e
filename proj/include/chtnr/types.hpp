#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace chtnr {

using NodeId = uint32_t;
using Weight = uint32_t;

// Sentinel for "no path"; never produced by addition (all sums saturate).
inline constexpr Weight INF_WEIGHT = std::numeric_limits<Weight>::max();
// Sentinel for "no node" (absent middle node, unassigned representative, ...).
inline constexpr NodeId NO_NODE = std::numeric_limits<NodeId>::max();

// Saturating addition: any sum that would reach or exceed INF_WEIGHT, or that
// involves INF_WEIGHT itself, yields INF_WEIGHT.
inline Weight add_weights(Weight a, Weight b) {
    if (a == INF_WEIGHT || b == INF_WEIGHT) return INF_WEIGHT;
    uint64_t s = static_cast<uint64_t>(a) + static_cast<uint64_t>(b);
    return s >= INF_WEIGHT ? INF_WEIGHT : static_cast<Weight>(s);
}

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw Error(msg);
}

} // namespace chtnr
