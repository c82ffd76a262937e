#pragma once

// Shared graph fixtures and deterministic generators for unit and acceptance
// tests.
//
//   P4:       path 0 - 1 - 2 - 3, unit weights, both directions per edge.
//   G0:       diamond on {0..4}: edges (0,1,2) (1,2,2) (0,3,1) (3,2,4) (2,4,1),
//             both directions per edge.
//   triangle: 0 - 1 (1), 1 - 2 (1), 0 - 2 (2), both directions per edge.

#include <cstdint>
#include <random>
#include <vector>

#include "chtnr/graph.hpp"
#include "chtnr/types.hpp"

namespace fixtures {

using chtnr::Graph;
using chtnr::InputArc;
using chtnr::NodeId;
using chtnr::Weight;

inline void add_edge(std::vector<InputArc>& arcs, NodeId u, NodeId v, Weight w) {
    arcs.push_back({u, v, w});
    arcs.push_back({v, u, w});
}

inline Graph p4() {
    std::vector<InputArc> arcs;
    add_edge(arcs, 0, 1, 1);
    add_edge(arcs, 1, 2, 1);
    add_edge(arcs, 2, 3, 1);
    return Graph::from_arcs(4, std::move(arcs));
}

inline Graph g0() {
    std::vector<InputArc> arcs;
    add_edge(arcs, 0, 1, 2);
    add_edge(arcs, 1, 2, 2);
    add_edge(arcs, 0, 3, 1);
    add_edge(arcs, 3, 2, 4);
    add_edge(arcs, 2, 4, 1);
    return Graph::from_arcs(5, std::move(arcs));
}

inline Graph triangle() {
    std::vector<InputArc> arcs;
    add_edge(arcs, 0, 1, 1);
    add_edge(arcs, 1, 2, 1);
    add_edge(arcs, 0, 2, 2);
    return Graph::from_arcs(3, std::move(arcs));
}

// Strongly connected random graph: a directed cycle over a random node
// permutation plus extra random arcs. Weights uniform in [min_w, max_w].
inline Graph random_strongly_connected(NodeId n, uint64_t extra_arcs, uint64_t seed,
                                       Weight min_w = 1, Weight max_w = 1000) {
    std::mt19937_64 rng(seed);
    auto rand_below = [&](uint64_t bound) { return bound ? rng() % bound : 0; };
    std::vector<NodeId> perm(n);
    for (NodeId v = 0; v < n; ++v) perm[v] = v;
    for (NodeId v = n; v > 1; --v) std::swap(perm[v - 1], perm[rand_below(v)]);

    std::vector<InputArc> arcs;
    auto rand_weight = [&] {
        return static_cast<Weight>(min_w + rand_below(static_cast<uint64_t>(max_w) - min_w + 1));
    };
    for (NodeId i = 0; i < n; ++i)
        arcs.push_back({perm[i], perm[(i + 1) % n], rand_weight()});
    for (uint64_t e = 0; e < extra_arcs; ++e) {
        NodeId u = static_cast<NodeId>(rand_below(n));
        NodeId v = static_cast<NodeId>(rand_below(n));
        if (u == v) continue;
        arcs.push_back({u, v, rand_weight()});
    }
    return Graph::from_arcs(n, std::move(arcs));
}

// Random graph with no connectivity guarantee (for INF-handling tests).
inline Graph random_sparse(NodeId n, uint64_t num_arcs, uint64_t seed, Weight min_w = 1,
                           Weight max_w = 1000) {
    std::mt19937_64 rng(seed);
    auto rand_below = [&](uint64_t bound) { return bound ? rng() % bound : 0; };
    std::vector<InputArc> arcs;
    for (uint64_t e = 0; e < num_arcs; ++e) {
        NodeId u = static_cast<NodeId>(rand_below(n));
        NodeId v = static_cast<NodeId>(rand_below(n));
        if (u == v) continue;
        arcs.push_back({u, v, static_cast<Weight>(
                                  min_w + rand_below(static_cast<uint64_t>(max_w) - min_w + 1))});
    }
    return Graph::from_arcs(n, std::move(arcs));
}

// side x side unit grid, both directions per edge. Node (r, c) has id
// r * side + c.
inline Graph grid(NodeId side) {
    std::vector<InputArc> arcs;
    for (NodeId r = 0; r < side; ++r) {
        for (NodeId c = 0; c < side; ++c) {
            NodeId v = r * side + c;
            if (c + 1 < side) add_edge(arcs, v, v + 1, 1);
            if (r + 1 < side) add_edge(arcs, v, v + side, 1);
        }
    }
    return Graph::from_arcs(side * side, std::move(arcs));
}

// Star: center 0 with `leaves` unit-weight spokes, both directions.
inline Graph star(NodeId leaves) {
    std::vector<InputArc> arcs;
    for (NodeId leaf = 1; leaf <= leaves; ++leaf) add_edge(arcs, 0, leaf, 1);
    return Graph::from_arcs(leaves + 1, std::move(arcs));
}

} // namespace fixtures
