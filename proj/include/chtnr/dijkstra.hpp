#pragma once

// Plain Dijkstra on the input graph. Deterministic: the priority queue orders
// by (distance, node id), so equal-distance nodes settle in increasing id
// order. Records the settle order, which defines Dijkstra ranks (the s-th
// settled node, counting the source as position 1).

#include <cstdint>
#include <optional>
#include <queue>
#include <vector>

#include "chtnr/graph.hpp"
#include "chtnr/types.hpp"

namespace chtnr {

enum class Direction : uint8_t { forward = 0, backward = 1 };

struct DijkstraResult {
    std::vector<Weight> dist;   // INF_WEIGHT where unreached
    std::vector<NodeId> order;  // nodes in settle order; order[0] == source
};

// Runs until the queue is empty, all requested targets are settled, or
// rank_limit nodes have been settled, whichever comes first.
inline DijkstraResult dijkstra(const Graph& g, NodeId source,
                               const std::vector<NodeId>& targets = {},
                               std::optional<uint64_t> rank_limit = std::nullopt,
                               Direction dir = Direction::forward) {
    const NodeId n = g.node_count();
    require(source < n, "dijkstra: source out of range");
    for (NodeId t : targets) require(t < n, "dijkstra: target out of range");

    DijkstraResult res;
    res.dist.assign(n, INF_WEIGHT);
    std::vector<bool> settled(n, false);

    using Entry = std::pair<Weight, NodeId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;
    res.dist[source] = 0;
    queue.push({0, source});

    std::vector<bool> wanted(targets.empty() ? 0 : n, false);
    uint64_t targets_left = 0;
    for (NodeId t : targets) {
        if (!wanted[t]) ++targets_left;
        wanted[t] = true;
    }

    while (!queue.empty()) {
        auto [d, v] = queue.top();
        queue.pop();
        if (settled[v]) continue;
        settled[v] = true;
        res.order.push_back(v);

        if (!targets.empty() && wanted[v] && --targets_left == 0) break;
        if (rank_limit && res.order.size() >= *rank_limit) break;

        if (dir == Direction::forward) {
            for (uint64_t a = g.out_begin(v); a < g.out_end(v); ++a) {
                NodeId w = g.head(a);
                Weight cand = add_weights(d, g.weight(a));
                if (cand < res.dist[w]) {
                    res.dist[w] = cand;
                    queue.push({cand, w});
                }
            }
        } else {
            for (uint64_t a = g.in_begin(v); a < g.in_end(v); ++a) {
                NodeId w = g.tail(a);
                Weight cand = add_weights(d, g.in_weight(a));
                if (cand < res.dist[w]) {
                    res.dist[w] = cand;
                    queue.push({cand, w});
                }
            }
        }
    }
    return res;
}

} // namespace chtnr
