#pragma once

// Many-to-many distance tables via the two-phase bucket algorithm: one
// backward downward search per target deposits (target, distance) entries at
// every settled node; one forward upward search per source then scans the
// buckets it touches. Half searches run without stall-on-demand so no entry
// that a shortest up-down path needs is suppressed.

#include <cstdint>
#include <vector>

#include "chtnr/ch.hpp"
#include "chtnr/heap.hpp"
#include "chtnr/types.hpp"

namespace chtnr {

struct DistanceTable {
    std::vector<NodeId> sources;
    std::vector<NodeId> targets;
    std::vector<Weight> entries; // row-major: entries[i * targets.size() + j]

    Weight at(size_t source_index, size_t target_index) const {
        return entries[source_index * targets.size() + target_index];
    }
};

struct BucketEntry {
    uint32_t target_index;
    Weight dist;
};

// One upward or downward half search; calls visit(node, dist) per settled node.
template <typename Visit>
inline void half_search(const CHIndex& ch, NodeId start, bool forward, StampedWeights& dist,
                        MinHeap<Weight, NodeId>& queue, Visit&& visit) {
    dist.reset();
    queue.clear();
    dist.set(start, 0);
    queue.push(0, start);
    const auto& first = forward ? ch.up_first : ch.dn_first;
    const auto& head = forward ? ch.up_head : ch.dn_head;
    const auto& weight = forward ? ch.up_weight : ch.dn_weight;
    while (!queue.empty()) {
        auto [d, v] = queue.pop();
        if (d > dist.get(v)) continue; // stale
        visit(v, d);
        for (uint64_t a = first[v]; a < first[v + 1]; ++a) {
            NodeId w = head[a];
            Weight cand = add_weights(d, weight[a]);
            if (cand < dist.get(w)) {
                dist.set(w, cand);
                queue.push(cand, w);
            }
        }
    }
}

// Exact distance table for all (source, target) pairs. Duplicate ids are
// allowed and produce duplicate rows/columns.
inline DistanceTable build_distance_table(const CHIndex& ch, std::vector<NodeId> sources,
                                          std::vector<NodeId> targets) {
    for (NodeId v : sources) require(v < ch.n, "distance table: source out of range");
    for (NodeId v : targets) require(v < ch.n, "distance table: target out of range");

    DistanceTable table;
    table.sources = std::move(sources);
    table.targets = std::move(targets);
    table.entries.assign(table.sources.size() * table.targets.size(), INF_WEIGHT);

    std::vector<std::vector<BucketEntry>> buckets(ch.n);
    StampedWeights dist;
    dist.resize(ch.n);
    MinHeap<Weight, NodeId> queue;

    for (uint32_t j = 0; j < table.targets.size(); ++j)
        half_search(ch, table.targets[j], /*forward=*/false, dist, queue,
                    [&](NodeId v, Weight d) { buckets[v].push_back({j, d}); });

    const size_t cols = table.targets.size();
    for (uint32_t i = 0; i < table.sources.size(); ++i)
        half_search(ch, table.sources[i], /*forward=*/true, dist, queue, [&](NodeId v, Weight d) {
            for (const BucketEntry& e : buckets[v]) {
                Weight cand = add_weights(d, e.dist);
                Weight& cell = table.entries[i * cols + e.target_index];
                if (cand < cell) cell = cand;
            }
        });
    return table;
}

} // namespace chtnr
