#pragma once

// Many-to-one specialization: fix a target t, precompute the distance from
// every transit node to t (via the transit table and t's backward access
// nodes) plus exact local distances for sources whose shortest path to t is
// not covered by a transit node. Queries then cost one table-array lookup per
// forward access node of the source plus one local probe.

#include <istream>
#include <ostream>
#include <vector>

#include "chtnr/heap.hpp"
#include "chtnr/io.hpp"
#include "chtnr/tnr.hpp"
#include "chtnr/types.hpp"

namespace chtnr {

// transit_dist[a] = distance from transit node a (internal id) to the target;
// local[v] (internal id) = exact distance to the target for every v with a
// transit-free shortest path to it, INF otherwise.
struct TargetOracle {
    NodeId target = NO_NODE; // input id
    NodeId n = 0;
    NodeId k = 0;
    std::vector<Weight> transit_dist;
    std::vector<Weight> local;

    bool operator==(const TargetOracle&) const = default;

    void serialize(std::ostream& out) const {
        BinaryWriter w(out);
        w.magic(kMagic);
        w.u32(kVersion);
        w.u32(target);
        w.u32(n);
        w.u32(k);
        w.u32_array(transit_dist);
        w.u32_array(local);
        w.check("target oracle dump");
    }

    static TargetOracle deserialize(std::istream& in) {
        BinaryReader r(in);
        r.expect_magic(kMagic, "target oracle");
        r.expect_version(kVersion, "target oracle");
        TargetOracle o;
        o.target = r.u32();
        o.n = r.u32();
        o.k = r.u32();
        o.transit_dist = r.u32_array();
        o.local = r.u32_array();
        require(o.target < o.n, "target oracle dump: bad target");
        require(o.k <= o.n, "target oracle dump: bad transit count");
        require(o.transit_dist.size() == o.k && o.local.size() == o.n,
                "target oracle dump: bad array sizes");
        return o;
    }

    static constexpr char kMagic[5] = "CTO1";
    static constexpr uint32_t kVersion = 1;
};

// transit->target distances: for each transit node a, the minimum over t's
// backward access nodes b of D_T(a, b) + d(b, t). Rows of the table are
// touched only for t's access nodes. A transit target is its own access node
// at distance 0, so its entry is 0 without special casing.
inline std::vector<Weight> build_target_array(const TNRIndex& idx, NodeId t) {
    require(t < idx.n, "target array: node out of range");
    NodeId ti = idx.to_internal(t);
    TNRIndex::Slice back = idx.backward_access(ti);
    std::vector<Weight> arr(idx.k, INF_WEIGHT);
    for (NodeId a = 0; a < idx.k; ++a) {
        Weight best = INF_WEIGHT;
        for (size_t j = 0; j < back.size; ++j) {
            Weight through = add_weights(idx.table_at(a, back.node[j]), back.dist[j]);
            if (through < best) best = through;
        }
        arr[a] = best;
    }
    return arr;
}

// Reverse Dijkstra from the target on the (permuted) input graph, propagating
// a covered flag: a node is covered when it is transit or its tree parent
// toward the target is covered. Distance ties prefer uncovered labels, and at
// equal distance every uncovered label settles before any covered one, so a
// node ends covered only if all its tight parents are covered. Uncovered
// settles record exact distances; the search stops once no uncovered label is
// queued. Returned distances are per internal node id, INF where unset.
inline std::vector<Weight> covering_backward_search(const TNRIndex& idx, NodeId t) {
    require(t < idx.n, "covering search: node out of range");
    const Graph& g = idx.graph;
    NodeId ti = idx.to_internal(t);

    std::vector<Weight> out(idx.n, INF_WEIGHT);
    std::vector<Weight> dist(idx.n, INF_WEIGHT);
    std::vector<uint8_t> covered(idx.n, 1);
    std::vector<bool> done(idx.n, false);
    MinHeap<std::pair<Weight, uint8_t>, NodeId> queue;
    uint64_t uncovered_queued = 0;

    dist[ti] = 0;
    covered[ti] = idx.is_transit_internal(ti) ? 1 : 0;
    queue.push({0, covered[ti]}, ti);
    if (!covered[ti]) ++uncovered_queued;

    while (uncovered_queued > 0 && !queue.empty()) {
        auto [key, v] = queue.pop();
        auto [d, c] = key;
        if (c == 0) --uncovered_queued;
        if (done[v] || d != dist[v] || c != covered[v]) continue; // stale
        done[v] = true;
        if (c == 0) out[v] = d;
        for (uint64_t a = g.in_begin(v); a < g.in_end(v); ++a) {
            NodeId u = g.tail(a);
            if (done[u]) continue;
            Weight cand = add_weights(d, g.in_weight(a));
            uint8_t child_cov = (c != 0 || idx.is_transit_internal(u)) ? 1 : 0;
            bool better = cand < dist[u];
            bool uncover_tie = cand == dist[u] && covered[u] != 0 && child_cov == 0;
            if (!better && !uncover_tie) continue;
            dist[u] = cand;
            covered[u] = child_cov;
            queue.push({cand, child_cov}, u);
            if (child_cov == 0) ++uncovered_queued;
        }
    }
    return out;
}

inline TargetOracle build_target_oracle(const TNRIndex& idx, NodeId t) {
    TargetOracle o;
    o.target = t;
    o.n = idx.n;
    o.k = idx.k;
    o.transit_dist = build_target_array(idx, t);
    o.local = covering_backward_search(idx, t);
    return o;
}

struct TargetQueryResult {
    Weight distance = INF_WEIGHT;
    uint32_t array_lookups = 0; // transit-array reads, <= |forward access set|
    uint32_t local_probes = 0;  // always exactly one
};

// Exact source->target distance: the local probe answers uncovered pairs, the
// forward access set against the transit array answers everything else.
inline TargetQueryResult one_to_target(const TargetOracle& oracle, const TNRIndex& idx, NodeId s) {
    require(s < idx.n, "target query: node out of range");
    require(oracle.n == idx.n && oracle.k == idx.k, "target query: oracle/index mismatch");
    NodeId si = idx.to_internal(s);
    TargetQueryResult res;
    res.distance = oracle.local[si];
    res.local_probes = 1;
    TNRIndex::Slice fwd = idx.forward_access(si);
    for (size_t i = 0; i < fwd.size; ++i) {
        ++res.array_lookups;
        Weight through = add_weights(fwd.dist[i], oracle.transit_dist[fwd.node[i]]);
        if (through < res.distance) res.distance = through;
    }
    return res;
}

} // namespace chtnr
