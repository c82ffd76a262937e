#pragma once

// Transit-node preprocessing on top of a contraction hierarchy: the top-k
// nodes by rank form the transit set, pruned upward/downward searches yield
// access-node candidates and search spaces, the transit distance table prunes
// candidates down to minimal access sets, and graph Voronoi regions compress
// the search spaces into the locality-filter store.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <istream>
#include <ostream>
#include <thread>
#include <vector>

#include "chtnr/ch.hpp"
#include "chtnr/dijkstra.hpp"
#include "chtnr/graph.hpp"
#include "chtnr/heap.hpp"
#include "chtnr/io.hpp"
#include "chtnr/many_to_many.hpp"
#include "chtnr/types.hpp"

namespace chtnr {

// The k nodes of highest rank, as ids in increasing order.
inline std::vector<NodeId> select_transit_nodes(const CHIndex& ch, NodeId k) {
    require(k >= 1 && k <= ch.n, "transit set size must be in [1, n]");
    std::vector<NodeId> transit;
    transit.reserve(k);
    for (NodeId v = 0; v < ch.n; ++v)
        if (ch.rank[v] >= ch.n - k) transit.push_back(v);
    return transit;
}

//------------------------------------------------------- access searches ----

struct AccessEntry {
    NodeId node;
    Weight dist;

    bool operator==(const AccessEntry&) const = default;
};

struct AccessSearchResult {
    std::vector<AccessEntry> candidates; // settled transit nodes, by id
    std::vector<NodeId> space;           // settled non-transit nodes, by id
};

struct HalfSearchScratch {
    StampedWeights dist;
    MinHeap<Weight, NodeId> queue;

    void prepare(NodeId n) {
        if (dist.size() != n) dist.resize(n);
        dist.reset();
        queue.clear();
    }
};

// Upward (forward) or downward (backward) half search from v that never
// relaxes arcs out of settled transit nodes. Reported transit nodes are a
// superset of the true access nodes; distances of true access nodes are exact.
// stall-on-demand runs at the given hop depth (0 disables it).
inline AccessSearchResult find_access_raw(const CHIndex& ch, const std::vector<bool>& is_transit,
                                          NodeId v, Direction dir, uint32_t stall_hops,
                                          HalfSearchScratch* scratch = nullptr) {
    require(v < ch.n, "access search: node out of range");
    HalfSearchScratch local;
    HalfSearchScratch& sc = scratch ? *scratch : local;
    sc.prepare(ch.n);

    const bool forward = dir == Direction::forward;
    const auto& first = forward ? ch.up_first : ch.dn_first;
    const auto& head = forward ? ch.up_head : ch.dn_head;
    const auto& weight = forward ? ch.up_weight : ch.dn_weight;

    AccessSearchResult res;
    sc.dist.set(v, 0);
    sc.queue.push(0, v);
    while (!sc.queue.empty()) {
        auto [d, u] = sc.queue.pop();
        if (d > sc.dist.get(u)) continue; // stale
        if (is_transit[u]) {
            res.candidates.push_back({u, d});
            continue; // do not relax arcs leaving transit nodes
        }
        res.space.push_back(u);
        for (uint64_t a = first[u]; a < first[u + 1]; ++a) {
            NodeId w = head[a];
            Weight cand = add_weights(d, weight[a]);
            if (cand >= sc.dist.get(w)) continue;
            if (stall_hops > 0 && detail::stall_witness(ch, sc.dist, forward, w, cand, stall_hops))
                continue;
            sc.dist.set(w, cand);
            sc.queue.push(cand, w);
        }
    }
    std::sort(res.candidates.begin(), res.candidates.end(),
              [](const AccessEntry& a, const AccessEntry& b) { return a.node < b.node; });
    std::sort(res.space.begin(), res.space.end());
    return res;
}

// Post-search stalling: candidate t2 is discarded when some surviving t1
// reaches it at least as cheaply through the transit table
// (d(t1) + D(t1, t2) <= d(t2)). Scanning dominators in increasing id order
// makes the lower id survive when two equidistant candidates dominate each
// other. dt(a, b) must return the transit table distance from a to b in the
// direction of travel.
template <typename DtFn>
inline std::vector<AccessEntry> post_search_stall(std::vector<AccessEntry> candidates, DtFn&& dt) {
    std::sort(candidates.begin(), candidates.end(),
              [](const AccessEntry& a, const AccessEntry& b) { return a.node < b.node; });
    std::vector<bool> dead(candidates.size(), false);
    for (size_t i = 0; i < candidates.size(); ++i) {
        if (dead[i]) continue;
        for (size_t j = 0; j < candidates.size(); ++j) {
            if (j == i || dead[j]) continue;
            if (add_weights(candidates[i].dist, dt(candidates[i].node, candidates[j].node)) <=
                candidates[j].dist)
                dead[j] = true;
        }
    }
    std::vector<AccessEntry> out;
    for (size_t i = 0; i < candidates.size(); ++i)
        if (!dead[i]) out.push_back(candidates[i]);
    return out;
}

//----------------------------------------------------------- voronoi ----

// Graph Voronoi regions of the transit set: rep[u] is the transit node
// minimizing the forward distance from u into the set (computed as one
// multi-source Dijkstra on the reversed graph), ties toward the lower transit
// id. Nodes that reach no transit node get NO_NODE (a dummy region).
inline std::vector<NodeId> compute_voronoi(const Graph& g, const std::vector<NodeId>& transit) {
    const NodeId n = g.node_count();
    std::vector<Weight> dist(n, INF_WEIGHT);
    std::vector<NodeId> rep(n, NO_NODE);
    std::vector<bool> seed(n, false);
    MinHeap<std::pair<Weight, NodeId>, NodeId> queue; // key: (distance, representative)
    for (NodeId t : transit) {
        require(t < n, "voronoi: transit node out of range");
        seed[t] = true;
        dist[t] = 0;
        rep[t] = t;
        queue.push({0, t}, t);
    }
    while (!queue.empty()) {
        auto [key, v] = queue.pop();
        auto [d, r] = key;
        if (d != dist[v] || r != rep[v]) continue; // stale label
        for (uint64_t a = g.in_begin(v); a < g.in_end(v); ++a) {
            NodeId u = g.tail(a);
            if (seed[u]) continue; // transit nodes keep themselves
            Weight cand = add_weights(d, g.in_weight(a));
            if (cand < dist[u] || (cand == dist[u] && r < rep[u])) {
                dist[u] = cand;
                rep[u] = r;
                queue.push({cand, r}, u);
            }
        }
    }
    return rep;
}

//---------------------------------------------------------- renumbering ----

enum class NonTransitOrder : uint32_t {
    dfs_increasing = 0, // post-order upward DFS, ids assigned upward
    dfs_decreasing = 1, // post-order upward DFS, ids assigned downward
    input_level = 2,    // hierarchy level top-down, input order within a level
};

inline const char* to_string(NonTransitOrder o) {
    switch (o) {
        case NonTransitOrder::dfs_increasing: return "dfs-increasing";
        case NonTransitOrder::dfs_decreasing: return "dfs-decreasing";
        case NonTransitOrder::input_level: return "input-level";
    }
    throw Error("unknown renumbering strategy");
}

inline NonTransitOrder non_transit_order_from_string(const std::string& s) {
    if (s == "dfs-increasing") return NonTransitOrder::dfs_increasing;
    if (s == "dfs-decreasing") return NonTransitOrder::dfs_decreasing;
    if (s == "input-level") return NonTransitOrder::input_level;
    throw Error("unknown renumbering strategy '" + s + "'");
}

// Builds the node permutation that moves the transit set to [0, k). Transit
// nodes are ordered by hierarchy level top-down (input id within a level);
// non-transit nodes follow one of three strategies. The DFS strategies run an
// upward DFS from every node in input order, walking search-graph arcs toward
// higher ranks through not-yet-numbered non-transit nodes, and number a node
// once all its upward neighbors are numbered (post-order); ids are handed out
// in increasing or decreasing order of finish time.
inline Permutation renumber(const CHIndex& ch, const std::vector<NodeId>& transit,
                            NonTransitOrder strategy) {
    const NodeId n = ch.n;
    std::vector<bool> is_transit(n, false);
    for (NodeId t : transit) {
        require(t < n, "renumber: transit node out of range");
        require(!is_transit[t], "renumber: duplicate transit node");
        is_transit[t] = true;
    }
    const NodeId k = static_cast<NodeId>(transit.size());

    Permutation perm;
    perm.to_new.assign(n, NO_NODE);

    auto level_top_down = [&](std::vector<NodeId> nodes) {
        std::stable_sort(nodes.begin(), nodes.end(), [&](NodeId a, NodeId b) {
            return ch.level[a] != ch.level[b] ? ch.level[a] > ch.level[b] : a < b;
        });
        return nodes;
    };

    NodeId next = 0;
    for (NodeId t : level_top_down(transit)) perm.to_new[t] = next++;

    std::vector<NodeId> rest;
    rest.reserve(n - k);
    for (NodeId v = 0; v < n; ++v)
        if (!is_transit[v]) rest.push_back(v);

    if (strategy == NonTransitOrder::input_level) {
        for (NodeId v : level_top_down(rest)) perm.to_new[v] = next++;
        return perm;
    }

    // Post-order DFS over upward arcs (both stored directions lead to higher
    // ranks) restricted to unnumbered non-transit nodes.
    std::vector<NodeId> finish_order;
    finish_order.reserve(rest.size());
    std::vector<bool> visited(n, false);
    struct Frame {
        NodeId v;
        uint64_t cursor; // scans up arcs first, then down arcs
    };
    std::vector<Frame> stack;
    auto neighbor = [&](NodeId v, uint64_t i) -> NodeId {
        uint64_t up_deg = ch.up_first[v + 1] - ch.up_first[v];
        if (i < up_deg) return ch.up_head[ch.up_first[v] + i];
        return ch.dn_head[ch.dn_first[v] + (i - up_deg)];
    };
    auto degree = [&](NodeId v) {
        return (ch.up_first[v + 1] - ch.up_first[v]) + (ch.dn_first[v + 1] - ch.dn_first[v]);
    };
    for (NodeId root : rest) {
        if (visited[root]) continue;
        visited[root] = true;
        stack.push_back({root, 0});
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.cursor < degree(f.v)) {
                NodeId w = neighbor(f.v, f.cursor++);
                if (!visited[w] && !is_transit[w]) {
                    visited[w] = true;
                    stack.push_back({w, 0});
                }
            } else {
                finish_order.push_back(f.v);
                stack.pop_back();
            }
        }
    }
    for (size_t i = 0; i < finish_order.size(); ++i) {
        NodeId image = strategy == NonTransitOrder::dfs_increasing
                           ? next + static_cast<NodeId>(i)
                           : next + static_cast<NodeId>(finish_order.size() - 1 - i);
        perm.to_new[finish_order[i]] = image;
    }
    return perm;
}

//---------------------------------------------------------------- index ----

// Complete transit-node index. All internal structures live in renumbered id
// space where a node is transit iff its id is below k; `perm` maps input ids
// to internal ids. The permuted input graph rides along for local searches,
// verification, and the many-to-one oracle.
struct TNRIndex {
    NodeId n = 0;
    NodeId k = 0;
    uint32_t stall_hops = 1;
    NonTransitOrder order = NonTransitOrder::dfs_increasing;

    Permutation perm; // input id -> internal id
    Permutation inv;  // internal id -> input id (rebuilt on load)
    Graph graph;      // permuted input graph
    CHIndex ch;       // permuted hierarchy

    std::vector<Weight> table; // k x k transit distances, row-major

    // Access store: flat (node, dist) pairs; per node the forward slice is
    // [access_first[2v], access_first[2v+1]) and the backward slice is
    // [access_first[2v+1], access_first[2v+2]); the final entry terminates.
    std::vector<uint64_t> access_first;
    std::vector<NodeId> access_node;
    std::vector<Weight> access_dist;

    // Locality store: per node the sorted merged Voronoi representative set
    // [rep_first[v], rep_first[v+1]) plus the raw search-space id interval
    // [space_min[v], space_max[v]] (empty spaces use NO_NODE/0 so the interval
    // test can never pass).
    std::vector<uint64_t> rep_first;
    std::vector<NodeId> rep_set;
    std::vector<NodeId> space_min;
    std::vector<NodeId> space_max;

    // Debug only (keep_raw_spaces builds): merged raw search spaces per node.
    std::vector<std::vector<NodeId>> raw_spaces;

    bool is_transit_internal(NodeId internal_id) const { return internal_id < k; }
    NodeId to_internal(NodeId input_id) const { return perm.to_new[input_id]; }
    NodeId to_input(NodeId internal_id) const { return inv.to_new[internal_id]; }
    Weight table_at(NodeId a, NodeId b) const {
        return table[static_cast<size_t>(a) * k + b];
    }

    struct Slice {
        const NodeId* node;
        const Weight* dist;
        size_t size;
    };
    Slice forward_access(NodeId internal_id) const {
        uint64_t b = access_first[2 * static_cast<uint64_t>(internal_id)];
        uint64_t e = access_first[2 * static_cast<uint64_t>(internal_id) + 1];
        return {access_node.data() + b, access_dist.data() + b, e - b};
    }
    Slice backward_access(NodeId internal_id) const {
        uint64_t b = access_first[2 * static_cast<uint64_t>(internal_id) + 1];
        uint64_t e = access_first[2 * static_cast<uint64_t>(internal_id) + 2];
        return {access_node.data() + b, access_dist.data() + b, e - b};
    }

    bool operator==(const TNRIndex& o) const {
        return n == o.n && k == o.k && stall_hops == o.stall_hops && order == o.order &&
               perm.to_new == o.perm.to_new && graph == o.graph && ch == o.ch && table == o.table &&
               access_first == o.access_first && access_node == o.access_node &&
               access_dist == o.access_dist && rep_first == o.rep_first && rep_set == o.rep_set &&
               space_min == o.space_min && space_max == o.space_max;
    }

    void serialize(std::ostream& out) const {
        BinaryWriter w(out);
        w.magic(kMagic);
        w.u32(kVersion);
        w.u32(n);
        w.u32(k);
        w.u32(stall_hops);
        w.u32(static_cast<uint32_t>(order));
        w.u32_array(perm.to_new);
        graph.serialize(out);
        ch.serialize(out);
        w.u32_array(table);
        w.u64_array(access_first);
        w.u32_array(access_node);
        w.u32_array(access_dist);
        w.u64_array(rep_first);
        w.u32_array(rep_set);
        w.u32_array(space_min);
        w.u32_array(space_max);
        w.check("transit index dump");
    }

    static TNRIndex deserialize(std::istream& in) {
        BinaryReader r(in);
        r.expect_magic(kMagic, "transit index");
        r.expect_version(kVersion, "transit index");
        TNRIndex idx;
        idx.n = r.u32();
        idx.k = r.u32();
        idx.stall_hops = r.u32();
        uint32_t order = r.u32();
        require(order <= static_cast<uint32_t>(NonTransitOrder::input_level),
                "transit index dump: bad renumbering strategy");
        idx.order = static_cast<NonTransitOrder>(order);
        idx.perm.to_new = r.u32_array();
        idx.perm.validate(idx.n);
        idx.inv = idx.perm.inverse();
        idx.graph = Graph::deserialize(in);
        idx.ch = CHIndex::deserialize(in);
        idx.table = r.u32_array();
        idx.access_first = r.u64_array();
        idx.access_node = r.u32_array();
        idx.access_dist = r.u32_array();
        idx.rep_first = r.u64_array();
        idx.rep_set = r.u32_array();
        idx.space_min = r.u32_array();
        idx.space_max = r.u32_array();
        require(idx.graph.node_count() == idx.n && idx.ch.n == idx.n,
                "transit index dump: inconsistent node counts");
        require(idx.k >= 1 && idx.k <= idx.n, "transit index dump: bad transit count");
        require(idx.table.size() == static_cast<size_t>(idx.k) * idx.k,
                "transit index dump: bad table size");
        require(idx.access_first.size() == 2 * static_cast<size_t>(idx.n) + 1 &&
                    idx.access_first.back() == idx.access_node.size() &&
                    idx.access_node.size() == idx.access_dist.size(),
                "transit index dump: bad access store");
        require(idx.rep_first.size() == static_cast<size_t>(idx.n) + 1 &&
                    idx.rep_first.back() == idx.rep_set.size() &&
                    idx.space_min.size() == idx.n && idx.space_max.size() == idx.n,
                "transit index dump: bad locality store");
        for (size_t i = 1; i < idx.access_first.size(); ++i)
            require(idx.access_first[i - 1] <= idx.access_first[i],
                    "transit index dump: access offsets not monotone");
        for (size_t i = 1; i < idx.rep_first.size(); ++i)
            require(idx.rep_first[i - 1] <= idx.rep_first[i],
                    "transit index dump: locality offsets not monotone");
        for (NodeId a : idx.access_node)
            require(a < idx.k, "transit index dump: access node is not transit");
        for (NodeId r : idx.rep_set)
            require(r < idx.k || r == NO_NODE, "transit index dump: bad representative id");
        return idx;
    }

    static constexpr char kMagic[5] = "CTT1";
    static constexpr uint32_t kVersion = 1;
};

struct TNRBuildOptions {
    uint32_t stall_hops = 1;                               // exploration stalling depth
    NonTransitOrder order = NonTransitOrder::dfs_increasing;
    const std::vector<NodeId>* forced_order = nullptr;      // hierarchy order override
    uint32_t threads = 1;                                   // access/space exploration
    bool keep_raw_spaces = false;                           // retain debug raw spaces
};

// Full preprocessing pipeline: hierarchy, transit set, renumbering, transit
// table, Voronoi regions, access sets, locality store. Output is identical for
// any thread count.
inline TNRIndex build_tnr(const Graph& g, const CHParams& params, NodeId k,
                          const TNRBuildOptions& opts = {}) {
    CHIndex ch = build_hierarchy(g, params, opts.forced_order);
    std::vector<NodeId> transit = select_transit_nodes(ch, k);

    TNRIndex idx;
    idx.n = g.node_count();
    idx.k = k;
    idx.stall_hops = opts.stall_hops;
    idx.order = opts.order;
    idx.perm = renumber(ch, transit, opts.order);
    idx.inv = idx.perm.inverse();
    idx.graph = apply_permutation(g, idx.perm);
    idx.ch = ch.permuted(idx.perm);

    std::vector<NodeId> transit_internal(k);
    for (NodeId t = 0; t < k; ++t) transit_internal[t] = t;
    DistanceTable dt = build_distance_table(idx.ch, transit_internal, transit_internal);
    idx.table = std::move(dt.entries);

    std::vector<NodeId> voronoi = compute_voronoi(idx.graph, transit_internal);

    std::vector<bool> is_transit(idx.n, false);
    for (NodeId t = 0; t < k; ++t) is_transit[t] = true;

    struct PerNode {
        std::vector<AccessEntry> fwd, bwd;
        std::vector<NodeId> reps;
        std::vector<NodeId> merged;
        NodeId lo = NO_NODE, hi = 0;
    };
    std::vector<PerNode> nodes(idx.n);

    auto explore = [&](NodeId v, HalfSearchScratch& scratch) {
        AccessSearchResult fwd =
            find_access_raw(idx.ch, is_transit, v, Direction::forward, opts.stall_hops, &scratch);
        AccessSearchResult bwd =
            find_access_raw(idx.ch, is_transit, v, Direction::backward, opts.stall_hops, &scratch);
        PerNode& out = nodes[v];
        out.fwd = post_search_stall(std::move(fwd.candidates),
                                    [&](NodeId a, NodeId b) { return idx.table_at(a, b); });
        out.bwd = post_search_stall(std::move(bwd.candidates),
                                    [&](NodeId a, NodeId b) { return idx.table_at(b, a); });
        out.merged.reserve(fwd.space.size() + bwd.space.size());
        std::merge(fwd.space.begin(), fwd.space.end(), bwd.space.begin(), bwd.space.end(),
                   std::back_inserter(out.merged));
        out.merged.erase(std::unique(out.merged.begin(), out.merged.end()), out.merged.end());
        if (!out.merged.empty()) {
            out.lo = out.merged.front();
            out.hi = out.merged.back();
        }
        out.reps.reserve(out.merged.size());
        for (NodeId u : out.merged) out.reps.push_back(voronoi[u]);
        std::sort(out.reps.begin(), out.reps.end());
        out.reps.erase(std::unique(out.reps.begin(), out.reps.end()), out.reps.end());
    };

    uint32_t workers = std::max(1u, opts.threads);
    if (workers == 1) {
        HalfSearchScratch scratch;
        for (NodeId v = 0; v < idx.n; ++v) explore(v, scratch);
    } else {
        std::atomic<NodeId> cursor{0};
        std::vector<std::thread> pool;
        for (uint32_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                HalfSearchScratch scratch;
                while (true) {
                    NodeId v = cursor.fetch_add(1);
                    if (v >= idx.n) break;
                    explore(v, scratch);
                }
            });
        for (auto& t : pool) t.join();
    }

    idx.access_first.assign(2 * static_cast<size_t>(idx.n) + 1, 0);
    idx.rep_first.assign(static_cast<size_t>(idx.n) + 1, 0);
    idx.space_min.assign(idx.n, NO_NODE);
    idx.space_max.assign(idx.n, 0);
    for (NodeId v = 0; v < idx.n; ++v) {
        const PerNode& p = nodes[v];
        idx.access_first[2 * static_cast<uint64_t>(v) + 1] =
            idx.access_first[2 * static_cast<uint64_t>(v)] + p.fwd.size();
        idx.access_first[2 * static_cast<uint64_t>(v) + 2] =
            idx.access_first[2 * static_cast<uint64_t>(v) + 1] + p.bwd.size();
        for (const AccessEntry& e : p.fwd) {
            idx.access_node.push_back(e.node);
            idx.access_dist.push_back(e.dist);
        }
        for (const AccessEntry& e : p.bwd) {
            idx.access_node.push_back(e.node);
            idx.access_dist.push_back(e.dist);
        }
        idx.rep_first[v + 1] = idx.rep_first[v] + p.reps.size();
        for (NodeId r : p.reps) idx.rep_set.push_back(r);
        idx.space_min[v] = p.lo;
        idx.space_max[v] = p.hi;
        if (opts.keep_raw_spaces) idx.raw_spaces.push_back(p.merged);
    }
    return idx;
}

} // namespace chtnr
