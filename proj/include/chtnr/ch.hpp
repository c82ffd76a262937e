#pragma once

// Contraction hierarchies: node ordering by lazily updated priorities, witness
// searches, shortcut insertion, and the bidirectional upward/downward query
// with stall-on-demand.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <vector>

#include "chtnr/dijkstra.hpp"
#include "chtnr/graph.hpp"
#include "chtnr/heap.hpp"
#include "chtnr/io.hpp"
#include "chtnr/types.hpp"

namespace chtnr {

struct CHParams {
    // Witness searches during priority estimation.
    uint32_t witness_hop_limit = 5;
    uint64_t witness_settle_limit = 1000;
    // Witness searches during the actual contraction.
    uint32_t contract_hop_limit = 7;
    uint64_t contract_settle_limit = 2000;
    // priority = 2 * edgeQuotient + 4 * originalEdgeQuotient + nodeDepth
    double edge_quotient_coef = 2.0;
    double original_edge_quotient_coef = 4.0;
    double node_depth_coef = 1.0;
};

//---------------------------------------------------------------- CHIndex ----

// Search graphs of a finished hierarchy. Upward arcs (v -> up_head[a]) and
// downward arcs stored reversed (entry (v, dn_head[a]) is the real arc
// (dn_head[a] -> v)); in both CSRs the stored head has strictly higher rank
// than the owning node, so both are DAGs. middle[a] == NO_NODE marks an
// original arc, otherwise the node the shortcut bypasses.
struct CHIndex {
    NodeId n = 0;
    std::vector<NodeId> rank;    // contraction position, higher = more important
    std::vector<uint32_t> level; // 1 + max level of previously contracted neighbors

    std::vector<uint64_t> up_first;
    std::vector<NodeId> up_head;
    std::vector<Weight> up_weight;
    std::vector<NodeId> up_middle;

    std::vector<uint64_t> dn_first;
    std::vector<NodeId> dn_head;
    std::vector<Weight> dn_weight;
    std::vector<NodeId> dn_middle;

    uint64_t up_arc_count() const { return up_head.size(); }
    uint64_t dn_arc_count() const { return dn_head.size(); }

    bool operator==(const CHIndex& o) const {
        return n == o.n && rank == o.rank && level == o.level && up_first == o.up_first &&
               up_head == o.up_head && up_weight == o.up_weight && up_middle == o.up_middle &&
               dn_first == o.dn_first && dn_head == o.dn_head && dn_weight == o.dn_weight &&
               dn_middle == o.dn_middle;
    }

    // Relabels every node id (ranks and levels travel with the node).
    CHIndex permuted(const Permutation& p) const {
        p.validate(n);
        CHIndex out;
        out.n = n;
        out.rank.resize(n);
        out.level.resize(n);
        for (NodeId v = 0; v < n; ++v) {
            out.rank[p.to_new[v]] = rank[v];
            out.level[p.to_new[v]] = level[v];
        }
        struct TmpArc {
            NodeId from, to;
            Weight w;
            NodeId mid;
        };
        auto rebuild = [&](const std::vector<uint64_t>& first, const std::vector<NodeId>& head,
                           const std::vector<Weight>& weight, const std::vector<NodeId>& middle,
                           std::vector<uint64_t>& ofirst, std::vector<NodeId>& ohead,
                           std::vector<Weight>& oweight, std::vector<NodeId>& omiddle) {
            std::vector<TmpArc> arcs;
            arcs.reserve(head.size());
            for (NodeId v = 0; v < n; ++v)
                for (uint64_t a = first[v]; a < first[v + 1]; ++a)
                    arcs.push_back({p.to_new[v], p.to_new[head[a]], weight[a],
                                    middle[a] == NO_NODE ? NO_NODE : p.to_new[middle[a]]});
            std::sort(arcs.begin(), arcs.end(), [](const TmpArc& a, const TmpArc& b) {
                return a.from != b.from ? a.from < b.from : a.to < b.to;
            });
            ofirst.assign(static_cast<size_t>(n) + 1, 0);
            ohead.clear();
            oweight.clear();
            omiddle.clear();
            for (const TmpArc& a : arcs) {
                ++ofirst[a.from + 1];
                ohead.push_back(a.to);
                oweight.push_back(a.w);
                omiddle.push_back(a.mid);
            }
            for (NodeId v = 0; v < n; ++v) ofirst[v + 1] += ofirst[v];
        };
        rebuild(up_first, up_head, up_weight, up_middle, out.up_first, out.up_head, out.up_weight,
                out.up_middle);
        rebuild(dn_first, dn_head, dn_weight, dn_middle, out.dn_first, out.dn_head, out.dn_weight,
                out.dn_middle);
        return out;
    }

    void serialize(std::ostream& out) const {
        BinaryWriter w(out);
        w.magic(kMagic);
        w.u32(kVersion);
        w.u32(n);
        w.u32_array(rank);
        w.u32_array(level);
        w.u64_array(up_first);
        w.u32_array(up_head);
        w.u32_array(up_weight);
        w.u32_array(up_middle);
        w.u64_array(dn_first);
        w.u32_array(dn_head);
        w.u32_array(dn_weight);
        w.u32_array(dn_middle);
        w.check("hierarchy dump");
    }

    static CHIndex deserialize(std::istream& in) {
        BinaryReader r(in);
        r.expect_magic(kMagic, "hierarchy");
        r.expect_version(kVersion, "hierarchy");
        CHIndex ch;
        ch.n = r.u32();
        ch.rank = r.u32_array();
        ch.level = r.u32_array();
        ch.up_first = r.u64_array();
        ch.up_head = r.u32_array();
        ch.up_weight = r.u32_array();
        ch.up_middle = r.u32_array();
        ch.dn_first = r.u64_array();
        ch.dn_head = r.u32_array();
        ch.dn_weight = r.u32_array();
        ch.dn_middle = r.u32_array();
        require(ch.rank.size() == ch.n && ch.level.size() == ch.n, "hierarchy dump: bad node arrays");
        require(ch.up_first.size() == static_cast<size_t>(ch.n) + 1 &&
                    ch.dn_first.size() == static_cast<size_t>(ch.n) + 1,
                "hierarchy dump: bad offset arrays");
        require(ch.up_head.size() == ch.up_weight.size() &&
                    ch.up_head.size() == ch.up_middle.size() &&
                    ch.up_first.back() == ch.up_head.size(),
                "hierarchy dump: bad upward arrays");
        require(ch.dn_head.size() == ch.dn_weight.size() &&
                    ch.dn_head.size() == ch.dn_middle.size() &&
                    ch.dn_first.back() == ch.dn_head.size(),
                "hierarchy dump: bad downward arrays");
        return ch;
    }

    static constexpr char kMagic[5] = "CTH1";
    static constexpr uint32_t kVersion = 1;
};

//---------------------------------------------------------- CHBuildState ----

// Mutable remaining graph during contraction. Adjacency entries to contracted
// nodes stay in the vectors and are skipped; at most one live arc per ordered
// node pair (parallel arcs collapse to the minimum on insertion).
class CHBuildState {
  public:
    struct Arc {
        NodeId other;  // head for out-arcs, tail for in-arcs
        Weight weight;
        uint32_t original_arcs; // how many input arcs this arc represents
        NodeId middle;          // NO_NODE for input arcs
    };

    explicit CHBuildState(const Graph& g) : n_(g.node_count()) {
        out_.resize(n_);
        in_.resize(n_);
        contracted_.assign(n_, false);
        depth_.assign(n_, 0);
        for (NodeId v = 0; v < n_; ++v)
            for (uint64_t a = g.out_begin(v); a < g.out_end(v); ++a) {
                out_[v].push_back({g.head(a), g.weight(a), 1, NO_NODE});
                in_[g.head(a)].push_back({v, g.weight(a), 1, NO_NODE});
            }
        witness_dist_.resize(n_);
    }

    NodeId node_count() const { return n_; }
    bool contracted(NodeId v) const { return contracted_[v]; }
    uint32_t depth(NodeId v) const { return depth_[v]; }
    const std::vector<Arc>& out_arcs(NodeId v) const { return out_[v]; }
    const std::vector<Arc>& in_arcs(NodeId v) const { return in_[v]; }

    // Bounded Dijkstra from `from` in the remaining graph, skipping `excluded`.
    // True iff a path to `to` of weight <= bound is found within the hop and
    // settled-node limits. A truncated search errs toward false (extra
    // shortcuts, never wrong distances).
    bool witness_search(NodeId from, NodeId excluded, NodeId to, Weight bound,
                        uint32_t hop_limit, uint64_t settle_limit) {
        if (hop_limit == 0 || settle_limit == 0) return false;
        witness_dist_.reset();
        witness_heap_.clear();
        witness_dist_.set(from, 0);
        witness_heap_.push({0, 0}, from); // key: (distance, hops)
        uint64_t settled = 0;
        while (!witness_heap_.empty()) {
            auto [key, v] = witness_heap_.pop();
            auto [d, hops] = key;
            if (d > witness_dist_.get(v)) continue; // stale
            if (v == to) return true;
            if (++settled >= settle_limit) return false;
            if (hops >= hop_limit) continue;
            for (const Arc& arc : out_[v]) {
                NodeId w = arc.other;
                if (contracted_[w] || w == excluded) continue;
                Weight cand = add_weights(d, arc.weight);
                if (cand > bound || cand >= witness_dist_.get(w)) continue;
                witness_dist_.set(w, cand);
                witness_heap_.push({cand, hops + 1}, w);
            }
        }
        return false;
    }

    // Calls fn(u, w, weight, original_arcs) for every shortcut contraction of v
    // would need, using witness searches at the given limits. Does not mutate
    // the remaining graph; insertion order is the deterministic pair order.
    template <typename Fn>
    void enumerate_shortcuts(NodeId v, uint32_t hop_limit, uint64_t settle_limit, Fn&& fn) {
        for (const Arc& ia : in_[v]) {
            NodeId u = ia.other;
            if (contracted_[u]) continue;
            for (const Arc& oa : out_[v]) {
                NodeId w = oa.other;
                if (contracted_[w] || w == u) continue;
                Weight through = add_weights(ia.weight, oa.weight);
                if (through == INF_WEIGHT) continue;
                if (!witness_search(u, v, w, through, hop_limit, settle_limit))
                    fn(u, w, through, ia.original_arcs + oa.original_arcs);
            }
        }
    }

    // Inserts a shortcut (u, w) bypassing v, replacing any strictly heavier
    // parallel arc. Keeps the at-most-one-arc-per-pair invariant.
    void add_shortcut(NodeId u, NodeId w, Weight weight, uint32_t original_arcs, NodeId v) {
        Arc arc{w, weight, original_arcs, v};
        bool replaced = false;
        for (Arc& a : out_[u])
            if (a.other == w && !contracted_[w]) {
                if (weight < a.weight) a = arc;
                replaced = true;
                break;
            }
        if (!replaced) out_[u].push_back(arc);
        Arc rarc{u, weight, original_arcs, v};
        replaced = false;
        for (Arc& a : in_[w])
            if (a.other == u && !contracted_[u]) {
                if (weight < a.weight) a = rarc;
                replaced = true;
                break;
            }
        if (!replaced) in_[w].push_back(rarc);
    }

    void mark_contracted(NodeId v) {
        contracted_[v] = true;
        for (const Arc& a : out_[v])
            if (!contracted_[a.other]) depth_[a.other] = std::max(depth_[a.other], depth_[v] + 1);
        for (const Arc& a : in_[v])
            if (!contracted_[a.other]) depth_[a.other] = std::max(depth_[a.other], depth_[v] + 1);
    }

    // Live directed arc count and represented input-arc count incident to v.
    std::pair<uint64_t, uint64_t> incident_counts(NodeId v) const {
        uint64_t arcs = 0, originals = 0;
        for (const Arc& a : out_[v])
            if (!contracted_[a.other]) {
                ++arcs;
                originals += a.original_arcs;
            }
        for (const Arc& a : in_[v])
            if (!contracted_[a.other]) {
                ++arcs;
                originals += a.original_arcs;
            }
        return {arcs, originals};
    }

  private:
    NodeId n_;
    std::vector<std::vector<Arc>> out_, in_;
    std::vector<bool> contracted_;
    std::vector<uint32_t> depth_;
    StampedWeights witness_dist_;
    MinHeap<std::pair<Weight, uint32_t>, NodeId> witness_heap_;
};

// True iff a path from `from` to `to` of weight <= bound avoiding `excluded`
// survives in the remaining graph, within the limits.
inline bool witness_search(CHBuildState& state, NodeId from, NodeId excluded, NodeId to,
                           Weight bound, uint32_t hop_limit, uint64_t settle_limit) {
    return state.witness_search(from, excluded, to, bound, hop_limit, settle_limit);
}

// Contraction priority of v in the current remaining graph (lower contracts
// first):
//   edgeQuotient          = shortcuts needed / live incident arcs
//   originalEdgeQuotient  = input arcs represented by those shortcuts
//                           / input arcs represented by the incident arcs
//   nodeDepth             = 1 + max depth of already contracted neighbors
// Both quotients are 0 for an isolated node. Simulation only, no mutation.
inline double node_priority(CHBuildState& state, NodeId v, const CHParams& params) {
    uint64_t shortcuts = 0, shortcut_originals = 0;
    state.enumerate_shortcuts(v, params.witness_hop_limit, params.witness_settle_limit,
                              [&](NodeId, NodeId, Weight, uint32_t originals) {
                                  ++shortcuts;
                                  shortcut_originals += originals;
                              });
    auto [incident, incident_originals] = state.incident_counts(v);
    double eq = incident == 0 ? 0.0 : static_cast<double>(shortcuts) / static_cast<double>(incident);
    double oeq = incident_originals == 0 ? 0.0
                                         : static_cast<double>(shortcut_originals) /
                                               static_cast<double>(incident_originals);
    return params.edge_quotient_coef * eq + params.original_edge_quotient_coef * oeq +
           params.node_depth_coef * static_cast<double>(state.depth(v));
}

struct Shortcut {
    NodeId from, to;
    Weight weight;
    NodeId middle;
};

// Contracts v: inserts all needed shortcuts (witness searches at the
// contraction limits), marks v contracted, updates neighbor depths.
inline std::vector<Shortcut> contract_node(CHBuildState& state, NodeId v, const CHParams& params) {
    require(!state.contracted(v), "contract_node: node already contracted");
    struct Pending {
        NodeId u, w;
        Weight weight;
        uint32_t originals;
    };
    std::vector<Pending> pending;
    state.enumerate_shortcuts(v, params.contract_hop_limit, params.contract_settle_limit,
                              [&](NodeId u, NodeId w, Weight weight, uint32_t originals) {
                                  pending.push_back({u, w, weight, originals});
                              });
    std::vector<Shortcut> added;
    added.reserve(pending.size());
    for (const Pending& s : pending) {
        state.add_shortcut(s.u, s.w, s.weight, s.originals, v);
        added.push_back({s.u, s.w, s.weight, v});
    }
    state.mark_contracted(v);
    return added;
}

//---------------------------------------------------------- construction ----

// Builds the hierarchy. Without forced_order, nodes are contracted in order of
// lazily re-evaluated priority (the popped minimum is re-scored and contracted
// only if it still does not exceed the next queue key; ties break toward the
// smaller node id). With forced_order, nodes are contracted exactly in the
// given sequence. Single-threaded and deterministic.
inline CHIndex build_hierarchy(const Graph& g, const CHParams& params = {},
                               const std::vector<NodeId>* forced_order = nullptr) {
    const NodeId n = g.node_count();
    require(n > 0, "build_hierarchy: empty graph");
    CHBuildState state(g);

    struct NodeArcs {
        std::vector<CHBuildState::Arc> up, down;
    };
    std::vector<NodeArcs> collected(n);
    CHIndex ch;
    ch.n = n;
    ch.rank.assign(n, 0);
    ch.level.assign(n, 0);

    auto contract_and_collect = [&](NodeId v, NodeId position) {
        for (const auto& a : state.out_arcs(v))
            if (!state.contracted(a.other)) collected[v].up.push_back(a);
        for (const auto& a : state.in_arcs(v))
            if (!state.contracted(a.other)) collected[v].down.push_back(a);
        ch.level[v] = state.depth(v);
        ch.rank[v] = position;
        contract_node(state, v, params);
    };

    if (forced_order) {
        Permutation order_as_perm; // forced_order must visit every node once
        order_as_perm.to_new.assign(forced_order->begin(), forced_order->end());
        order_as_perm.validate(n);
        for (NodeId i = 0; i < n; ++i) contract_and_collect((*forced_order)[i], i);
    } else {
        MinHeap<std::pair<double, NodeId>, NodeId> queue;
        for (NodeId v = 0; v < n; ++v) queue.push({node_priority(state, v, params), v}, v);
        NodeId position = 0;
        while (!queue.empty()) {
            auto [key, v] = queue.pop();
            if (state.contracted(v)) continue;
            double score = node_priority(state, v, params);
            if (!queue.empty() && std::make_pair(score, v) > queue.top().first) {
                queue.push({score, v}, v);
                continue;
            }
            contract_and_collect(v, position++);
        }
    }

    auto build_csr = [&](bool up, std::vector<uint64_t>& first, std::vector<NodeId>& head,
                         std::vector<Weight>& weight, std::vector<NodeId>& middle) {
        first.assign(static_cast<size_t>(n) + 1, 0);
        for (NodeId v = 0; v < n; ++v) {
            auto& arcs = up ? collected[v].up : collected[v].down;
            std::sort(arcs.begin(), arcs.end(),
                      [](const CHBuildState::Arc& a, const CHBuildState::Arc& b) {
                          return a.other < b.other;
                      });
            first[v + 1] = first[v] + arcs.size();
            for (const auto& a : arcs) {
                head.push_back(a.other);
                weight.push_back(a.weight);
                middle.push_back(a.middle);
            }
        }
    };
    build_csr(true, ch.up_first, ch.up_head, ch.up_weight, ch.up_middle);
    build_csr(false, ch.dn_first, ch.dn_head, ch.dn_weight, ch.dn_middle);
    return ch;
}

//----------------------------------------------------------------- query ----

struct CHQueryResult {
    Weight distance = INF_WEIGHT;
    NodeId meeting = NO_NODE;
};

struct CHSearchScratch {
    StampedWeights dist[2]; // 0 = forward (upward), 1 = backward (downward)
    MinHeap<Weight, NodeId> queue[2];

    void prepare(NodeId n) {
        for (int side = 0; side < 2; ++side) {
            if (dist[side].size() != n) dist[side].resize(n);
            dist[side].reset();
            queue[side].clear();
        }
    }
};

namespace detail {

// Stall check at relax time: is there a real path into `v` from the opposite
// search graph, of at most `hops` arcs, whose endpoint already has a strictly
// better distance? If so the candidate cannot lie on a shortest path.
inline bool stall_witness(const CHIndex& ch, const StampedWeights& dist, bool forward, NodeId v,
                          Weight candidate, uint32_t hops) {
    if (hops == 0) return false;
    const auto& first = forward ? ch.dn_first : ch.up_first;
    const auto& head = forward ? ch.dn_head : ch.up_head;
    const auto& weight = forward ? ch.dn_weight : ch.up_weight;
    for (uint64_t a = first[v]; a < first[v + 1]; ++a) {
        NodeId w = head[a];
        Weight leg = weight[a];
        if (leg >= candidate) continue;
        if (dist.has(w) && add_weights(dist.get(w), leg) < candidate) return true;
        if (hops > 1 && stall_witness(ch, dist, forward, w, candidate - leg, hops - 1)) return true;
    }
    return false;
}

} // namespace detail

// Bidirectional upward/downward search. Each side stops once its minimum queue
// key is no better than the best meeting so far; stall_hops == 0 disables
// stall-on-demand, 1 checks arcs incident to the relaxed node, larger values
// walk that many arcs into the opposite search graph. The result does not
// depend on stall_hops.
inline CHQueryResult ch_query(const CHIndex& ch, NodeId s, NodeId t, uint32_t stall_hops = 1,
                              CHSearchScratch* scratch = nullptr) {
    require(s < ch.n && t < ch.n, "ch_query: node out of range");
    CHSearchScratch local;
    CHSearchScratch& sc = scratch ? *scratch : local;
    sc.prepare(ch.n);

    CHQueryResult best;
    auto meet = [&](NodeId v) {
        if (!sc.dist[0].has(v) || !sc.dist[1].has(v)) return;
        Weight sum = add_weights(sc.dist[0].get(v), sc.dist[1].get(v));
        if (sum < best.distance) {
            best.distance = sum;
            best.meeting = v;
        }
    };

    sc.dist[0].set(s, 0);
    sc.queue[0].push(0, s);
    sc.dist[1].set(t, 0);
    sc.queue[1].push(0, t);
    meet(s);
    meet(t);

    bool open[2] = {true, true};
    while (open[0] || open[1]) {
        // Pick the side with the smaller queue key; a side closes when its
        // queue empties or its best key cannot beat the meeting found so far.
        int side;
        if (open[0] && open[1])
            side = sc.queue[0].top().first <= sc.queue[1].top().first ? 0 : 1;
        else
            side = open[0] ? 0 : 1;
        if (sc.queue[side].empty() || sc.queue[side].top().first >= best.distance) {
            open[side] = false;
            continue;
        }

        auto [d, v] = sc.queue[side].pop();
        if (d > sc.dist[side].get(v)) continue; // stale

        const bool forward = side == 0;
        const auto& first = forward ? ch.up_first : ch.dn_first;
        const auto& head = forward ? ch.up_head : ch.dn_head;
        const auto& weight = forward ? ch.up_weight : ch.dn_weight;
        for (uint64_t a = first[v]; a < first[v + 1]; ++a) {
            NodeId w = head[a];
            Weight cand = add_weights(d, weight[a]);
            if (cand >= sc.dist[side].get(w)) continue;
            if (stall_hops > 0 &&
                detail::stall_witness(ch, sc.dist[side], forward, w, cand, stall_hops))
                continue;
            sc.dist[side].set(w, cand);
            sc.queue[side].push(cand, w);
            meet(w);
        }
    }
    return best;
}

//--------------------------------------------------------------- unpacking ----

namespace detail {

struct FoundArc {
    Weight weight;
    NodeId middle;
};

// Locates the stored arc (from, to); used only when unpacking shortcuts.
inline FoundArc find_search_arc(const CHIndex& ch, NodeId from, NodeId to) {
    if (ch.rank[to] > ch.rank[from]) { // upward arc, stored at `from`
        for (uint64_t a = ch.up_first[from]; a < ch.up_first[from + 1]; ++a)
            if (ch.up_head[a] == to) return {ch.up_weight[a], ch.up_middle[a]};
    } else { // downward arc, stored reversed at `to`
        for (uint64_t a = ch.dn_first[to]; a < ch.dn_first[to + 1]; ++a)
            if (ch.dn_head[a] == from) return {ch.dn_weight[a], ch.dn_middle[a]};
    }
    throw Error("unpack: search graph arc not found");
}

inline void unpack_into(const CHIndex& ch, NodeId from, NodeId to, NodeId middle,
                        std::vector<NodeId>& path) {
    if (middle == NO_NODE) {
        path.push_back(to);
        return;
    }
    unpack_into(ch, from, middle, find_search_arc(ch, from, middle).middle, path);
    unpack_into(ch, middle, to, find_search_arc(ch, middle, to).middle, path);
}

} // namespace detail

// Expands a search-graph arc into the original-graph node sequence it
// represents, starting at `from` and ending at `to`. Testing utility; not
// performance-tuned. Terminates because middle nodes have strictly lower rank
// than both endpoints.
inline std::vector<NodeId> unpack_arc(const CHIndex& ch, NodeId from, NodeId to) {
    std::vector<NodeId> path{from};
    detail::unpack_into(ch, from, to, detail::find_search_arc(ch, from, to).middle, path);
    return path;
}

} // namespace chtnr
