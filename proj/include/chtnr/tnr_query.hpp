#pragma once

// Queries against a transit-node index: the locality filter decides between
// a table-based answer (access sets x transit table) and a plain hierarchy
// search fallback for local pairs. Public entry points take input-graph ids.

#include <cstdint>

#include "chtnr/ch.hpp"
#include "chtnr/tnr.hpp"
#include "chtnr/types.hpp"

namespace chtnr {

namespace detail {

// Internal-id locality filter: true when the compressed search spaces of s
// (forward) and t (backward, both merged per node) may intersect. The cheap
// id-interval test rules out disjoint raw spaces before the representative
// sets are intersected by a sorted merge. `interval_only` reports that the
// interval test alone decided the outcome.
inline bool locality_filter_internal(const TNRIndex& idx, NodeId s, NodeId t,
                                     bool* interval_only = nullptr) {
    if (interval_only) *interval_only = false;
    if (idx.space_min[s] == NO_NODE || idx.space_min[t] == NO_NODE) {
        if (interval_only) *interval_only = true;
        return false;
    }
    if (idx.space_max[s] < idx.space_min[t] || idx.space_max[t] < idx.space_min[s]) {
        if (interval_only) *interval_only = true;
        return false;
    }
    uint64_t i = idx.rep_first[s], ie = idx.rep_first[s + 1];
    uint64_t j = idx.rep_first[t], je = idx.rep_first[t + 1];
    while (i < ie && j < je) {
        if (idx.rep_set[i] == idx.rep_set[j]) return true;
        if (idx.rep_set[i] < idx.rep_set[j])
            ++i;
        else
            ++j;
    }
    return false;
}

// Internal-id table query: minimum of d(s, a_s) + D(a_s, a_t) + d(a_t, t)
// over the forward access set of s and the backward access set of t. Counts
// one lookup per table cell read; empty access sets give an infinite result.
inline Weight table_query_internal(const TNRIndex& idx, NodeId s, NodeId t,
                                   uint64_t* lookups = nullptr) {
    TNRIndex::Slice fs = idx.forward_access(s);
    TNRIndex::Slice bt = idx.backward_access(t);
    Weight best = INF_WEIGHT;
    for (size_t i = 0; i < fs.size; ++i) {
        for (size_t j = 0; j < bt.size; ++j) {
            if (lookups) ++*lookups;
            Weight through = add_weights(
                fs.dist[i], add_weights(idx.table_at(fs.node[i], bt.node[j]), bt.dist[j]));
            if (through < best) best = through;
        }
    }
    return best;
}

} // namespace detail

inline bool locality_filter(const TNRIndex& idx, NodeId s, NodeId t) {
    require(s < idx.n && t < idx.n, "locality filter: node out of range");
    return detail::locality_filter_internal(idx, idx.to_internal(s), idx.to_internal(t));
}

inline Weight table_query(const TNRIndex& idx, NodeId s, NodeId t, uint64_t* lookups = nullptr) {
    require(s < idx.n && t < idx.n, "table query: node out of range");
    return detail::table_query_internal(idx, idx.to_internal(s), idx.to_internal(t), lookups);
}

enum class QueryKind : uint8_t {
    identical = 0,      // s == t, answered without any work
    table = 1,          // access sets x transit table
    local_fallback = 2, // bidirectional hierarchy search
};

struct QueryResult {
    Weight distance = INF_WEIGHT;
    QueryKind kind = QueryKind::table;
    uint32_t filter_evals = 0;       // locality filter evaluations
    uint32_t interval_shortcuts = 0; // filter outcomes decided by the interval test
    uint64_t table_lookups = 0;      // transit table cells read
};

// Exact point-to-point distance (input-graph ids): identical endpoints short-
// circuit to 0; the locality filter routes possibly-local pairs to the
// hierarchy search and everything else to the table.
inline QueryResult query(const TNRIndex& idx, NodeId s, NodeId t,
                         CHSearchScratch* scratch = nullptr) {
    require(s < idx.n && t < idx.n, "query: node out of range");
    QueryResult res;
    if (s == t) {
        res.distance = 0;
        res.kind = QueryKind::identical;
        return res;
    }
    NodeId si = idx.to_internal(s);
    NodeId ti = idx.to_internal(t);
    bool interval_only = false;
    res.filter_evals = 1;
    bool local = detail::locality_filter_internal(idx, si, ti, &interval_only);
    if (interval_only) res.interval_shortcuts = 1;
    if (local) {
        res.kind = QueryKind::local_fallback;
        res.distance = ch_query(idx.ch, si, ti, 1, scratch).distance;
    } else {
        res.kind = QueryKind::table;
        res.distance = detail::table_query_internal(idx, si, ti, &res.table_lookups);
    }
    return res;
}

} // namespace chtnr
