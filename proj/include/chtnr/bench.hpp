#pragma once

// Benchmark harness: workload generation (uniform random pairs and
// Dijkstra-rank pairs), query execution with classification, optional
// verification against a reference search, false-positive accounting, index
// size statistics, and versioned CSV emission.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "chtnr/dijkstra.hpp"
#include "chtnr/graph.hpp"
#include "chtnr/target_oracle.hpp"
#include "chtnr/tnr.hpp"
#include "chtnr/tnr_query.hpp"
#include "chtnr/types.hpp"

namespace chtnr {

//------------------------------------------------------------- workloads ----

// Deterministic uniform pseudo-random query pairs.
inline std::vector<std::pair<NodeId, NodeId>> gen_random_queries(uint64_t n_queries, uint64_t seed,
                                                                 NodeId node_count) {
    require(node_count >= 1, "query generation: empty graph");
    std::mt19937_64 rng(seed);
    std::vector<std::pair<NodeId, NodeId>> queries;
    queries.reserve(n_queries);
    for (uint64_t i = 0; i < n_queries; ++i) {
        NodeId s = static_cast<NodeId>(rng() % node_count);
        NodeId t = static_cast<NodeId>(rng() % node_count);
        queries.emplace_back(s, t);
    }
    return queries;
}

// Target with Dijkstra rank 2^j from a source: the node settled at position
// 2^j by a unidirectional search (the source itself is position 1, ties by
// lower node id). Exponents whose rank exceeds the reachable node count are
// skipped.
struct RankSpec {
    NodeId source;
    uint32_t j;
    NodeId target;
};

inline std::vector<RankSpec> rank_targets(const Graph& g, NodeId s,
                                          const std::vector<uint32_t>& exponents) {
    require(s < g.node_count(), "rank targets: node out of range");
    uint64_t max_rank = 0;
    for (uint32_t j : exponents) max_rank = std::max(max_rank, uint64_t{1} << j);
    DijkstraResult res = dijkstra(g, s, {}, max_rank);
    std::vector<RankSpec> out;
    for (uint32_t j : exponents) {
        uint64_t position = uint64_t{1} << j;
        if (position > res.order.size()) continue; // unreachable rank: skip
        out.push_back({s, j, res.order[position - 1]});
    }
    return out;
}

//------------------------------------------------------------ statistics ----

struct TimingSummary {
    uint64_t samples = 0;
    double mean_ns = 0;
    double p50_ns = 0;
    double p90_ns = 0;
    double p99_ns = 0;
    double max_ns = 0;
};

inline TimingSummary summarize_timings(std::vector<double> ns) {
    TimingSummary t;
    t.samples = ns.size();
    if (ns.empty()) return t;
    std::sort(ns.begin(), ns.end());
    double sum = 0;
    for (double v : ns) sum += v;
    t.mean_ns = sum / double(ns.size());
    auto at = [&](double q) {
        size_t i = static_cast<size_t>(q * double(ns.size() - 1) + 0.5);
        return ns[std::min(i, ns.size() - 1)];
    };
    t.p50_ns = at(0.50);
    t.p90_ns = at(0.90);
    t.p99_ns = at(0.99);
    t.max_ns = ns.back();
    return t;
}

// Index size accounting, bytes per component.
struct IndexSizeStats {
    uint64_t hierarchy_bytes = 0;
    uint64_t table_bytes = 0;
    uint64_t access_bytes = 0;
    uint64_t locality_bytes = 0;
    uint64_t total_bytes = 0;
    NodeId nodes = 0;
};

inline IndexSizeStats index_size_stats(const TNRIndex& idx) {
    IndexSizeStats s;
    s.nodes = idx.n;
    auto arcs = [](uint64_t count) { return count * (4 + 4 + 4); }; // head, weight, middle
    s.hierarchy_bytes = 8 * idx.ch.rank.size() /* rank + level */ +
                        8 * (idx.ch.up_first.size() + idx.ch.dn_first.size()) +
                        arcs(idx.ch.up_arc_count()) + arcs(idx.ch.dn_arc_count());
    s.table_bytes = 4 * idx.table.size();
    s.access_bytes = 8 * idx.access_first.size() + 8 * idx.access_node.size();
    s.locality_bytes = 8 * idx.rep_first.size() + 4 * idx.rep_set.size() +
                       4 * (idx.space_min.size() + idx.space_max.size());
    s.total_bytes = s.hierarchy_bytes + s.table_bytes + s.access_bytes + s.locality_bytes;
    return s;
}

// Histogram over small sizes: counts[i] = number of nodes with that size.
struct SizeHistogram {
    std::vector<uint64_t> counts;

    void add(uint64_t size) {
        if (counts.size() <= size) counts.resize(size + 1, 0);
        ++counts[size];
    }
};

struct IndexHistograms {
    SizeHistogram forward_access;
    SizeHistogram backward_access;
    SizeHistogram rep_set; // compressed search-space sizes
};

inline IndexHistograms index_histograms(const TNRIndex& idx) {
    IndexHistograms h;
    for (NodeId v = 0; v < idx.n; ++v) {
        h.forward_access.add(idx.forward_access(v).size);
        h.backward_access.add(idx.backward_access(v).size);
        h.rep_set.add(idx.rep_first[v + 1] - idx.rep_first[v]);
    }
    return h;
}

struct QueryStats {
    uint64_t total = 0;
    uint64_t table_count = 0;
    uint64_t local_count = 0;
    uint64_t identical_count = 0;
    uint64_t unreachable = 0;      // INF results (any class)
    uint64_t false_positives = 0;  // filter true though the table is exact
    uint64_t table_lookups = 0;    // transit table cells read
    TimingSummary table_time;      // reachable table-class queries
    TimingSummary local_time;      // reachable fallback-class queries

    double local_fraction() const {
        return total ? double(local_count) / double(total) : 0.0;
    }
};

//------------------------------------------------------------- benchmark ----

struct BenchOptions {
    bool verify = false;     // re-answer every query with a reference search
    uint32_t threads = 1;    // shards the query list; counters are merged
    bool measure_fp = true;  // evaluate table_query on local pairs
};

// Runs all queries against the index. Classifies per QueryResult kind,
// tracks false positives (locality filter true although the table would have
// answered exactly), and optionally verifies each distance with a pruned
// reference search on the stored graph. Verification mismatch throws,
// naming the pair with expected and actual distance. Unreachable pairs count
// in their class but never contribute timing samples.
inline QueryStats run_benchmark(const TNRIndex& idx,
                                const std::vector<std::pair<NodeId, NodeId>>& queries,
                                const BenchOptions& opts = {}) {
    struct Shard {
        QueryStats stats;
        std::vector<double> table_ns;
        std::vector<double> local_ns;
        std::string failure;
    };
    uint32_t workers = std::max(1u, opts.threads);
    if (queries.empty()) return {};
    workers = static_cast<uint32_t>(
        std::min<uint64_t>(workers, (queries.size() + 63) / 64)); // keep shards meaningful
    std::vector<Shard> shards(workers);

    auto run_shard = [&](uint32_t w) {
        Shard& sh = shards[w];
        CHSearchScratch scratch;
        size_t begin = queries.size() * w / workers;
        size_t end = queries.size() * (w + 1) / workers;
        // Warm-up pass: touch the index once without timing.
        for (size_t i = begin; i < end && i < begin + 64; ++i)
            query(idx, queries[i].first, queries[i].second, &scratch);
        for (size_t i = begin; i < end; ++i) {
            auto [s, t] = queries[i];
            auto t0 = std::chrono::steady_clock::now();
            QueryResult r = query(idx, s, t, &scratch);
            auto t1 = std::chrono::steady_clock::now();
            double ns = std::chrono::duration<double, std::nano>(t1 - t0).count();

            ++sh.stats.total;
            sh.stats.table_lookups += r.table_lookups;
            if (r.distance == INF_WEIGHT) ++sh.stats.unreachable;
            switch (r.kind) {
                case QueryKind::identical: ++sh.stats.identical_count; break;
                case QueryKind::table:
                    ++sh.stats.table_count;
                    if (r.distance != INF_WEIGHT) sh.table_ns.push_back(ns);
                    break;
                case QueryKind::local_fallback:
                    ++sh.stats.local_count;
                    if (r.distance != INF_WEIGHT) sh.local_ns.push_back(ns);
                    if (opts.measure_fp && table_query(idx, s, t) == r.distance)
                        ++sh.stats.false_positives;
                    break;
            }
            if (opts.verify) {
                NodeId si = idx.to_internal(s);
                NodeId ti = idx.to_internal(t);
                Weight expected = dijkstra(idx.graph, si, {ti}).dist[ti];
                if (expected != r.distance) {
                    sh.failure = "verification mismatch on pair (" + std::to_string(s) + ", " +
                                 std::to_string(t) + "): expected " + std::to_string(expected) +
                                 ", got " + std::to_string(r.distance);
                    return;
                }
            }
        }
    };

    if (workers == 1) {
        run_shard(0);
    } else {
        std::vector<std::thread> pool;
        for (uint32_t w = 0; w < workers; ++w) pool.emplace_back(run_shard, w);
        for (auto& th : pool) th.join();
    }

    QueryStats out;
    std::vector<double> table_ns, local_ns;
    for (Shard& sh : shards) {
        if (!sh.failure.empty()) throw Error(sh.failure);
        out.total += sh.stats.total;
        out.table_count += sh.stats.table_count;
        out.local_count += sh.stats.local_count;
        out.identical_count += sh.stats.identical_count;
        out.unreachable += sh.stats.unreachable;
        out.false_positives += sh.stats.false_positives;
        out.table_lookups += sh.stats.table_lookups;
        table_ns.insert(table_ns.end(), sh.table_ns.begin(), sh.table_ns.end());
        local_ns.insert(local_ns.end(), sh.local_ns.begin(), sh.local_ns.end());
    }
    out.table_time = summarize_timings(std::move(table_ns));
    out.local_time = summarize_timings(std::move(local_ns));
    return out;
}

//--------------------------------------------------------- rank benchmark ----

// Per-exponent locality statistics for Dijkstra-rank query workloads. The
// conditioned columns restrict to pairs whose endpoints are both non-transit,
// which isolates the filter behaviour from the transit-endpoint short-circuit
// (significant when k is a visible fraction of n).
struct RankBucket {
    uint32_t j = 0;
    uint64_t pairs = 0;
    uint64_t local = 0;
    uint64_t nt_pairs = 0;
    uint64_t nt_local = 0;

    double local_fraction() const { return pairs ? double(local) / double(pairs) : 0.0; }
    double nt_local_fraction() const { return nt_pairs ? double(nt_local) / double(nt_pairs) : 0.0; }
};

inline std::vector<RankBucket> run_rank_benchmark(const Graph& g, const TNRIndex& idx,
                                                  const std::vector<NodeId>& sources,
                                                  const std::vector<uint32_t>& exponents) {
    require(g.node_count() == idx.n, "rank benchmark: graph/index node count mismatch");
    std::vector<RankBucket> buckets(exponents.size());
    for (size_t b = 0; b < exponents.size(); ++b) buckets[b].j = exponents[b];
    for (NodeId s : sources) {
        std::vector<RankSpec> specs = rank_targets(g, s, exponents);
        for (const RankSpec& spec : specs) {
            size_t b = 0;
            while (exponents[b] != spec.j) ++b;
            bool local = locality_filter(idx, spec.source, spec.target);
            ++buckets[b].pairs;
            buckets[b].local += local;
            bool s_transit = idx.is_transit_internal(idx.to_internal(spec.source));
            bool t_transit = idx.is_transit_internal(idx.to_internal(spec.target));
            if (!s_transit && !t_transit) {
                ++buckets[b].nt_pairs;
                buckets[b].nt_local += local;
            }
        }
    }
    return buckets;
}

//-------------------------------------------------------------------- CSV ----

// CSV schemas are versioned by the leading `schema` column; the formats are
// documented in docs/csv_formats.md.

inline void emit_bench_csv(std::ostream& out, const QueryStats& s) {
    out << "schema,queries,table,local,identical,unreachable,false_positives,table_lookups,"
           "local_fraction,table_mean_ns,table_p50_ns,table_p90_ns,table_p99_ns,"
           "local_mean_ns,local_p50_ns,local_p90_ns,local_p99_ns\n";
    out << "bench-v1," << s.total << ',' << s.table_count << ',' << s.local_count << ','
        << s.identical_count << ',' << s.unreachable << ',' << s.false_positives << ','
        << s.table_lookups << ',' << s.local_fraction() << ',' << s.table_time.mean_ns << ','
        << s.table_time.p50_ns << ',' << s.table_time.p90_ns << ',' << s.table_time.p99_ns << ','
        << s.local_time.mean_ns << ',' << s.local_time.p50_ns << ',' << s.local_time.p90_ns << ','
        << s.local_time.p99_ns << '\n';
}

inline void emit_rank_csv(std::ostream& out, const std::vector<RankBucket>& buckets) {
    out << "schema,j,pairs,local,local_fraction,nontransit_pairs,nontransit_local,"
           "nontransit_local_fraction\n";
    for (const RankBucket& b : buckets)
        out << "rank-v1," << b.j << ',' << b.pairs << ',' << b.local << ',' << b.local_fraction()
            << ',' << b.nt_pairs << ',' << b.nt_local << ',' << b.nt_local_fraction() << '\n';
}

inline void emit_size_csv(std::ostream& out, const IndexSizeStats& s) {
    out << "schema,component,bytes,bytes_per_node\n";
    auto row = [&](const char* name, uint64_t bytes) {
        out << "size-v1," << name << ',' << bytes << ',' << double(bytes) / double(s.nodes)
            << '\n';
    };
    row("hierarchy", s.hierarchy_bytes);
    row("table", s.table_bytes);
    row("access", s.access_bytes);
    row("locality", s.locality_bytes);
    row("total", s.total_bytes);
}

inline void emit_histogram_csv(std::ostream& out, const IndexHistograms& h) {
    out << "schema,kind,size,count\n";
    auto rows = [&](const char* kind, const SizeHistogram& hist) {
        for (size_t size = 0; size < hist.counts.size(); ++size)
            if (hist.counts[size])
                out << "hist-v1," << kind << ',' << size << ',' << hist.counts[size] << '\n';
    };
    rows("forward_access", h.forward_access);
    rows("backward_access", h.backward_access);
    rows("rep_set", h.rep_set);
}

} // namespace chtnr
