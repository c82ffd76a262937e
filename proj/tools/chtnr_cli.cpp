// Command-line front end: format conversion, index construction, single
// queries, and the benchmark harness. Every subcommand exits nonzero on
// failure, including any verification mismatch.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "chtnr/bench.hpp"
#include "chtnr/ch.hpp"
#include "chtnr/dijkstra.hpp"
#include "chtnr/graph.hpp"
#include "chtnr/target_oracle.hpp"
#include "chtnr/tnr.hpp"
#include "chtnr/tnr_query.hpp"

using namespace chtnr;

namespace {

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "cannot open " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), "cannot create " + path);
    return out;
}

Graph load_graph(const std::string& path) {
    auto in = open_in(path);
    return Graph::deserialize(in);
}

TNRIndex load_index(const std::string& path) {
    auto in = open_in(path);
    return TNRIndex::deserialize(in);
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double secs() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

std::string show(Weight w) { return w == INF_WEIGHT ? "INFINITY" : std::to_string(w); }

void write_csv(const std::string& path, const std::function<void(std::ostream&)>& emit) {
    if (path.empty()) return;
    auto out = open_out(path);
    emit(out);
    std::fprintf(stderr, "wrote %s\n", path.c_str());
}

void run_convert(const std::string& in_path, const std::string& out_path) {
    auto in = open_in(in_path);
    Timer timer;
    Graph g = parse_dimacs(in);
    auto out = open_out(out_path);
    g.serialize(out);
    std::printf("converted %s: %u nodes, %llu arcs (%.3fs)\n", in_path.c_str(), g.node_count(),
                static_cast<unsigned long long>(g.arc_count()), timer.secs());
}

void run_ch_build(const std::string& graph_path, const std::string& out_path) {
    Graph g = load_graph(graph_path);
    Timer timer;
    CHIndex ch = build_hierarchy(g);
    double build = timer.secs();
    auto out = open_out(out_path);
    ch.serialize(out);
    std::printf("hierarchy over %u nodes: %llu up arcs, %llu down arcs (%.3fs)\n", ch.n,
                static_cast<unsigned long long>(ch.up_arc_count()),
                static_cast<unsigned long long>(ch.dn_arc_count()), build);
}

void run_tnr_build(const std::string& graph_path, const std::string& out_path, NodeId k,
                   uint32_t stall_hops, const std::string& renumber, uint32_t threads,
                   const std::string& size_csv) {
    Graph g = load_graph(graph_path);
    TNRBuildOptions opts;
    opts.stall_hops = stall_hops;
    opts.order = non_transit_order_from_string(renumber);
    opts.threads = threads;
    Timer timer;
    TNRIndex idx = build_tnr(g, CHParams{}, k, opts);
    double build = timer.secs();
    auto out = open_out(out_path);
    idx.serialize(out);

    IndexSizeStats size = index_size_stats(idx);
    std::printf("transit index: n=%u k=%u stall_hops=%u order=%s (%.3fs)\n", idx.n, idx.k,
                idx.stall_hops, to_string(idx.order), build);
    std::printf("  bytes: hierarchy=%llu table=%llu access=%llu locality=%llu total=%llu "
                "(%.1f per node)\n",
                static_cast<unsigned long long>(size.hierarchy_bytes),
                static_cast<unsigned long long>(size.table_bytes),
                static_cast<unsigned long long>(size.access_bytes),
                static_cast<unsigned long long>(size.locality_bytes),
                static_cast<unsigned long long>(size.total_bytes),
                double(size.total_bytes) / double(size.nodes));
    write_csv(size_csv, [&](std::ostream& o) { emit_size_csv(o, size); });
}

void run_query(const std::string& index_path, NodeId s, NodeId t) {
    TNRIndex idx = load_index(index_path);
    QueryResult r = query(idx, s, t);
    const char* kind = r.kind == QueryKind::identical ? "identical"
                       : r.kind == QueryKind::table   ? "table"
                                                      : "local";
    std::printf("s=%u t=%u distance=%s class=%s table_lookups=%llu\n", s, t,
                show(r.distance).c_str(), kind,
                static_cast<unsigned long long>(r.table_lookups));
}

void run_bench(const std::string& index_path, uint64_t n_queries, uint64_t seed, bool verify,
               uint32_t threads, const std::string& csv, const std::string& size_csv,
               const std::string& hist_csv) {
    TNRIndex idx = load_index(index_path);
    auto queries = gen_random_queries(n_queries, seed, idx.n);
    BenchOptions opts;
    opts.verify = verify;
    opts.threads = threads;
    Timer timer;
    QueryStats stats = run_benchmark(idx, queries, opts);
    double total = timer.secs();

    std::printf("%llu queries in %.3fs%s\n", static_cast<unsigned long long>(stats.total), total,
                verify ? " (all verified)" : "");
    std::printf("  classes: table=%llu local=%llu identical=%llu unreachable=%llu\n",
                static_cast<unsigned long long>(stats.table_count),
                static_cast<unsigned long long>(stats.local_count),
                static_cast<unsigned long long>(stats.identical_count),
                static_cast<unsigned long long>(stats.unreachable));
    std::printf("  local fraction: %.4f   false positives: %llu   table lookups: %llu\n",
                stats.local_fraction(), static_cast<unsigned long long>(stats.false_positives),
                static_cast<unsigned long long>(stats.table_lookups));
    std::printf("  table-class ns: mean=%.0f p50=%.0f p90=%.0f p99=%.0f\n", stats.table_time.mean_ns,
                stats.table_time.p50_ns, stats.table_time.p90_ns, stats.table_time.p99_ns);
    std::printf("  local-class ns: mean=%.0f p50=%.0f p90=%.0f p99=%.0f\n", stats.local_time.mean_ns,
                stats.local_time.p50_ns, stats.local_time.p90_ns, stats.local_time.p99_ns);

    write_csv(csv, [&](std::ostream& o) { emit_bench_csv(o, stats); });
    write_csv(size_csv, [&](std::ostream& o) { emit_size_csv(o, index_size_stats(idx)); });
    write_csv(hist_csv, [&](std::ostream& o) { emit_histogram_csv(o, index_histograms(idx)); });
}

void run_rank_bench(const std::string& graph_path, const std::string& index_path,
                    uint64_t n_sources, uint64_t seed, int max_exponent, const std::string& csv) {
    Graph g = load_graph(graph_path);
    TNRIndex idx = load_index(index_path);
    require(g.node_count() == idx.n, "graph and index disagree on node count");

    int top = max_exponent >= 0
                  ? max_exponent
                  : static_cast<int>(std::floor(std::log2(double(std::max<NodeId>(2, g.node_count())))));
    std::vector<uint32_t> exponents;
    for (int j = 0; j <= top; ++j) exponents.push_back(static_cast<uint32_t>(j));

    std::mt19937_64 rng(seed);
    std::vector<NodeId> sources;
    for (uint64_t i = 0; i < n_sources; ++i)
        sources.push_back(static_cast<NodeId>(rng() % g.node_count()));

    auto buckets = run_rank_benchmark(g, idx, sources, exponents);
    std::printf("rank  pairs  local  fraction  (non-transit pairs: fraction)\n");
    for (const RankBucket& b : buckets)
        std::printf("2^%-3u %6llu %6llu    %.4f  (%llu: %.4f)\n", b.j,
                    static_cast<unsigned long long>(b.pairs),
                    static_cast<unsigned long long>(b.local), b.local_fraction(),
                    static_cast<unsigned long long>(b.nt_pairs), b.nt_local_fraction());
    write_csv(csv, [&](std::ostream& o) { emit_rank_csv(o, buckets); });
}

void run_target_bench(const std::string& index_path, NodeId target, bool verify,
                      const std::string& out_path) {
    TNRIndex idx = load_index(index_path);
    Timer build_timer;
    TargetOracle oracle = build_target_oracle(idx, target);
    double build = build_timer.secs();

    std::vector<Weight> reference;
    if (verify)
        reference = dijkstra(idx.graph, idx.to_internal(target), {}, std::nullopt,
                             Direction::backward)
                        .dist;

    uint64_t lookups = 0, mismatches = 0;
    Timer query_timer;
    for (NodeId s = 0; s < idx.n; ++s) {
        TargetQueryResult r = one_to_target(oracle, idx, s);
        lookups += r.array_lookups + r.local_probes;
        if (verify && r.distance != reference[idx.to_internal(s)]) {
            ++mismatches;
            std::fprintf(stderr, "mismatch: s=%u t=%u expected=%s got=%s\n", s, target,
                         show(reference[idx.to_internal(s)]).c_str(), show(r.distance).c_str());
        }
    }
    double qsecs = query_timer.secs();

    std::printf("target %u: oracle built in %.3fs (%u transit entries)\n", target, build,
                oracle.k);
    std::printf("  %u sources in %.3fs, %.2f probes per query%s\n", idx.n, qsecs,
                double(lookups) / double(idx.n),
                verify ? (mismatches ? "" : ", all verified") : "");
    if (!out_path.empty()) {
        auto out = open_out(out_path);
        oracle.serialize(out);
        std::fprintf(stderr, "wrote %s\n", out_path.c_str());
    }
    require(mismatches == 0,
            std::to_string(mismatches) + " one-to-target mismatches against the reference search");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distance-oracle toolkit: hierarchy and transit-node indexes for directed "
                 "graphs with non-negative integer weights"};
    app.require_subcommand(1);

    std::string in_path, out_path, graph_path, index_path;
    std::string csv, size_csv, hist_csv;
    std::string renumber = "dfs-increasing";
    NodeId k = 0, s = 0, t = 0;
    uint32_t stall_hops = 1, threads = 1;
    uint64_t n_queries = 10000, seed = 1, n_sources = 100;
    int max_exponent = -1;
    bool verify = false;

    auto* convert = app.add_subcommand("convert", "DIMACS .gr text to binary graph");
    convert->add_option("input", in_path, "DIMACS file")->required();
    convert->add_option("output", out_path, "binary graph file")->required();
    convert->callback([&] { run_convert(in_path, out_path); });

    auto* ch_build = app.add_subcommand("ch-build", "build a contraction hierarchy");
    ch_build->add_option("graph", graph_path, "binary graph file")->required();
    ch_build->add_option("output", out_path, "hierarchy file")->required();
    ch_build->callback([&] { run_ch_build(graph_path, out_path); });

    auto* tnr_build = app.add_subcommand("tnr-build", "build a transit-node index");
    tnr_build->add_option("graph", graph_path, "binary graph file")->required();
    tnr_build->add_option("output", out_path, "index file")->required();
    tnr_build->add_option("--k", k, "transit set size")->required();
    tnr_build->add_option("--stall-hops", stall_hops, "stall lookahead during access search");
    tnr_build->add_option("--renumber", renumber,
                          "dfs-increasing | dfs-decreasing | input-level");
    tnr_build->add_option("--threads", threads, "worker threads for access exploration");
    tnr_build->add_option("--size-csv", size_csv, "write per-component size CSV");
    tnr_build->callback(
        [&] { run_tnr_build(graph_path, out_path, k, stall_hops, renumber, threads, size_csv); });

    auto* query_cmd = app.add_subcommand("query", "answer one s-t distance query");
    query_cmd->add_option("index", index_path, "index file")->required();
    query_cmd->add_option("s", s, "source node")->required();
    query_cmd->add_option("t", t, "target node")->required();
    query_cmd->callback([&] { run_query(index_path, s, t); });

    auto* bench = app.add_subcommand("bench", "timed random-query benchmark");
    bench->add_option("index", index_path, "index file")->required();
    bench->add_option("--queries", n_queries, "number of random queries");
    bench->add_option("--seed", seed, "workload seed");
    bench->add_flag("--verify", verify, "check every answer with a reference search");
    bench->add_option("--threads", threads, "benchmark shards");
    bench->add_option("--csv", csv, "write query statistics CSV");
    bench->add_option("--size-csv", size_csv, "write per-component size CSV");
    bench->add_option("--hist-csv", hist_csv, "write access / search-space histograms CSV");
    bench->callback([&] {
        run_bench(index_path, n_queries, seed, verify, threads, csv, size_csv, hist_csv);
    });

    auto* rank_bench = app.add_subcommand("rank-bench", "locality by Dijkstra rank");
    rank_bench->add_option("graph", graph_path, "binary graph file")->required();
    rank_bench->add_option("index", index_path, "index file")->required();
    rank_bench->add_option("--sources", n_sources, "number of random sources");
    rank_bench->add_option("--seed", seed, "source sampling seed");
    rank_bench->add_option("--max-exponent", max_exponent,
                           "largest rank exponent (default: log2 n)");
    rank_bench->add_option("--csv", csv, "write per-rank CSV");
    rank_bench->callback(
        [&] { run_rank_bench(graph_path, index_path, n_sources, seed, max_exponent, csv); });

    auto* target_bench = app.add_subcommand("target-bench", "many-to-one oracle for one target");
    target_bench->add_option("index", index_path, "index file")->required();
    target_bench->add_option("t", t, "target node")->required();
    target_bench->add_flag("--verify", verify, "check all sources with a reference search");
    target_bench->add_option("--out", out_path, "also write the target oracle to a file");
    target_bench->callback([&] { run_target_bench(index_path, t, verify, out_path); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
