#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "chtnr/tnr.hpp"
#include "chtnr/tnr_query.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace chtnr;

namespace {

std::vector<NodeId> p4_order = {0, 1, 2, 3};

TNRIndex p4_index(bool keep_raw = false) {
    TNRBuildOptions opts;
    opts.forced_order = &p4_order;
    opts.keep_raw_spaces = keep_raw;
    return build_tnr(fixtures::p4(), {}, 2, opts);
}

// Two disjoint components: 0 - 1 and 2 - 3.
TNRIndex split_index() {
    Graph g = Graph::from_arcs(4, {{0, 1, 1}, {1, 0, 1}, {2, 3, 1}, {3, 2, 1}});
    static std::vector<NodeId> order = {0, 2, 1, 3};
    TNRBuildOptions opts;
    opts.forced_order = &order;
    return build_tnr(g, {}, 2, opts);
}

bool sorted_intersects(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return true;
        a[i] < b[j] ? ++i : ++j;
    }
    return false;
}

} // namespace

TEST_CASE("locality filter on the path graph") {
    TNRIndex idx = p4_index();
    REQUIRE(locality_filter(idx, 0, 1));
    REQUIRE(locality_filter(idx, 1, 0));
    REQUIRE_FALSE(locality_filter(idx, 0, 3)); // target transit: empty space
    REQUIRE_FALSE(locality_filter(idx, 3, 0));
    REQUIRE_FALSE(locality_filter(idx, 3, 3)); // both spaces empty
    REQUIRE_FALSE(locality_filter(idx, 2, 3));
    REQUIRE_THROWS_AS(locality_filter(idx, 0, 9), Error);
}

TEST_CASE("table queries on the path graph") {
    TNRIndex idx = p4_index();
    uint64_t lookups = 0;
    REQUIRE(table_query(idx, 0, 3, &lookups) == 3);
    REQUIRE(lookups == 1); // one access node each side
    // Transit source: its own access set is the self-singleton.
    REQUIRE(table_query(idx, 3, 0) == 3);
    REQUIRE(table_query(idx, 2, 3) == 1);
    REQUIRE_THROWS_AS(table_query(idx, 9, 0), Error);
}

TEST_CASE("table query saturates across disconnected transit nodes") {
    TNRIndex idx = split_index();
    REQUIRE(table_query(idx, 0, 2) == INF_WEIGHT);

    QueryResult r = query(idx, 0, 2);
    REQUIRE(r.distance == INF_WEIGHT);
    REQUIRE(r.kind == QueryKind::table);
    // The component spaces occupy disjoint id ranges, so the interval test
    // alone settles the filter.
    REQUIRE(r.interval_shortcuts == 1);

    // Covered pair inside one component still answers through the table.
    QueryResult same = query(idx, 0, 1);
    REQUIRE(same.distance == 1);
    REQUIRE(same.kind == QueryKind::table);
}

TEST_CASE("query routes between table and fallback") {
    TNRIndex idx = p4_index();

    QueryResult local = query(idx, 0, 1);
    REQUIRE(local.distance == 1);
    REQUIRE(local.kind == QueryKind::local_fallback);
    REQUIRE(local.filter_evals == 1);
    REQUIRE(local.table_lookups == 0);

    QueryResult far = query(idx, 0, 3);
    REQUIRE(far.distance == 3);
    REQUIRE(far.kind == QueryKind::table);
    REQUIRE(far.table_lookups == 1);

    QueryResult self = query(idx, 2, 2);
    REQUIRE(self.distance == 0);
    REQUIRE(self.kind == QueryKind::identical);
    REQUIRE(self.filter_evals == 0);

    REQUIRE_THROWS_AS(query(idx, 4, 0), Error);
}

TEST_CASE("diamond pairs with a false filter are answered exactly by the table") {
    Graph g = fixtures::g0();
    TNRIndex idx = build_tnr(g, {}, 2, {});
    auto truth = oracle::all_pairs(g);
    for (NodeId s = 0; s < g.node_count(); ++s)
        for (NodeId t = 0; t < g.node_count(); ++t)
            if (!locality_filter(idx, s, t)) REQUIRE(table_query(idx, s, t) == truth[s][t]);
}

TEST_CASE("queries are exact on random graphs") {
    struct Setup {
        uint64_t seed;
        NodeId n;
        uint64_t arcs;
        NodeId k;
        uint32_t stall_hops;
        uint32_t threads;
        bool connected;
    };
    std::vector<Setup> setups = {
        {51, 25, 60, 4, 0, 1, true},  {52, 40, 100, 6, 1, 1, true},
        {53, 60, 150, 10, 2, 3, true}, {54, 80, 240, 20, 1, 1, true},
        {55, 40, 60, 5, 1, 1, false},  {56, 60, 90, 8, 2, 3, false},
        {57, 30, 300, 7, 1, 1, true},  {58, 80, 160, 4, 0, 1, false},
    };
    for (const Setup& s : setups) {
        Graph g = s.connected ? fixtures::random_strongly_connected(s.n, s.arcs, s.seed)
                              : fixtures::random_sparse(s.n, s.arcs, s.seed);
        TNRBuildOptions opts;
        opts.stall_hops = s.stall_hops;
        opts.threads = s.threads;
        TNRIndex idx = build_tnr(g, {}, s.k, opts);
        CHSearchScratch scratch;
        auto truth = oracle::all_pairs(g);
        for (NodeId a = 0; a < s.n; ++a) {
            for (NodeId b = 0; b < s.n; ++b) {
                QueryResult r = query(idx, a, b, &scratch);
                INFO("seed " << s.seed << " pair " << a << " -> " << b);
                REQUIRE(r.distance == truth[a][b]);
                if (a != b) {
                    REQUIRE(r.filter_evals == 1);
                    REQUIRE((r.kind == QueryKind::local_fallback) == locality_filter(idx, a, b));
                }
            }
        }
    }
}

TEST_CASE("filter is true whenever raw search spaces intersect") {
    for (uint64_t seed : {61u, 62u}) {
        Graph g = fixtures::random_strongly_connected(50, 130, seed);
        TNRBuildOptions opts;
        opts.keep_raw_spaces = true;
        TNRIndex idx = build_tnr(g, {}, 8, opts);
        for (NodeId si = 0; si < idx.n; ++si) {
            for (NodeId ti = 0; ti < idx.n; ++ti) {
                bool raw_meet = sorted_intersects(idx.raw_spaces[si], idx.raw_spaces[ti]);
                bool interval_only = false;
                bool verdict = detail::locality_filter_internal(idx, si, ti, &interval_only);
                INFO("seed " << seed << " internal pair " << si << ", " << ti);
                if (raw_meet) REQUIRE(verdict);
                // When the interval test alone rejects, the raw spaces must
                // really be disjoint.
                if (!verdict && interval_only) REQUIRE_FALSE(raw_meet);
            }
        }
    }
}

TEST_CASE("path query on the identical node never consults the index") {
    TNRIndex idx = p4_index();
    for (NodeId v = 0; v < 4; ++v) {
        QueryResult r = query(idx, v, v);
        REQUIRE(r.distance == 0);
        REQUIRE(r.filter_evals == 0);
        REQUIRE(r.table_lookups == 0);
    }
}
