#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <sstream>

#include "chtnr/ch.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace chtnr;

namespace {


// Checks every pair against the oracle for several stall settings.
void check_all_pairs(const Graph& g, const CHIndex& ch) {
    auto truth = oracle::all_pairs(g);
    CHSearchScratch scratch;
    for (NodeId s = 0; s < g.node_count(); ++s)
        for (NodeId t = 0; t < g.node_count(); ++t)
            for (uint32_t hops : {0u, 1u, 2u, 3u}) {
                auto res = ch_query(ch, s, t, hops, &scratch);
                REQUIRE(res.distance == truth[s][t]);
            }
}

} // namespace

TEST_CASE("witness_search finds and misses witnesses") {
    SECTION("triangle: direct arc witnesses the path through node 1") {
        CHBuildState state(fixtures::triangle());
        REQUIRE(witness_search(state, 0, 1, 2, 2, 5, 1000));
    }
    SECTION("P4: no witness from 0 to 2 around node 1") {
        CHBuildState state(fixtures::p4());
        REQUIRE_FALSE(witness_search(state, 0, 1, 2, 2, 5, 1000));
    }
    SECTION("hop limit 0 truncates the search to nothing") {
        CHBuildState state(fixtures::triangle());
        REQUIRE_FALSE(witness_search(state, 0, 1, 2, 2, 0, 1000));
    }
}

TEST_CASE("node_priority on P4") {
    // Quotient definitions: edgeQuotient counts directed shortcuts over
    // directed incident arcs; originalEdgeQuotient weighs each arc by the
    // number of input arcs it represents.
    Graph g = fixtures::p4();
    CHParams params;
    SECTION("endpoint needs no shortcuts") {
        CHBuildState state(g);
        REQUIRE(node_priority(state, 0, params) == 0.0);
    }
    SECTION("middle node: 2 shortcuts / 4 arcs, 4 represented / 4 represented") {
        CHBuildState state(g);
        REQUIRE(node_priority(state, 1, params) == 2.0 * (2.0 / 4.0) + 4.0 * (4.0 / 4.0));
    }
    SECTION("depth term after a neighbor is contracted") {
        CHBuildState state(g);
        contract_node(state, 0, params);
        REQUIRE(node_priority(state, 1, params) == 1.0); // no shortcuts, depth 1
    }
    SECTION("isolated node scores only its depth") {
        CHBuildState state(Graph::from_arcs(2, {}));
        REQUIRE(node_priority(state, 0, params) == 0.0);
    }
}

TEST_CASE("contract_node shortcut counts") {
    CHParams params;
    SECTION("P4 in path order needs no shortcuts") {
        CHBuildState state(fixtures::p4());
        for (NodeId v : {0, 1, 2, 3}) REQUIRE(contract_node(state, v, params).empty());
    }
    SECTION("P4 contracting inner nodes first records 4 directed shortcuts") {
        CHBuildState state(fixtures::p4());
        auto s1 = contract_node(state, 1, params);
        REQUIRE(s1.size() == 2); // 0 <-> 2, weight 2
        for (const Shortcut& s : s1) {
            REQUIRE(s.weight == 2);
            REQUIRE(s.middle == 1);
        }
        auto s2 = contract_node(state, 2, params);
        REQUIRE(s2.size() == 2); // 0 <-> 3, weight 3
        for (const Shortcut& s : s2) {
            REQUIRE(s.weight == 3);
            REQUIRE(s.middle == 2);
        }
        REQUIRE(contract_node(state, 0, params).empty());
        REQUIRE(contract_node(state, 3, params).empty());
    }
    SECTION("triangle: the heavier direct edge witnesses both directions") {
        CHBuildState state(fixtures::triangle());
        REQUIRE(contract_node(state, 1, params).empty());
    }
}

TEST_CASE("build_hierarchy on P4 with forced path order") {
    Graph g = fixtures::p4();
    std::vector<NodeId> order = {0, 1, 2, 3};
    CHIndex ch = build_hierarchy(g, {}, &order);
    REQUIRE(ch.rank == std::vector<NodeId>{0, 1, 2, 3});
    REQUIRE(ch.level == std::vector<uint32_t>{0, 1, 2, 3});
    // Upward arcs exactly 0->1, 1->2, 2->3; no shortcuts anywhere.
    REQUIRE(ch.up_head == std::vector<NodeId>{1, 2, 3});
    REQUIRE(ch.up_weight == std::vector<Weight>{1, 1, 1});
    REQUIRE(ch.up_middle == std::vector<NodeId>{NO_NODE, NO_NODE, NO_NODE});
    REQUIRE(ch.up_first == std::vector<uint64_t>{0, 1, 2, 3, 3});
    // Downward arcs mirror them: entry (v, w) is the real arc (w -> v).
    REQUIRE(ch.dn_head == std::vector<NodeId>{1, 2, 3});
    REQUIRE(ch.dn_first == std::vector<uint64_t>{0, 1, 2, 3, 3});
}

TEST_CASE("build_hierarchy trivial graphs") {
    SECTION("single node") {
        CHIndex ch = build_hierarchy(Graph::from_arcs(1, {}));
        REQUIRE(ch.rank == std::vector<NodeId>{0});
        REQUIRE(ch.up_arc_count() == 0);
        REQUIRE(ch.dn_arc_count() == 0);
    }
    SECTION("forced order must be a permutation") {
        std::vector<NodeId> bad = {0, 0, 1, 2};
        REQUIRE_THROWS_AS(build_hierarchy(fixtures::p4(), {}, &bad), Error);
    }
}

TEST_CASE("ch_query on fixtures") {
    Graph g = fixtures::p4();
    std::vector<NodeId> order = {0, 1, 2, 3};
    CHIndex ch = build_hierarchy(g, {}, &order);
    SECTION("endpoints meet at the top of the chain") {
        auto res = ch_query(ch, 0, 3);
        REQUIRE(res.distance == 3);
        REQUIRE(res.meeting == 3);
    }
    SECTION("query to self is zero") {
        for (NodeId v = 0; v < 4; ++v) REQUIRE(ch_query(ch, v, v).distance == 0);
    }
    SECTION("node out of range") {
        REQUIRE_THROWS_AS(ch_query(ch, 0, 7), Error);
    }
    SECTION("disconnected pair yields INF and no meeting node") {
        Graph h = Graph::from_arcs(2, {});
        CHIndex chh = build_hierarchy(h);
        auto res = ch_query(chh, 0, 1);
        REQUIRE(res.distance == INF_WEIGHT);
        REQUIRE(res.meeting == NO_NODE);
    }
}

TEST_CASE("G0 is answered exactly under assorted forced orders") {
    Graph g = fixtures::g0();
    std::vector<std::vector<NodeId>> orders = {
        {0, 1, 2, 3, 4}, {4, 3, 2, 1, 0}, {2, 0, 4, 1, 3}, {1, 3, 0, 4, 2}};
    for (const auto& order : orders) {
        CHIndex ch = build_hierarchy(g, {}, &order);
        check_all_pairs(g, ch);
    }
}

TEST_CASE("hierarchy is exact on random strongly connected graphs") {
    for (uint64_t seed = 0; seed < 12; ++seed) {
        NodeId n = 20 + static_cast<NodeId>((seed * 37) % 80);
        Graph g = fixtures::random_strongly_connected(n, 3ull * n, 1000 + seed);
        CHIndex ch = build_hierarchy(g);
        auto truth = oracle::all_pairs(g);
        CHSearchScratch scratch;
        for (NodeId s = 0; s < n; ++s)
            for (NodeId t = 0; t < n; ++t)
                REQUIRE(ch_query(ch, s, t, 1, &scratch).distance == truth[s][t]);
    }
}

TEST_CASE("query results do not depend on the stall hop depth") {
    for (uint64_t seed = 50; seed < 54; ++seed) {
        Graph g = fixtures::random_strongly_connected(60, 180, seed);
        CHIndex ch = build_hierarchy(g);
        check_all_pairs(g, ch);
    }
    // Graphs with unreachable pairs keep the invariant too.
    Graph g = fixtures::random_sparse(50, 100, 7);
    CHIndex ch = build_hierarchy(g);
    check_all_pairs(g, ch);
}

TEST_CASE("both search graphs are DAGs with respect to rank") {
    Graph g = fixtures::random_strongly_connected(80, 240, 77);
    CHIndex ch = build_hierarchy(g);
    for (NodeId v = 0; v < ch.n; ++v) {
        for (uint64_t a = ch.up_first[v]; a < ch.up_first[v + 1]; ++a)
            REQUIRE(ch.rank[ch.up_head[a]] > ch.rank[v]);
        for (uint64_t a = ch.dn_first[v]; a < ch.dn_first[v + 1]; ++a)
            REQUIRE(ch.rank[ch.dn_head[a]] > ch.rank[v]);
    }
}

TEST_CASE("every search arc unpacks to an original path of equal weight") {
    Graph g = fixtures::random_strongly_connected(60, 200, 123);
    CHIndex ch = build_hierarchy(g);

    std::map<std::pair<NodeId, NodeId>, Weight> original;
    for (const InputArc& a : g.arcs()) original[{a.from, a.to}] = a.weight;
    auto check_path = [&](const std::vector<NodeId>& path, Weight want) {
        uint64_t total = 0;
        for (size_t i = 0; i + 1 < path.size(); ++i) {
            auto it = original.find({path[i], path[i + 1]});
            REQUIRE(it != original.end());
            total += it->second;
        }
        REQUIRE(total == want);
    };

    for (NodeId v = 0; v < ch.n; ++v) {
        for (uint64_t a = ch.up_first[v]; a < ch.up_first[v + 1]; ++a)
            check_path(unpack_arc(ch, v, ch.up_head[a]), ch.up_weight[a]);
        for (uint64_t a = ch.dn_first[v]; a < ch.dn_first[v + 1]; ++a)
            check_path(unpack_arc(ch, ch.dn_head[a], v), ch.dn_weight[a]);
    }
}

TEST_CASE("construction is deterministic") {
    Graph g = fixtures::random_strongly_connected(70, 210, 31);
    CHIndex a = build_hierarchy(g);
    CHIndex b = build_hierarchy(g);
    REQUIRE(a == b);
}

TEST_CASE("hierarchy binary dump round trips") {
    Graph g = fixtures::random_strongly_connected(40, 120, 5);
    CHIndex ch = build_hierarchy(g);
    std::stringstream buf;
    ch.serialize(buf);
    CHIndex back = CHIndex::deserialize(buf);
    REQUIRE(back == ch);
}

TEST_CASE("permuted hierarchy answers the same distances under new names") {
    Graph g = fixtures::random_strongly_connected(40, 120, 8);
    CHIndex ch = build_hierarchy(g);
    std::mt19937_64 rng(17);
    Permutation p = Permutation::identity(g.node_count());
    for (NodeId v = g.node_count(); v > 1; --v) std::swap(p.to_new[v - 1], p.to_new[rng() % v]);
    CHIndex chp = ch.permuted(p);
    auto truth = oracle::all_pairs(g);
    for (NodeId s = 0; s < g.node_count(); ++s)
        for (NodeId t = 0; t < g.node_count(); ++t)
            REQUIRE(ch_query(chp, p.to_new[s], p.to_new[t]).distance == truth[s][t]);
}

TEST_CASE("identity order on P4 equals the forced-order hierarchy") {
    // The lazy priority queue must reproduce a forced order when that order is
    // what the priorities dictate; on P4 the endpoints (priority 0) contract
    // before the middle nodes.
    Graph g = fixtures::p4();
    CHIndex ch = build_hierarchy(g);
    check_all_pairs(g, ch);
    REQUIRE(ch.rank[0] < ch.rank[1]); // endpoint before its neighbor
    REQUIRE(ch.rank[3] < ch.rank[2]);
}
