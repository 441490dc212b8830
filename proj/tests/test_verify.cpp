#include "doctest.h"
#include "remst/verify.hpp"
#include "test_support.hpp"

using namespace remst;
using namespace remst::testing;

TEST_CASE("acyclic/spanning checker on trees and near-trees") {
    CommGraph g = generate_rgg(30, 0.35, 3);
    REQUIRE(is_connected(g));
    std::set<EdgeKey> tree = oracle_mst(g);
    auto live = g.node_ids();

    auto [ac, sp] = verify::check_acyclic_spanning(tree, live);
    CHECK(ac);
    CHECK(sp);

    SUBCASE("one extra edge breaks acyclicity") {
        std::set<EdgeKey> extra = tree;
        for (const EdgeKey& e : g.edges())
            if (!tree.count(e)) {
                extra.insert(e);
                break;
            }
        REQUIRE(extra.size() == tree.size() + 1);
        auto [ac2, _] = verify::check_acyclic_spanning(extra, live);
        CHECK_FALSE(ac2);
    }
    SUBCASE("one missing edge breaks spanning but not acyclicity") {
        std::set<EdgeKey> partial = tree;
        partial.erase(partial.begin());
        auto [ac2, sp2] = verify::check_acyclic_spanning(partial, live);
        CHECK(ac2);
        CHECK_FALSE(sp2);
    }
}

TEST_CASE("mst checker: oracle against itself, then a heavier swap") {
    CommGraph g = generate_rgg(30, 0.35, 4);
    REQUIRE(is_connected(g));
    AggregationTree tree;
    tree.edges = oracle_mst(g);

    auto [ok, delta] = verify::check_mst(tree, g);
    CHECK(ok);
    CHECK(delta == 0.0);

    // Swap a tree edge for the strictly heavier non-tree edge that closes a
    // cycle over it: still spanning, no longer minimal.
    std::map<NodeId, std::vector<NodeId>> adj;
    for (const EdgeKey& e : tree.edges) {
        adj[e.lo].push_back(e.hi);
        adj[e.hi].push_back(e.lo);
    }
    for (const EdgeKey& extra : g.edges()) {
        if (tree.edges.count(extra)) continue;
        // Find any tree edge on the path between the endpoints.
        std::map<NodeId, NodeId> prev{{extra.lo, extra.lo}};
        std::vector<NodeId> stack{extra.lo};
        while (!stack.empty()) {
            NodeId v = stack.back();
            stack.pop_back();
            for (NodeId w : adj[v])
                if (!prev.count(w)) {
                    prev[w] = v;
                    stack.push_back(w);
                }
        }
        NodeId v = extra.hi;
        EdgeKey drop = *std::find_if(tree.edges.begin(), tree.edges.end(), [&](const EdgeKey& t) {
            return t.touches(v) && t.touches(prev.at(v));
        });
        AggregationTree swapped;
        swapped.edges = tree.edges;
        swapped.edges.erase(drop);
        swapped.edges.insert(extra);
        auto [ok2, delta2] = verify::check_mst(swapped, g);
        auto [ac, sp] = verify::check_acyclic_spanning(swapped.edges, g.node_ids());
        CHECK(ac);
        CHECK(sp);
        CHECK_FALSE(ok2);
        CHECK(delta2 > 0.0);
        break;
    }
}

TEST_CASE("mst checker refuses disconnected reduced graphs") {
    CommGraph g;
    g.add_node(0);
    g.add_node(1);
    AggregationTree t;
    CHECK_THROWS_AS(verify::check_mst(t, g), DisconnectedGraph);
}

TEST_CASE("message bounds hold for the hand scenarios") {
    for (sim::Scenario sc : {two_cluster_scenario(), chain_merge_scenario(),
                             halving_scenario(), best_case_scenario(5)}) {
        sim::SimResult res = sim::run(sc);
        CHECK(verify::check_message_bounds(res.round_stats(), res.reduced_edges, res.k_initial));
        CHECK(res.verdicts.message_bound_ok);
    }
}

TEST_CASE("message bounds: single cluster run is vacuously fine") {
    CHECK(verify::check_message_bounds({}, 10, 1));
}

TEST_CASE("message bounds flag violations") {
    verify::RoundMessageStats r;
    r.cluster_sizes = {2, 2};
    r.by_kind[int(proto::MsgKind::find)] = 100;  // way past 6 * 4
    CHECK_FALSE(verify::check_message_bounds({r}, 50, 2));

    verify::RoundMessageStats rejecty;
    rejecty.cluster_sizes = {2, 2};
    rejecty.by_kind[int(proto::MsgKind::reject)] = 11;
    CHECK_FALSE(verify::check_message_bounds({rejecty}, 5, 2));  // 11 > 2 * 5

    verify::RoundMessageStats ignored;
    ignored.cluster_sizes = {2, 2};
    ignored.by_kind[int(proto::MsgKind::ignore)] = 2;
    ignored.ignores_received[7] = 2;  // k - 1 == 1
    CHECK_FALSE(verify::check_message_bounds({ignored}, 50, 2));
}

TEST_CASE("message bounds demand cluster sizes") {
    verify::RoundMessageStats r;
    CHECK_THROWS_AS(verify::check_message_bounds({r}, 5, 2), MissingTrace);
}

TEST_CASE("round bound classification") {
    using verify::RoundClass;
    CHECK(verify::check_round_bounds(0, 1) == RoundClass::best_case);
    CHECK(verify::check_round_bounds(1, 6) == RoundClass::best_case);
    CHECK(verify::check_round_bounds(3, 8) == RoundClass::log_bounded);
    CHECK(verify::check_round_bounds(4, 8) == RoundClass::log_bounded);  // ceil(lg 8) + 1
    CHECK(verify::check_round_bounds(7, 8) == RoundClass::linear_bounded);
}

TEST_CASE("oracle matches exhaustive enumeration on small graphs") {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        for (int n = 2; n <= 6; ++n) {
            CommGraph g = generate_rgg(n, 0.8, 900 + seed * 7 + n);
            if (!is_connected(g)) continue;
            ++checked;
            CHECK(oracle_mst(g) == brute_force_mst(g));
        }
    }
    CHECK(checked >= 60);
}
