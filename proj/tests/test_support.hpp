#ifndef REMST_TEST_SUPPORT_HPP
#define REMST_TEST_SUPPORT_HPP

#include <optional>
#include <set>
#include <vector>

#include "remst/engine.hpp"
#include "remst/topology.hpp"
#include "remst/union_find.hpp"

namespace remst::testing {

// Star with a faulty hub: removing node 0 leaves each spoke as a singleton
// cluster. Crossing edges control the moe structure between clusters.
inline CommGraph star_graph(const std::vector<NodeId>& spokes,
                            const std::vector<EdgeKey>& crossings) {
    CommGraph g;
    g.add_node(0);
    for (NodeId s : spokes) g.add_node(s);
    for (NodeId s : spokes) g.add_edge(0, s, 0.5);
    for (const EdgeKey& e : crossings) g.add_edge(e.lo, e.hi, e.weight);
    return g;
}

inline sim::Scenario scenario_of(CommGraph g, std::set<NodeId> faulty,
                                 sim::TraceLevel lvl = sim::TraceLevel::full) {
    sim::Scenario sc = sim::make_scenario(std::move(g), std::move(faulty));
    sc.trace_level = lvl;
    return sc;
}

// Three singleton clusters 2, 4, 9 whose merges chain in one round:
// 9's merge lands on 4's side, 4 and 2 pair up mutually, and the modify
// cascade leaves everyone holding id 2.
inline sim::Scenario chain_merge_scenario() {
    CommGraph g = star_graph({2, 4, 9}, {make_edge(2, 4, 1.0), make_edge(4, 9, 2.0)});
    return scenario_of(std::move(g), {0});
}

// k singleton clusters 1..k, every cluster's moe leading to cluster 1.
inline sim::Scenario best_case_scenario(int k) {
    std::vector<NodeId> spokes;
    std::vector<EdgeKey> crossings;
    for (NodeId s = 1; s <= k; ++s) spokes.push_back(s);
    for (NodeId s = 2; s <= k; ++s) crossings.push_back(make_edge(1, s, double(s) - 1.0));
    return scenario_of(star_graph(spokes, crossings), {0});
}

// Eight singleton clusters on a path whose weights force pairwise merging:
// (1,2),(3,4),(5,6),(7,8), then (1..4),(5..8), then one cluster.
inline sim::Scenario halving_scenario() {
    CommGraph g = star_graph({1, 2, 3, 4, 5, 6, 7, 8},
                             {make_edge(1, 2, 1.0), make_edge(3, 4, 1.1),
                              make_edge(5, 6, 1.2), make_edge(7, 8, 1.3),
                              make_edge(2, 3, 2.0), make_edge(6, 7, 2.1),
                              make_edge(4, 5, 3.0)});
    return scenario_of(std::move(g), {0});
}

// Two singleton clusters joined by one crossing edge; the whole round is
// ten messages.
inline sim::Scenario two_cluster_scenario() {
    return scenario_of(star_graph({1, 2}, {make_edge(1, 2, 1.0)}), {0});
}

// Three singleton clusters where cluster 2's round-1 merge lands on a
// cluster that already committed elsewhere and is dropped: 3 and 1 pair up
// first, 2 joins the survivor a round later. One of the few shapes that
// needs the full k-1 rounds.
inline sim::Scenario dropped_merge_scenario() {
    CommGraph g = star_graph({1, 2, 3}, {make_edge(1, 3, 1.0), make_edge(2, 3, 2.0),
                                         make_edge(1, 2, 5.0)});
    return scenario_of(std::move(g), {0});
}

// Path 0-1-...-(n-1) along the x axis; the only edges are the consecutive
// ones, so the MST is the path itself.
inline CommGraph path_graph(int n) {
    CommGraph g;
    for (NodeId i = 0; i < n; ++i) g.add_node(i, {double(i), 0.0});
    for (NodeId i = 0; i + 1 < n; ++i) g.add_edge_auto(i, i + 1);
    return g;
}

// Cluster {0,1,2} with root 0 plus singleton {3}. Node 1 first tests its
// weight-3 edge into its own cluster (reject), then the weight-5 edge to
// node 3 (accept).
inline sim::Scenario reject_then_accept_scenario() {
    CommGraph g;
    for (NodeId i = 0; i <= 4; ++i) g.add_node(i);
    g.add_edge(0, 4, 0.1);
    g.add_edge(3, 4, 0.1);
    g.add_edge(0, 1, 1.0);
    g.add_edge(0, 2, 1.0);
    g.add_edge(1, 2, 3.0);
    g.add_edge(1, 3, 5.0);
    return scenario_of(std::move(g), {4});
}

inline std::uint64_t total_of(const sim::SimResult& r, proto::MsgKind k) {
    return r.message_totals[static_cast<int>(k)];
}

// Exhaustive MST oracle for tiny graphs: enumerate every (n-1)-subset of
// edges, keep the spanning trees, return the one whose sorted edge-key
// sequence is lexicographically smallest. Independent of the Kruskal path
// used by the implementation.
inline std::set<EdgeKey> brute_force_mst(const CommGraph& g) {
    std::vector<EdgeKey> edges(g.edges().begin(), g.edges().end());
    std::vector<NodeId> ids = g.node_ids();
    const std::size_t need = ids.size() - 1;
    if (edges.size() < need) throw DisconnectedGraph("too few edges");

    std::optional<std::vector<EdgeKey>> best;
    std::vector<std::size_t> pick(need);
    // Enumerate combinations of `need` edge indices.
    for (std::size_t i = 0; i < need; ++i) pick[i] = i;
    while (true) {
        UnionFind uf(ids);
        bool tree = true;
        for (std::size_t i : pick)
            if (!uf.unite(edges[i].lo, edges[i].hi)) {
                tree = false;
                break;
            }
        if (tree && uf.component_count() == 1) {
            std::vector<EdgeKey> cand;
            for (std::size_t i : pick) cand.push_back(edges[i]);
            if (!best || cand < *best) best = cand;
        }
        // Next combination.
        std::size_t i = need;
        while (i > 0) {
            --i;
            if (pick[i] != i + edges.size() - need) {
                ++pick[i];
                for (std::size_t j = i + 1; j < need; ++j) pick[j] = pick[j - 1] + 1;
                break;
            }
            if (i == 0) {
                if (!best) throw DisconnectedGraph("no spanning tree");
                return {best->begin(), best->end()};
            }
        }
        if (need == 0) break;
    }
    if (!best) throw DisconnectedGraph("no spanning tree");
    return {best->begin(), best->end()};
}

}  // namespace remst::testing

#endif  // REMST_TEST_SUPPORT_HPP
