#ifndef REMST_TOPOLOGY_HPP
#define REMST_TOPOLOGY_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "remst/types.hpp"

namespace remst {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Weighted undirected communication graph of sensor nodes with planar
// positions. Weights are stored explicitly so the protocol and the MST
// oracle always see bit-identical values; generated graphs set the weight
// to the Euclidean distance between the endpoints.
class CommGraph {
 public:
    void add_node(NodeId id, Vec2 pos = {});
    // Explicit weight (used by the loader and by synthetic test fixtures).
    void add_edge(NodeId u, NodeId v, double weight);
    // Weight derived from stored positions.
    void add_edge_auto(NodeId u, NodeId v);

    bool has_node(NodeId id) const { return nodes_.count(id) != 0; }
    bool has_edge(NodeId u, NodeId v) const;
    Vec2 position(NodeId id) const;

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    // Node ids in ascending order.
    std::vector<NodeId> node_ids() const;
    // All edges, ascending under edge_order.
    const std::set<EdgeKey>& edges() const { return edges_; }
    // Incident edges of `id`, ascending under edge_order.
    std::vector<EdgeKey> incident(NodeId id) const;

    bool operator==(const CommGraph& o) const {
        return nodes_same(o) && edges_ == o.edges_;
    }

 private:
    bool nodes_same(const CommGraph& o) const;

    std::map<NodeId, Vec2> nodes_;
    std::set<EdgeKey> edges_;
    std::map<NodeId, std::set<EdgeKey>> adj_;
};

// The communication graph restricted to live nodes. Same shape, separate
// name so signatures say which one they mean.
using ReducedGraph = CommGraph;

// Spanning tree (or forest, before reconstruction completes) as a canonical
// edge set.
struct AggregationTree {
    std::set<EdgeKey> edges;

    double total_weight() const;
    bool operator==(const AggregationTree&) const = default;
};

// Random geometric graph: n nodes uniform in the [0, side]^2 square, edge
// present iff the endpoint distance is <= radius. Identical (n, radius,
// seed, side) yield bit-identical graphs. A disconnected result is legal;
// callers gate on is_connected.
CommGraph generate_rgg(int n, double radius, std::uint64_t seed, double side = 1.0);

// Centralized Kruskal over edge_order. Unique result for a given graph;
// serves both as the initial-tree builder and as the verification oracle.
// Throws DisconnectedGraph when no spanning tree exists.
std::set<EdgeKey> oracle_mst(const CommGraph& g);

// Graph minus the faulty nodes and every edge incident to one of them.
// Throws UnknownNode if a faulty id is not present.
ReducedGraph remove_nodes(const CommGraph& g, const std::set<NodeId>& faulty);

// True iff the graph has at most one connected component (empty and
// single-node graphs count as connected).
bool is_connected(const CommGraph& g);

// Plain-text dump format, one record per line:
//   node <id> <x> <y>
//   edge <lo> <hi> <weight>
// Deterministic ordering (ids ascending, then edges under edge_order);
// load(dump(g)) reproduces g exactly.
std::string dump_graph(const CommGraph& g);
CommGraph load_graph(std::istream& in);
CommGraph load_graph_file(const std::string& path);

}  // namespace remst

#endif  // REMST_TOPOLOGY_HPP
