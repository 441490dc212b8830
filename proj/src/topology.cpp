#include "remst/topology.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "remst/rng.hpp"

namespace remst {

void CommGraph::add_node(NodeId id, Vec2 pos) {
    if (id < 0) throw std::invalid_argument("node id must be non-negative");
    if (!nodes_.emplace(id, pos).second)
        throw std::invalid_argument("duplicate node id " + std::to_string(id));
}

void CommGraph::add_edge(NodeId u, NodeId v, double weight) {
    if (!has_node(u)) throw UnknownNode("unknown node " + std::to_string(u));
    if (!has_node(v)) throw UnknownNode("unknown node " + std::to_string(v));
    if (weight <= 0.0) throw std::invalid_argument("edge weight must be positive");
    EdgeKey e = make_edge(u, v, weight);
    if (has_edge(u, v)) throw std::invalid_argument("duplicate edge " + fmt_edge(e));
    edges_.insert(e);
    adj_[u].insert(e);
    adj_[v].insert(e);
}

void CommGraph::add_edge_auto(NodeId u, NodeId v) {
    Vec2 a = position(u), b = position(v);
    add_edge(u, v, std::hypot(a.x - b.x, a.y - b.y));
}

bool CommGraph::has_edge(NodeId u, NodeId v) const {
    auto it = adj_.find(u);
    if (it == adj_.end()) return false;
    for (const EdgeKey& e : it->second)
        if (e.other(u) == v) return true;
    return false;
}

Vec2 CommGraph::position(NodeId id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw UnknownNode("unknown node " + std::to_string(id));
    return it->second;
}

std::vector<NodeId> CommGraph::node_ids() const {
    std::vector<NodeId> ids;
    ids.reserve(nodes_.size());
    for (const auto& [id, _] : nodes_) ids.push_back(id);
    return ids;
}

std::vector<EdgeKey> CommGraph::incident(NodeId id) const {
    auto it = adj_.find(id);
    if (it == adj_.end()) return {};
    return {it->second.begin(), it->second.end()};
}

bool CommGraph::nodes_same(const CommGraph& o) const {
    if (nodes_.size() != o.nodes_.size()) return false;
    auto a = nodes_.begin();
    auto b = o.nodes_.begin();
    for (; a != nodes_.end(); ++a, ++b) {
        if (a->first != b->first) return false;
        if (a->second.x != b->second.x || a->second.y != b->second.y) return false;
    }
    return true;
}

double AggregationTree::total_weight() const {
    double w = 0.0;
    for (const EdgeKey& e : edges) w += e.weight;
    return w;
}

CommGraph generate_rgg(int n, double radius, std::uint64_t seed, double side) {
    if (n < 2) throw std::invalid_argument("rgg needs at least 2 nodes");
    if (radius < 0.0) throw std::invalid_argument("rgg radius must be non-negative");
    if (side <= 0.0) throw std::invalid_argument("rgg side must be positive");

    Rng rng(seed);
    CommGraph g;
    for (NodeId id = 0; id < n; ++id) {
        double x = rng.next_unit() * side;
        double y = rng.next_unit() * side;
        g.add_node(id, {x, y});
    }
    for (NodeId u = 0; u < n; ++u) {
        Vec2 pu = g.position(u);
        for (NodeId v = u + 1; v < n; ++v) {
            Vec2 pv = g.position(v);
            if (std::hypot(pu.x - pv.x, pu.y - pv.y) <= radius) g.add_edge_auto(u, v);
        }
    }
    return g;
}

namespace {

// Minimal disjoint-set over arbitrary node ids.
class DisjointSet {
 public:
    explicit DisjointSet(const std::vector<NodeId>& ids) {
        for (NodeId id : ids) parent_[id] = id;
    }
    NodeId find(NodeId x) {
        NodeId r = x;
        while (parent_[r] != r) r = parent_[r];
        while (parent_[x] != r) {
            NodeId nxt = parent_[x];
            parent_[x] = r;
            x = nxt;
        }
        return r;
    }
    // False if already joined.
    bool unite(NodeId a, NodeId b) {
        NodeId ra = find(a), rb = find(b);
        if (ra == rb) return false;
        parent_[ra] = rb;
        return true;
    }

 private:
    std::map<NodeId, NodeId> parent_;
};

}  // namespace

std::set<EdgeKey> oracle_mst(const CommGraph& g) {
    if (!is_connected(g)) throw DisconnectedGraph("graph is not connected");
    std::set<EdgeKey> tree;
    DisjointSet ds(g.node_ids());
    for (const EdgeKey& e : g.edges()) {
        if (ds.unite(e.lo, e.hi)) tree.insert(e);
        if (tree.size() + 1 == g.node_count()) break;
    }
    return tree;
}

ReducedGraph remove_nodes(const CommGraph& g, const std::set<NodeId>& faulty) {
    if (faulty.empty()) throw std::invalid_argument("faulty set is empty");
    for (NodeId f : faulty)
        if (!g.has_node(f)) throw UnknownNode("faulty node " + std::to_string(f) + " not in graph");
    ReducedGraph r;
    for (NodeId id : g.node_ids())
        if (!faulty.count(id)) r.add_node(id, g.position(id));
    for (const EdgeKey& e : g.edges())
        if (!faulty.count(e.lo) && !faulty.count(e.hi)) r.add_edge(e.lo, e.hi, e.weight);
    return r;
}

bool is_connected(const CommGraph& g) {
    auto ids = g.node_ids();
    if (ids.size() <= 1) return true;
    std::set<NodeId> seen{ids.front()};
    std::vector<NodeId> stack{ids.front()};
    while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        for (const EdgeKey& e : g.incident(v)) {
            NodeId w = e.other(v);
            if (seen.insert(w).second) stack.push_back(w);
        }
    }
    return seen.size() == ids.size();
}

std::string dump_graph(const CommGraph& g) {
    std::string out;
    for (NodeId id : g.node_ids()) {
        Vec2 p = g.position(id);
        out += "node " + std::to_string(id) + " " + fmt_double(p.x) + " " + fmt_double(p.y) + "\n";
    }
    for (const EdgeKey& e : g.edges()) {
        out += "edge " + std::to_string(e.lo) + " " + std::to_string(e.hi) + " " +
               fmt_double(e.weight) + "\n";
    }
    return out;
}

CommGraph load_graph(std::istream& in) {
    CommGraph g;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        try {
            if (tag == "node") {
                long id;
                double x, y;
                if (!(ls >> id >> x >> y)) throw std::invalid_argument("bad node record");
                g.add_node(static_cast<NodeId>(id), {x, y});
            } else if (tag == "edge") {
                long u, v;
                double w;
                if (!(ls >> u >> v >> w)) throw std::invalid_argument("bad edge record");
                g.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v), w);
            } else {
                throw std::invalid_argument("unknown record '" + tag + "'");
            }
        } catch (const std::exception& e) {
            throw ConfigError("graph line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return g;
}

CommGraph load_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open graph file: " + path);
    return load_graph(in);
}

}  // namespace remst
