#ifndef REMST_UNION_FIND_HPP
#define REMST_UNION_FIND_HPP

#include <map>
#include <vector>

#include "remst/types.hpp"

namespace remst {

// Disjoint-set over arbitrary node ids. Used by the Kruskal oracle and as
// the independent acyclicity checker.
class UnionFind {
 public:
    UnionFind() = default;
    explicit UnionFind(const std::vector<NodeId>& ids) {
        for (NodeId id : ids) add(id);
    }

    void add(NodeId id) { parent_.emplace(id, id); }

    NodeId find(NodeId x) {
        NodeId r = x;
        while (parent_.at(r) != r) r = parent_.at(r);
        while (parent_.at(x) != r) {
            NodeId nxt = parent_.at(x);
            parent_.at(x) = r;
            x = nxt;
        }
        return r;
    }

    // False if a and b were already in the same set.
    bool unite(NodeId a, NodeId b) {
        NodeId ra = find(a), rb = find(b);
        if (ra == rb) return false;
        parent_.at(ra) = rb;
        return true;
    }

    std::size_t component_count() {
        std::size_t n = 0;
        for (const auto& [id, _] : parent_)
            if (find(id) == id) ++n;
        return n;
    }

 private:
    std::map<NodeId, NodeId> parent_;
};

}  // namespace remst

#endif  // REMST_UNION_FIND_HPP
