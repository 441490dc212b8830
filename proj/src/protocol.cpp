#include "remst/protocol.hpp"

#include <algorithm>

namespace remst::proto {

const char* to_string(MsgKind k) {
    switch (k) {
        case MsgKind::find: return "find";
        case MsgKind::report: return "report";
        case MsgKind::test: return "test";
        case MsgKind::accept: return "accept";
        case MsgKind::reject: return "reject";
        case MsgKind::inform: return "inform";
        case MsgKind::merge_req: return "merge_req";
        case MsgKind::internal: return "internal";
        case MsgKind::merge: return "merge";
        case MsgKind::commit: return "commit";
        case MsgKind::ignore: return "ignore";
        case MsgKind::modify: return "modify";
    }
    return "?";
}

namespace {

const char* op_name(InternalOp op) {
    switch (op) {
        case InternalOp::fwd_req: return "fwd";
        case InternalOp::route_merge: return "merge";
        case InternalOp::route_ignore: return "ignore";
        case InternalOp::route_moe: return "moe";
        case InternalOp::none: break;
    }
    return "?";
}

}  // namespace

std::string Message::payload_text() const {
    switch (kind) {
        case MsgKind::find:
        case MsgKind::test:
        case MsgKind::modify:
            return std::to_string(cluster.root);
        case MsgKind::accept:
            return std::to_string(aux);
        case MsgKind::reject:
            return "-";
        case MsgKind::report:
            if (!edge) return "none";
            return fmt_edge(*edge) + "@" + std::to_string(aux);
        case MsgKind::inform:
            return fmt_edge(*edge);
        case MsgKind::merge_req:
        case MsgKind::merge:
        case MsgKind::commit:
        case MsgKind::ignore:
            return std::to_string(cluster.root) + " " + fmt_edge(*edge);
        case MsgKind::internal:
            return std::string(op_name(op)) + " " + std::to_string(cluster.root) +
                   (edge ? " " + fmt_edge(*edge) : "");
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Node handlers

std::vector<Message> Node::begin_round() {
    st.next_candidate = 0;
    st.testing.reset();
    st.search_done = false;
    st.local_moe.reset();
    st.best_edge.reset();
    st.best_owner = kNoNode;
    st.best_via.reset();
    st.reported_children.clear();
    st.report_sent = false;
    st.is_moe_owner = false;
    st.cluster_moe.reset();
    st.req_via.clear();
    st.stored.clear();
    st.sent_merge_over.reset();
    st.pending_merges.clear();

    std::vector<Message> out;
    if (!st.is_root) return out;
    for (NodeId c : st.children)
        out.push_back({MsgKind::find, st.me, c, st.cluster});
    auto search = moe_search_step();
    out.insert(out.end(), search.begin(), search.end());
    return out;
}

std::vector<Message> Node::handle(const Message& m) {
    switch (m.kind) {
        case MsgKind::find: return handle_find(m);
        case MsgKind::test: return handle_test(m);
        case MsgKind::accept: return handle_accept(m);
        case MsgKind::reject: return handle_reject(m);
        case MsgKind::report: return handle_report(m);
        case MsgKind::inform: return handle_inform(m);
        case MsgKind::merge_req: return handle_merge_req(m);
        case MsgKind::internal: return handle_internal(m);
        case MsgKind::commit: return handle_commit(m);
        case MsgKind::modify: return handle_modify(m);
        case MsgKind::merge:
            st.pending_merges.push_back({m.cluster, *m.edge, m.src});
            return {};
        case MsgKind::ignore:
            return {};  // proposal rebuffed; nothing to unwind
    }
    return {};
}

std::vector<Message> Node::handle_find(const Message& m) {
    if (!st.parent || *st.parent != m.src)
        throw ProtocolViolation("find from non-parent at node " + std::to_string(st.me));
    st.cluster = m.cluster;
    std::vector<Message> out;
    for (NodeId c : st.children)
        out.push_back({MsgKind::find, st.me, c, st.cluster});
    auto search = moe_search_step();
    out.insert(out.end(), search.begin(), search.end());
    return out;
}

std::optional<EdgeKey> Node::next_open_candidate() {
    while (st.next_candidate < st.candidates.size()) {
        const EdgeKey& e = st.candidates[st.next_candidate];
        ++st.next_candidate;
        if (st.rejected.count(e)) continue;
        if (tree_neighbor(e.other(st.me))) continue;
        return e;
    }
    return std::nullopt;
}

std::vector<Message> Node::moe_search_step() {
    if (auto e = next_open_candidate()) {
        st.testing = *e;
        return {{MsgKind::test, st.me, e->other(st.me), st.cluster}};
    }
    st.search_done = true;
    return maybe_finish_subtree();
}

std::vector<Message> Node::handle_test(const Message& m) {
    auto it = std::find_if(st.candidates.begin(), st.candidates.end(),
                           [&](const EdgeKey& e) { return e.other(st.me) == m.src; });
    if (it == st.candidates.end())
        throw ProtocolViolation("test over non-edge at node " + std::to_string(st.me));
    if (m.cluster != st.cluster) {
        Message a{MsgKind::accept, st.me, m.src, {}};
        a.aux = st.me;
        return {a};
    }
    st.rejected.insert(*it);  // responder marks too
    return {{MsgKind::reject, st.me, m.src, {}}};
}

std::vector<Message> Node::handle_accept(const Message& m) {
    if (!st.testing || st.testing->other(st.me) != m.src)
        throw ProtocolViolation("accept without outstanding test at node " + std::to_string(st.me));
    st.local_moe = st.testing;
    st.testing.reset();
    st.search_done = true;
    return maybe_finish_subtree();
}

std::vector<Message> Node::handle_reject(const Message& m) {
    if (!st.testing || st.testing->other(st.me) != m.src)
        throw ProtocolViolation("reject without outstanding test at node " + std::to_string(st.me));
    st.rejected.insert(*st.testing);
    st.testing.reset();
    return moe_search_step();
}

void Node::take_best(const EdgeKey& e, NodeId owner, std::optional<NodeId> via) {
    if (!st.best_edge || e < *st.best_edge) {
        st.best_edge = e;
        st.best_owner = owner;
        st.best_via = via;
    }
}

std::vector<Message> Node::handle_report(const Message& m) {
    if (!st.children.count(m.src))
        throw ProtocolViolation("report from non-child at node " + std::to_string(st.me));
    if (!st.reported_children.insert(m.src).second)
        throw ProtocolViolation("duplicate report from child " + std::to_string(m.src));
    if (m.edge) take_best(*m.edge, m.aux, m.src);
    return maybe_finish_subtree();
}

std::vector<Message> Node::maybe_finish_subtree() {
    if (!st.search_done || st.report_sent) return {};
    if (st.reported_children.size() != st.children.size()) return {};
    st.report_sent = true;
    if (st.local_moe) take_best(*st.local_moe, st.me, std::nullopt);
    if (!st.is_root) {
        Message r{MsgKind::report, st.me, *st.parent, {}};
        r.edge = st.best_edge;
        r.aux = st.best_edge ? st.best_owner : kNoNode;
        return {r};
    }
    return select_cluster_moe();
}

std::vector<Message> Node::select_cluster_moe() {
    st.cluster_moe = st.best_edge;
    if (!st.best_edge) return {};  // no outgoing edge: cluster is done
    if (!st.best_via) {
        st.is_moe_owner = true;
        return {};
    }
    Message m{MsgKind::inform, st.me, *st.best_via, {}};
    m.edge = st.best_edge;
    return {m};
}

std::vector<Message> Node::handle_inform(const Message& m) {
    if (st.best_via) {
        Message fwd{MsgKind::inform, st.me, *st.best_via, {}};
        fwd.edge = m.edge;
        return {fwd};
    }
    st.is_moe_owner = true;
    st.cluster_moe = m.edge;
    return {};
}

std::vector<Message> Node::begin_merge_requests() {
    if (!st.is_moe_owner) return {};
    Message m{MsgKind::merge_req, st.me, st.cluster_moe->other(st.me), st.cluster};
    m.edge = st.cluster_moe;
    return {m};
}

std::vector<Message> Node::handle_merge_req(const Message& m) {
    if (st.cluster < m.cluster) {
        Message ig{MsgKind::ignore, st.me, m.src, st.cluster};
        ig.edge = m.edge;
        return {ig};
    }
    st.req_via[m.cluster] = m.src;
    if (st.is_root) {
        st.stored.push_back({m.cluster, *m.edge});
        return {};
    }
    Message fwd{MsgKind::internal, st.me, *st.parent, m.cluster};
    fwd.edge = m.edge;
    fwd.op = InternalOp::fwd_req;
    return {fwd};
}

std::vector<Message> Node::begin_decision() {
    if (!st.is_root) return {};
    std::vector<Message> out;
    if (!st.stored.empty()) {
        StoredReq winner = *std::min_element(
            st.stored.begin(), st.stored.end(),
            [](const StoredReq& a, const StoredReq& b) { return a.sender < b.sender; });
        for (const StoredReq& r : st.stored) {
            auto routed = route_reply(
                r.sender == winner.sender ? MsgKind::merge : MsgKind::ignore, r.sender);
            out.insert(out.end(), routed.begin(), routed.end());
        }
        return out;
    }
    if (!st.cluster_moe) return {};  // nothing to merge with
    if (st.is_moe_owner) {
        Message m{MsgKind::merge, st.me, st.cluster_moe->other(st.me), st.cluster};
        m.edge = st.cluster_moe;
        st.sent_merge_over = st.cluster_moe;
        return {m};
    }
    Message d{MsgKind::internal, st.me, *st.best_via, st.cluster};
    d.edge = st.cluster_moe;
    d.op = InternalOp::route_moe;
    return {d};
}

std::vector<Message> Node::route_reply(MsgKind kind, ClusterId subject) {
    auto it = st.req_via.find(subject);
    if (it == st.req_via.end())
        throw ProtocolViolation("no route for reply to cluster " + std::to_string(subject.root));
    NodeId nxt = it->second;
    EdgeKey edge{};
    for (const StoredReq& r : st.stored)
        if (r.sender == subject) edge = r.edge;
    if (st.children.count(nxt)) {
        Message fwd{MsgKind::internal, st.me, nxt, subject};
        fwd.edge = edge;
        fwd.op = kind == MsgKind::merge ? InternalOp::route_merge : InternalOp::route_ignore;
        return {fwd};
    }
    // I was the entry node: cross the boundary.
    Message m{kind, st.me, nxt, st.cluster};
    m.edge = edge;
    if (kind == MsgKind::merge) st.sent_merge_over = edge;
    return {m};
}

std::vector<Message> Node::handle_internal(const Message& m) {
    switch (m.op) {
        case InternalOp::fwd_req: {
            st.req_via[m.cluster] = m.src;
            if (st.is_root) {
                st.stored.push_back({m.cluster, *m.edge});
                return {};
            }
            Message fwd = m;
            fwd.src = st.me;
            fwd.dst = *st.parent;
            return {fwd};
        }
        case InternalOp::route_merge:
        case InternalOp::route_ignore: {
            auto it = st.req_via.find(m.cluster);
            if (it == st.req_via.end())
                throw ProtocolViolation("reply routing lost at node " + std::to_string(st.me));
            NodeId nxt = it->second;
            if (st.children.count(nxt)) {
                Message fwd = m;
                fwd.src = st.me;
                fwd.dst = nxt;
                return {fwd};
            }
            Message cross{m.op == InternalOp::route_merge ? MsgKind::merge : MsgKind::ignore,
                          st.me, nxt, st.cluster};
            cross.edge = m.edge;
            if (m.op == InternalOp::route_merge) st.sent_merge_over = m.edge;
            return {cross};
        }
        case InternalOp::route_moe: {
            if (st.best_via) {
                Message fwd = m;
                fwd.src = st.me;
                fwd.dst = *st.best_via;
                return {fwd};
            }
            if (!st.is_moe_owner)
                throw ProtocolViolation("moe directive reached non-owner " + std::to_string(st.me));
            Message cross{MsgKind::merge, st.me, m.edge->other(st.me), st.cluster};
            cross.edge = m.edge;
            st.sent_merge_over = m.edge;
            return {cross};
        }
        case InternalOp::none: break;
    }
    throw ProtocolViolation("internal message without operation");
}

std::vector<Message> Node::handle_commit(const Message& m) {
    if (!st.sent_merge_over || *st.sent_merge_over != *m.edge)
        throw ProtocolViolation("commit without preceding merge at node " + std::to_string(st.me));
    std::set<NodeId> old_neighbors = st.children;
    if (st.parent) old_neighbors.insert(*st.parent);
    st.cluster = m.cluster;
    st.parent = m.src;
    st.is_root = false;
    st.children = old_neighbors;
    std::vector<Message> out;
    for (NodeId n : old_neighbors)
        out.push_back({MsgKind::modify, st.me, n, st.cluster});
    return out;
}

std::vector<Message> Node::handle_modify(const Message& m) {
    if (m.cluster == st.cluster)
        throw ProtocolViolation("modify revisit at node " + std::to_string(st.me));
    std::set<NodeId> old_neighbors = st.children;
    if (st.parent) old_neighbors.insert(*st.parent);
    old_neighbors.erase(m.src);
    st.cluster = m.cluster;
    st.parent = m.src;
    st.is_root = false;
    st.children = old_neighbors;
    std::vector<Message> out;
    for (NodeId n : old_neighbors)
        out.push_back({MsgKind::modify, st.me, n, st.cluster});
    return out;
}

// ---------------------------------------------------------------------------
// Decomposition

Decomposition decompose(const AggregationTree& tree, const std::set<NodeId>& faulty,
                        const ReducedGraph& reduced) {
    if (faulty.empty()) throw std::invalid_argument("faulty set is empty");

    // Live-node tree adjacency, plus who sat next to a faulty node.
    std::map<NodeId, std::set<NodeId>> adj;
    std::set<NodeId> fault_adjacent;
    for (NodeId id : reduced.node_ids()) adj[id];
    for (const EdgeKey& e : tree.edges) {
        bool lo_f = faulty.count(e.lo) != 0;
        bool hi_f = faulty.count(e.hi) != 0;
        if (lo_f && hi_f) continue;
        if (lo_f) fault_adjacent.insert(e.hi);
        else if (hi_f) fault_adjacent.insert(e.lo);
        else {
            adj[e.lo].insert(e.hi);
            adj[e.hi].insert(e.lo);
        }
    }

    Decomposition d;
    std::set<NodeId> assigned;
    for (const auto& [start, _] : adj) {
        if (assigned.count(start)) continue;
        // Collect this component.
        std::set<NodeId> members;
        std::vector<NodeId> stack{start};
        members.insert(start);
        while (!stack.empty()) {
            NodeId v = stack.back();
            stack.pop_back();
            for (NodeId w : adj[v])
                if (members.insert(w).second) stack.push_back(w);
        }
        assigned.insert(members.begin(), members.end());

        // Root: minimum-id fault-adjacent member. Every component of a tree
        // minus a node set borders a removed node, so one always exists.
        NodeId root = kNoNode;
        for (NodeId v : members)
            if (fault_adjacent.count(v)) {
                root = v;
                break;  // members is sorted
            }
        if (root == kNoNode)
            throw ProtocolViolation("component without fault-adjacent member");

        Cluster c;
        c.id = ClusterId{root};
        c.members = members;
        for (const EdgeKey& e : tree.edges)
            if (members.count(e.lo) && members.count(e.hi)) c.tree_edges.insert(e);
        d.clusters.push_back(std::move(c));

        // Orient the component toward the root.
        std::vector<NodeId> order{root};
        std::map<NodeId, NodeId> parent_of;
        std::set<NodeId> seen{root};
        for (std::size_t i = 0; i < order.size(); ++i) {
            NodeId v = order[i];
            for (NodeId w : adj[v])
                if (seen.insert(w).second) {
                    parent_of[w] = v;
                    order.push_back(w);
                }
        }
        for (NodeId v : members) {
            Node node;
            node.st.me = v;
            node.st.cluster = ClusterId{root};
            node.st.is_root = (v == root);
            if (v != root) node.st.parent = parent_of.at(v);
            for (NodeId w : adj[v])
                if (!node.st.parent || *node.st.parent != w) node.st.children.insert(w);
            node.st.candidates = reduced.incident(v);
            d.nodes.emplace(v, std::move(node));
        }
    }
    return d;
}

}  // namespace remst::proto
