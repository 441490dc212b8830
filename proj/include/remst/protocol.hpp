#ifndef REMST_PROTOCOL_HPP
#define REMST_PROTOCOL_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "remst/topology.hpp"
#include "remst/types.hpp"

namespace remst::proto {

// The twelve message kinds of the reconstruction protocol.
enum class MsgKind {
    find,       // root floods its id down the cluster tree
    report,     // convergecast of the subtree's best outgoing edge
    test,       // probe whether an edge leaves the cluster
    accept,     // probe answer: other side is a different cluster
    reject,     // probe answer: same cluster; both sides mark the edge
    inform,     // root tells the owning node it holds the cluster moe
    merge_req,  // merge proposal sent across the moe
    internal,   // in-cluster relay (request forwarding, decision routing)
    merge,      // merge commitment crossing a cluster boundary
    commit,     // final acknowledgement; absorbed side reorients on receipt
    ignore,     // proposal rebuffed
    modify,     // floods the new cluster id through an absorbed subtree
};

inline constexpr int kMsgKindCount = 12;

const char* to_string(MsgKind k);

// What an internal message is carrying.
enum class InternalOp {
    none,
    fwd_req,     // merge_req payload on its way up to the root
    route_merge, // root's merge decision on its way down to the crossing node
    route_ignore,
    route_moe,   // root's order to emit merge over the cluster's own moe
};

// Flat message record. Unused payload fields stay at their defaults; the
// canonical render (and the delivery sort key) covers every field that is
// meaningful for the kind.
struct Message {
    MsgKind kind = MsgKind::find;
    NodeId src = kNoNode;
    NodeId dst = kNoNode;
    ClusterId cluster{};                // cluster id payload (sender/new id)
    std::optional<EdgeKey> edge;        // edge payload (moe / crossing edge)
    NodeId aux = kNoNode;               // report owner, accept responder
    InternalOp op = InternalOp::none;

    Message() = default;
    Message(MsgKind k, NodeId s, NodeId d, ClusterId c = {})
        : kind(k), src(s), dst(d), cluster(c) {}

    // Strict total order used for deterministic delivery.
    friend auto operator<=>(const Message&, const Message&) = default;

    std::string payload_text() const;
};

// A cluster: one tree of the current forest, identified by its root's id.
struct Cluster {
    ClusterId id{};
    std::set<NodeId> members;
    std::set<EdgeKey> tree_edges;
};

// A merge proposal parked at a root, waiting for the decision phase.
struct StoredReq {
    ClusterId sender{};
    EdgeKey edge{};

    friend auto operator<=>(const StoredReq&, const StoredReq&) = default;
};

// A merge that arrived and waits for subround-IV classification.
struct PendingMerge {
    ClusterId sender{};
    EdgeKey edge{};
    NodeId src = kNoNode;

    friend auto operator<=>(const PendingMerge&, const PendingMerge&) = default;
};

// Per-node protocol state. Handlers only ever touch the node's own state,
// so distinct nodes can be evaluated in parallel within a delivery step.
struct NodeState {
    NodeId me = kNoNode;
    ClusterId cluster{};
    std::optional<NodeId> parent;  // absent iff root
    std::set<NodeId> children;
    bool is_root = false;

    std::set<EdgeKey> rejected;      // permanent across rounds
    std::vector<EdgeKey> candidates; // incident reduced-graph edges, sorted

    // Round-scoped scratch, cleared by begin_round().
    std::size_t next_candidate = 0;
    std::optional<EdgeKey> testing;
    bool search_done = false;
    std::optional<EdgeKey> local_moe;
    std::optional<EdgeKey> best_edge;   // subtree minimum so far
    NodeId best_owner = kNoNode;
    std::optional<NodeId> best_via;     // child that reported best_edge; absent = own
    std::set<NodeId> reported_children;
    bool report_sent = false;
    bool is_moe_owner = false;          // set by inform (or root self-selection)
    std::optional<EdgeKey> cluster_moe; // valid at the moe owner and the root
    std::map<ClusterId, NodeId> req_via; // reply-routing breadcrumbs
    std::vector<StoredReq> stored;       // root only
    std::optional<EdgeKey> sent_merge_over;
    std::vector<PendingMerge> pending_merges;
};

// Node handler set. Methods mutate this node's state and return the
// messages it emits; they never look at another node.
class Node {
 public:
    NodeState st;

    // Clears round scratch; root starts the find flood and its own search.
    std::vector<Message> begin_round();
    // Subround-II entry: the informed moe owner emits its merge request.
    std::vector<Message> begin_merge_requests();
    // Subround-III entry: root picks the minimum-id stored request (or its
    // own moe) and routes the decision.
    std::vector<Message> begin_decision();

    std::vector<Message> handle(const Message& m);

    bool tree_neighbor(NodeId v) const {
        return (st.parent && *st.parent == v) || st.children.count(v) != 0;
    }

 private:
    std::vector<Message> handle_find(const Message& m);
    std::vector<Message> handle_test(const Message& m);
    std::vector<Message> handle_accept(const Message& m);
    std::vector<Message> handle_reject(const Message& m);
    std::vector<Message> handle_report(const Message& m);
    std::vector<Message> handle_inform(const Message& m);
    std::vector<Message> handle_merge_req(const Message& m);
    std::vector<Message> handle_internal(const Message& m);
    std::vector<Message> handle_commit(const Message& m);
    std::vector<Message> handle_modify(const Message& m);

    // Emits the next test, or completes the search when no candidate is left.
    std::vector<Message> moe_search_step();
    // Report upward (or, at the root, select the cluster moe) once the local
    // search and every child report are in.
    std::vector<Message> maybe_finish_subtree();
    std::vector<Message> select_cluster_moe();
    // Route a decision toward the node that crosses it, following req_via
    // (replies) breadcrumbs; emits the crossing message at the end.
    std::vector<Message> route_reply(MsgKind kind, ClusterId subject);

    std::optional<EdgeKey> next_open_candidate();
    void take_best(const EdgeKey& e, NodeId owner, std::optional<NodeId> via);
};

// Connected components of `tree` after deleting the faulty nodes and their
// incident tree edges. Each component's root is its fault-adjacent member
// (minimum id when several qualify, which only multi-failure scenarios
// produce). Node states come back oriented toward those roots.
struct Decomposition {
    std::vector<Cluster> clusters;
    std::map<NodeId, Node> nodes;  // one per live node, fully initialized
};

Decomposition decompose(const AggregationTree& tree, const std::set<NodeId>& faulty,
                        const ReducedGraph& reduced);

}  // namespace remst::proto

#endif  // REMST_PROTOCOL_HPP
