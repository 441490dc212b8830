#include "remst/engine.hpp"

#include <algorithm>
#include <future>
#include <thread>

#include "remst/union_find.hpp"

namespace remst::sim {

using proto::Message;
using proto::MsgKind;

const char* to_string(SimStatus s) {
    switch (s) {
        case SimStatus::reconstructed: return "reconstructed";
        case SimStatus::irreparable: return "irreparable";
        case SimStatus::round_limit: return "round_limit";
    }
    return "?";
}

Scenario make_scenario(CommGraph graph, std::set<NodeId> faulty) {
    Scenario sc;
    sc.initial_tree.edges = oracle_mst(graph);
    sc.graph = std::move(graph);
    sc.faulty = std::move(faulty);
    return sc;
}

std::pair<ReducedGraph, std::vector<proto::Cluster>> inject_faults(const Scenario& sc) {
    ReducedGraph reduced = remove_nodes(sc.graph, sc.faulty);
    if (reduced.node_count() == 0)
        throw std::invalid_argument("every node is faulty");
    auto d = proto::decompose(sc.initial_tree, sc.faulty, reduced);
    return {std::move(reduced), std::move(d.clusters)};
}

namespace {

// Delivery order within a step.
bool delivery_less(const Message& a, const Message& b) {
    auto key = [](const Message& m) {
        EdgeKey e = m.edge.value_or(EdgeKey{});
        return std::make_tuple(m.src, m.dst, static_cast<int>(m.kind), m.cluster.root,
                               e.weight, e.lo, e.hi, m.aux, static_cast<int>(m.op));
    };
    return key(a) < key(b);
}

}  // namespace

Simulation::Simulation(const Scenario& sc) : sc_(sc) {
    if (sc_.faulty.empty()) throw std::invalid_argument("no faulty nodes");
    if (sc_.max_rounds < 0) throw std::invalid_argument("max_rounds must be >= 1");
    if (sc_.initial_tree.edges != oracle_mst(sc_.graph))
        throw std::invalid_argument("initial tree is not the graph's MST");

    reduced_ = remove_nodes(sc_.graph, sc_.faulty);
    if (reduced_.node_count() == 0)
        throw std::invalid_argument("every node is faulty");
    reduced_connected_ = is_connected(reduced_);

    auto d = proto::decompose(sc_.initial_tree, sc_.faulty, reduced_);
    nodes_ = std::move(d.nodes);
    for (proto::Cluster& c : d.clusters) clusters_.emplace(c.id, std::move(c));
    step_budget_ = sc_.step_budget_factor * static_cast<int>(reduced_.node_count());
    if (step_budget_ < 4) step_budget_ = 4;
}

AggregationTree Simulation::current_tree() const {
    AggregationTree t;
    for (const auto& [id, c] : clusters_)
        t.edges.insert(c.tree_edges.begin(), c.tree_edges.end());
    return t;
}

void Simulation::record_delivery(int phase, const Message& m, RoundReport& rep) {
    ++delivered_;
    ++rep.messages_by_kind[static_cast<int>(m.kind)];
    if (m.kind == MsgKind::ignore)
        ++rep.ignores_received[nodes_.at(m.dst).st.cluster.root];
    if (sc_.trace_level == TraceLevel::full) {
        trace_ += std::to_string(round_) + "\t" + std::to_string(phase) + "\t" +
                  to_string(m.kind) + "\t" + std::to_string(m.src) + "\t" +
                  std::to_string(m.dst) + "\t" + m.payload_text() + "\n";
    }
}

Simulation::Messages Simulation::handle_sequential(const Messages& batch) {
    Messages out;
    for (const Message& m : batch) {
        Messages emitted = nodes_.at(m.dst).handle(m);
        out.insert(out.end(), emitted.begin(), emitted.end());
    }
    return out;
}

Simulation::Messages Simulation::handle_parallel(const Messages& batch) {
    // Group by destination, preserving per-node delivery order; nodes only
    // touch their own state, so groups are independent.
    std::map<NodeId, Messages> groups;
    for (const Message& m : batch) groups[m.dst].push_back(m);
    std::vector<std::pair<NodeId, Messages>> work(groups.begin(), groups.end());
    std::vector<Messages> results(work.size());

    unsigned threads = std::max(1u, std::min(4u, std::thread::hardware_concurrency()));
    std::size_t chunk = (work.size() + threads - 1) / threads;
    std::vector<std::future<void>> futures;
    for (unsigned t = 0; t < threads; ++t) {
        std::size_t lo = t * chunk;
        std::size_t hi = std::min(work.size(), lo + chunk);
        if (lo >= hi) break;
        futures.push_back(std::async(std::launch::async, [&, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) {
                Messages& out = results[i];
                for (const Message& m : work[i].second) {
                    Messages emitted = nodes_.at(work[i].first).handle(m);
                    out.insert(out.end(), emitted.begin(), emitted.end());
                }
            }
        }));
    }
    for (auto& f : futures) f.get();

    Messages out;
    for (const Messages& r : results) out.insert(out.end(), r.begin(), r.end());
    return out;
}

Simulation::Messages Simulation::deliver_step(int phase, Messages batch, RoundReport& rep) {
    std::sort(batch.begin(), batch.end(), delivery_less);
    for (const Message& m : batch) record_delivery(phase, m, rep);
    Messages out = sc_.parallel_delivery ? handle_parallel(batch) : handle_sequential(batch);
    emitted_ += out.size();

    if (phase == 3) {
        // Decision-phase boundary crossings are subround-IV traffic.
        Messages kept;
        for (Message& m : out) {
            if (m.kind == MsgKind::merge || m.kind == MsgKind::ignore)
                deferred_.push_back(std::move(m));
            else
                kept.push_back(std::move(m));
        }
        out = std::move(kept);
    }
    return out;
}

void Simulation::run_phase(int phase, Messages entries, RoundReport& rep) {
    if (phase == 3) {
        // Roots adjacent to their crossing edge emit merge/ignore directly.
        Messages kept;
        for (Message& m : entries) {
            if (m.kind == MsgKind::merge || m.kind == MsgKind::ignore)
                deferred_.push_back(std::move(m));
            else
                kept.push_back(std::move(m));
        }
        entries = std::move(kept);
    }
    Messages inflight = std::move(entries);
    int steps = 0;
    while (!inflight.empty()) {
        if (++steps > step_budget_)
            throw RoundDivergence("phase " + std::to_string(phase) + " exceeded " +
                                  std::to_string(step_budget_) + " delivery steps");
        inflight = deliver_step(phase, std::move(inflight), rep);
        ++rep.delivery_steps;
    }
}

RoundReport Simulation::run_round() {
    if (terminated()) throw std::logic_error("run_round on a terminated simulation");
    ++round_;
    RoundReport rep;
    rep.round = round_;
    rep.clusters_before = clusters_.size();
    for (const auto& [id, c] : clusters_) rep.cluster_sizes.push_back(c.members.size());

    // Subround I: moe discovery (find flood, tests, report convergecast,
    // inform routing).
    Messages entries;
    for (auto& [id, node] : nodes_) {
        Messages m = node.begin_round();
        entries.insert(entries.end(), m.begin(), m.end());
    }
    emitted_ += entries.size();
    run_phase(1, std::move(entries), rep);

    // Subround II: merge requests cross the moes and climb to the roots.
    entries.clear();
    for (auto& [id, node] : nodes_) {
        Messages m = node.begin_merge_requests();
        entries.insert(entries.end(), m.begin(), m.end());
    }
    emitted_ += entries.size();
    run_phase(2, std::move(entries), rep);

    // Subround III: roots decide; in-cluster routing runs now, the
    // resulting merge/ignore crossings are buffered for subround IV.
    entries.clear();
    for (auto& [id, node] : nodes_) {
        Messages m = node.begin_decision();
        entries.insert(entries.end(), m.begin(), m.end());
    }
    emitted_ += entries.size();
    run_phase(3, std::move(entries), rep);

    // Subround IV: crossings arrive, then honored merges fire in
    // dependency order with their commit/modify floods.
    run_phase(4, std::move(deferred_), rep);
    deferred_.clear();
    run_merge_events(rep);

    rep.clusters_after = clusters_.size();
    if (delivered_ != emitted_)
        throw ProtocolViolation("message conservation broken: emitted " +
                                std::to_string(emitted_) + ", delivered " +
                                std::to_string(delivered_));
    check_round_invariants(rep);
    return rep;
}

void Simulation::run_merge_events(RoundReport& rep) {
    // Classify arrived merges. A merge is honored exactly when the
    // receiver's cluster id is smaller than the sender's: that covers the
    // mutual case (lower id wins, the higher-id side drops its copy) and
    // the one-directional case (a higher-id cluster joins the receiver; a
    // lower-id sender whose target committed elsewhere is dropped).
    std::vector<MergeEvent> events;
    for (auto& [id, node] : nodes_) {
        auto pending = node.st.pending_merges;
        std::sort(pending.begin(), pending.end());
        for (const proto::PendingMerge& pm : pending) {
            if (node.st.cluster < pm.sender) {
                MergeEvent e;
                e.winner_node = id;
                e.loser_node = pm.src;
                e.edge = pm.edge;
                e.winner_pre = node.st.cluster;
                e.loser_pre = pm.sender;
                events.push_back(e);
            }
        }
    }

    // An event may only fire once the winner side's own fate is settled;
    // its absorption event, when one exists, goes first so the commit
    // carries the final cluster id down the chain.
    std::map<NodeId, int> by_loser;
    for (std::size_t i = 0; i < events.size(); ++i)
        by_loser[events[i].loser_pre.root] = static_cast<int>(i);
    for (MergeEvent& e : events) {
        auto it = by_loser.find(e.winner_pre.root);
        if (it != by_loser.end()) e.dep = it->second;
    }

    std::size_t fired = 0;
    while (fired < events.size()) {
        int pick = -1;
        for (std::size_t i = 0; i < events.size(); ++i) {
            MergeEvent& e = events[i];
            if (e.fired || (e.dep >= 0 && !events[e.dep].fired)) continue;
            if (pick < 0) {
                pick = static_cast<int>(i);
                continue;
            }
            auto key = [&](const MergeEvent& ev) {
                return std::make_pair(nodes_.at(ev.winner_node).st.cluster.root, ev.edge);
            };
            if (key(e) < key(events[pick])) pick = static_cast<int>(i);
        }
        if (pick < 0) throw ProtocolViolation("merge events form a dependency cycle");

        MergeEvent& e = events[pick];
        proto::Node& winner = nodes_.at(e.winner_node);
        ClusterId winner_cid = winner.st.cluster;
        ClusterId loser_cid = nodes_.at(e.loser_node).st.cluster;

        winner.st.children.insert(e.loser_node);
        Message commit{MsgKind::commit, e.winner_node, e.loser_node, winner_cid};
        commit.edge = e.edge;
        ++emitted_;
        run_phase(4, {commit}, rep);

        proto::Cluster& wc = clusters_.at(winner_cid);
        proto::Cluster lc = std::move(clusters_.at(loser_cid));
        clusters_.erase(loser_cid);
        wc.members.insert(lc.members.begin(), lc.members.end());
        wc.tree_edges.insert(lc.tree_edges.begin(), lc.tree_edges.end());
        wc.tree_edges.insert(e.edge);
        rep.merges.push_back({winner_cid, loser_cid, e.edge});

        e.fired = true;
        ++fired;
    }
}

void Simulation::check_round_invariants(RoundReport& rep) {
    // Independent oracle: the forest stays acyclic after every round.
    auto live = reduced_.node_ids();
    auto [acyclic, _] = verify::check_acyclic_spanning(current_tree().edges, live);
    if (!acyclic) acyclic_every_round_ = false;

    // Partition sanity: clusters are disjoint trees covering the live set.
    std::size_t member_total = 0;
    std::set<NodeId> seen;
    for (const auto& [id, c] : clusters_) {
        member_total += c.members.size();
        seen.insert(c.members.begin(), c.members.end());
        if (c.tree_edges.size() + 1 != c.members.size())
            throw ProtocolViolation("cluster " + std::to_string(id.root) + " is not a tree");
        if (!c.members.count(id.root))
            throw ProtocolViolation("cluster root outside its member set");
        UnionFind uf(std::vector<NodeId>(c.members.begin(), c.members.end()));
        for (const EdgeKey& e : c.tree_edges)
            if (!c.members.count(e.lo) || !c.members.count(e.hi) || !uf.unite(e.lo, e.hi))
                throw ProtocolViolation("cluster tree edges inconsistent");
    }
    if (member_total != live.size() || seen.size() != live.size())
        throw ProtocolViolation("clusters do not partition the live nodes");

    // Node states must agree with the directory.
    for (const auto& [id, c] : clusters_)
        for (NodeId m : c.members) {
            const proto::Node& n = nodes_.at(m);
            if (n.st.cluster != c.id)
                throw ProtocolViolation("node " + std::to_string(m) + " holds a stale cluster id");
            if (n.st.is_root != (m == c.id.root) || n.st.is_root != !n.st.parent)
                throw ProtocolViolation("root flags inconsistent in cluster " +
                                        std::to_string(c.id.root));
        }

    // Progress: with at least two clusters in a connected reduced graph,
    // every round merges something.
    if (reduced_connected_ && rep.clusters_before >= 2 && rep.merges.empty())
        throw ProtocolViolation("no merge despite a connected reduced graph");
}

bool is_terminated(const Simulation& sim) { return sim.terminated(); }

SimResult run(const Scenario& sc) {
    Simulation sim(sc);
    SimResult res;
    res.k_initial = sim.clusters_.size();
    res.live_nodes = sim.reduced_.node_count();
    res.reduced_edges = sim.reduced_.edge_count();

    int max_rounds = sc.max_rounds > 0 ? sc.max_rounds : static_cast<int>(sc.graph.node_count());
    res.status = SimStatus::round_limit;
    if (sim.terminated()) res.status = SimStatus::reconstructed;
    while (!sim.terminated() && sim.round_ < max_rounds) {
        RoundReport rep = sim.run_round();
        bool merged_nothing = rep.merges.empty();
        res.reports.push_back(std::move(rep));
        if (sim.terminated()) {
            res.status = SimStatus::reconstructed;
            break;
        }
        if (merged_nothing) {
            // Every remaining cluster spans its whole component: the
            // reduced graph is disconnected and reconstruction is
            // impossible by the model's own precondition.
            res.status = SimStatus::irreparable;
            break;
        }
    }

    res.rounds_used = sim.round_;
    res.final_tree = sim.current_tree();
    res.trace = std::move(sim.trace_);
    for (const RoundReport& r : res.reports)
        for (int k = 0; k < proto::kMsgKindCount; ++k)
            res.message_totals[k] += r.messages_by_kind[k];

    auto live = sim.reduced_.node_ids();
    auto [acyclic, spanning] = verify::check_acyclic_spanning(res.final_tree.edges, live);
    res.verdicts.acyclic = acyclic && sim.acyclic_every_round_;
    res.verdicts.spanning = spanning;
    if (res.status == SimStatus::reconstructed) {
        auto [mst_ok, delta] = verify::check_mst(res.final_tree, sim.reduced_);
        res.verdicts.mst_equivalent = mst_ok;
        res.verdicts.weight_delta = delta;
    }
    res.verdicts.message_bound_ok =
        verify::check_message_bounds(res.round_stats(), res.reduced_edges, res.k_initial);
    res.verdicts.rounds_observed = res.rounds_used;
    return res;
}

}  // namespace remst::sim
