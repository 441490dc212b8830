#ifndef REMST_ENGINE_HPP
#define REMST_ENGINE_HPP

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "remst/protocol.hpp"
#include "remst/topology.hpp"
#include "remst/types.hpp"
#include "remst/verify.hpp"

namespace remst::sim {

enum class TraceLevel { off, summary, full };
enum class SimStatus { reconstructed, irreparable, round_limit };

const char* to_string(SimStatus s);

// One fully specified experiment. Identical scenarios yield bit-identical
// results and traces, in sequential and in parallel delivery mode.
struct Scenario {
    CommGraph graph;
    AggregationTree initial_tree;  // must equal oracle_mst(graph)
    std::set<NodeId> faulty;
    int max_rounds = 0;            // 0: default to the node count
    TraceLevel trace_level = TraceLevel::summary;
    bool parallel_delivery = false;
    // Per-phase delivery-step budget is this factor times the live node
    // count; exceeding it raises RoundDivergence. Tests shrink it.
    int step_budget_factor = 4;
};

// Builds a scenario whose initial tree is the MST oracle's output.
Scenario make_scenario(CommGraph graph, std::set<NodeId> faulty);

struct MergeRecord {
    ClusterId winner{};
    ClusterId absorbed{};
    EdgeKey edge{};
};

struct RoundReport {
    int round = 0;
    std::size_t clusters_before = 0;
    std::size_t clusters_after = 0;
    std::vector<MergeRecord> merges;
    std::array<std::uint64_t, proto::kMsgKindCount> messages_by_kind{};
    std::vector<std::size_t> cluster_sizes;           // at round start
    std::map<NodeId, std::uint64_t> ignores_received; // by rebuffed cluster id
    int delivery_steps = 0;

    verify::RoundMessageStats stats() const {
        return {messages_by_kind, cluster_sizes, ignores_received};
    }
};

struct SimResult {
    SimStatus status = SimStatus::reconstructed;
    int rounds_used = 0;
    AggregationTree final_tree;  // a forest when status is irreparable
    std::vector<RoundReport> reports;
    verify::Verdicts verdicts;
    std::size_t k_initial = 0;
    std::size_t live_nodes = 0;
    std::size_t reduced_edges = 0;
    std::array<std::uint64_t, proto::kMsgKindCount> message_totals{};
    std::string trace;  // populated at TraceLevel::full

    std::vector<verify::RoundMessageStats> round_stats() const {
        std::vector<verify::RoundMessageStats> out;
        out.reserve(reports.size());
        for (const RoundReport& r : reports) out.push_back(r.stats());
        return out;
    }
};

// Computes the reduced graph and the initial clusters with fault-aware
// roots. Exposed for tests; run() performs the same step internally.
std::pair<ReducedGraph, std::vector<proto::Cluster>> inject_faults(const Scenario& sc);

// Barrier-synchronous scheduler. One run_round() executes the four
// subround phases of a super-round, each iterated in delivery steps until
// quiescent; messages emitted in a step are delivered in the next one,
// sorted by (src, dst, kind, payload).
class Simulation {
 public:
    explicit Simulation(const Scenario& sc);

    bool terminated() const { return clusters_.size() <= 1; }
    RoundReport run_round();

    const ReducedGraph& reduced() const { return reduced_; }
    const std::map<ClusterId, proto::Cluster>& clusters() const { return clusters_; }
    const proto::Node& node(NodeId id) const { return nodes_.at(id); }
    int rounds_run() const { return round_; }
    const std::string& trace() const { return trace_; }

    // Current forest: the union of every cluster's tree edges.
    AggregationTree current_tree() const;

 private:
    using Messages = std::vector<proto::Message>;

    struct MergeEvent {
        NodeId winner_node = kNoNode;
        NodeId loser_node = kNoNode;
        EdgeKey edge{};
        ClusterId winner_pre{};
        ClusterId loser_pre{};
        int dep = -1;  // event that must fire first, -1 if none
        bool fired = false;
    };

    void run_phase(int phase, Messages entries, RoundReport& rep);
    Messages deliver_step(int phase, Messages batch, RoundReport& rep);
    Messages handle_sequential(const Messages& batch);
    Messages handle_parallel(const Messages& batch);
    void record_delivery(int phase, const proto::Message& m, RoundReport& rep);
    void run_merge_events(RoundReport& rep);
    void check_round_invariants(RoundReport& rep);

    Scenario sc_;
    ReducedGraph reduced_;
    bool reduced_connected_ = false;
    std::map<NodeId, proto::Node> nodes_;
    std::map<ClusterId, proto::Cluster> clusters_;
    int round_ = 0;
    int step_budget_ = 0;
    std::string trace_;
    Messages deferred_;  // decision-phase crossings, delivered in subround IV
    std::uint64_t emitted_ = 0;
    std::uint64_t delivered_ = 0;
    bool acyclic_every_round_ = true;

    friend SimResult run(const Scenario& sc);
};

// Runs the scenario to termination, the round limit, or irreparability,
// then executes the verification suite on the outcome.
SimResult run(const Scenario& sc);

// True iff exactly one cluster remains.
bool is_terminated(const Simulation& sim);

}  // namespace remst::sim

#endif  // REMST_ENGINE_HPP
