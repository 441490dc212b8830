#ifndef REMST_VERIFY_HPP
#define REMST_VERIFY_HPP

#include <array>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "remst/protocol.hpp"
#include "remst/topology.hpp"
#include "remst/types.hpp"

namespace remst::verify {

// Outcome of the independent checkers run against a finished simulation.
struct Verdicts {
    bool acyclic = true;          // held after every round, union-find checked
    bool spanning = false;
    bool mst_equivalent = false;
    double weight_delta = 0.0;    // tree weight minus oracle weight
    bool message_bound_ok = false;
    int rounds_observed = 0;
};

// Union-find pass over the tree edges. acyclic iff no union joins an
// already-joined pair; spanning iff one component covers all live nodes and
// |edges| == |live| - 1.
std::pair<bool, bool> check_acyclic_spanning(const std::set<EdgeKey>& tree,
                                             const std::vector<NodeId>& live);

// Compares against oracle_mst(reduced): exact edge-set equality (the total
// edge order makes the MST unique) plus the weight difference for
// diagnostics. Throws DisconnectedGraph when the reduced graph has no
// spanning tree.
std::pair<bool, double> check_mst(const AggregationTree& tree, const ReducedGraph& reduced);

// Per-round message accounting fed to check_message_bounds.
struct RoundMessageStats {
    std::array<std::uint64_t, proto::kMsgKindCount> by_kind{};
    std::vector<std::size_t> cluster_sizes;              // n_i at round start
    std::map<NodeId, std::uint64_t> ignores_received;    // by rebuffed cluster id
};

// Checks the per-round and whole-run message budgets:
//   - per round, messages other than rejects, the tests they answer, and
//     ignores total at most 6 * sum(n_i);
//   - reject messages over the whole run total at most 2 * |E'|
//     (each edge is rejected at most once per endpoint);
//   - each cluster has its merge request rebuffed at most k - 1 times
//     over the whole run.
// Tests pair 1:1 with accept/reject answers within a round, so the failed
// test count equals the reject count. Throws MissingTrace on malformed
// stats (a round without cluster sizes).
bool check_message_bounds(const std::vector<RoundMessageStats>& rounds,
                          std::size_t reduced_edges, std::size_t k_initial);

enum class RoundClass { best_case, log_bounded, linear_bounded };

const char* to_string(RoundClass c);

// best_case for runs finishing in at most one round, log_bounded up to
// ceil(lg2 k) + 1 rounds, linear_bounded otherwise. Callers assert
// rounds <= k - 1 separately; that bound is unconditional.
RoundClass check_round_bounds(int rounds_used, std::size_t k_initial);

}  // namespace remst::verify

#endif  // REMST_VERIFY_HPP
