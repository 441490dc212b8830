#include "remst/verify.hpp"

#include <cmath>

#include "remst/union_find.hpp"

namespace remst::verify {

std::pair<bool, bool> check_acyclic_spanning(const std::set<EdgeKey>& tree,
                                             const std::vector<NodeId>& live) {
    UnionFind uf(live);
    bool acyclic = true;
    for (const EdgeKey& e : tree)
        if (!uf.unite(e.lo, e.hi)) acyclic = false;
    bool spanning = acyclic && live.size() >= 1 && tree.size() + 1 == live.size() &&
                    uf.component_count() == 1;
    if (live.empty()) spanning = false;
    return {acyclic, spanning};
}

std::pair<bool, double> check_mst(const AggregationTree& tree, const ReducedGraph& reduced) {
    std::set<EdgeKey> oracle = oracle_mst(reduced);
    double oracle_weight = 0.0;
    for (const EdgeKey& e : oracle) oracle_weight += e.weight;
    double delta = tree.total_weight() - oracle_weight;
    return {tree.edges == oracle, delta};
}

bool check_message_bounds(const std::vector<RoundMessageStats>& rounds,
                          std::size_t reduced_edges, std::size_t k_initial) {
    using proto::MsgKind;
    std::uint64_t rejects_total = 0;
    std::map<NodeId, std::uint64_t> rebuffed;
    for (const RoundMessageStats& r : rounds) {
        if (r.cluster_sizes.empty())
            throw MissingTrace("round stats without cluster sizes");
        std::uint64_t total = 0;
        for (std::uint64_t c : r.by_kind) total += c;
        std::uint64_t rejects = r.by_kind[static_cast<int>(MsgKind::reject)];
        std::uint64_t ignores = r.by_kind[static_cast<int>(MsgKind::ignore)];
        // Rejects, the failed tests they answer, and ignores have their own
        // budgets below.
        std::int64_t bounded = static_cast<std::int64_t>(total) -
                               2 * static_cast<std::int64_t>(rejects) -
                               static_cast<std::int64_t>(ignores);
        std::int64_t budget = 0;
        for (std::size_t n_i : r.cluster_sizes) budget += 6 * static_cast<std::int64_t>(n_i);
        if (bounded > budget) return false;
        rejects_total += rejects;
        for (const auto& [cid, n] : r.ignores_received) rebuffed[cid] += n;
    }
    if (rejects_total > 2 * reduced_edges) return false;
    for (const auto& [cid, n] : rebuffed)
        if (k_initial == 0 || n > k_initial - 1) return false;
    return true;
}

const char* to_string(RoundClass c) {
    switch (c) {
        case RoundClass::best_case: return "best_case";
        case RoundClass::log_bounded: return "log_bounded";
        case RoundClass::linear_bounded: return "linear_bounded";
    }
    return "?";
}

RoundClass check_round_bounds(int rounds_used, std::size_t k_initial) {
    if (rounds_used <= 1) return RoundClass::best_case;
    double lg = std::log2(static_cast<double>(k_initial < 1 ? 1 : k_initial));
    if (rounds_used <= static_cast<int>(std::ceil(lg)) + 1) return RoundClass::log_bounded;
    return RoundClass::linear_bounded;
}

}  // namespace remst::verify
