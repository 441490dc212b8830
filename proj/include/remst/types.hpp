#ifndef REMST_TYPES_HPP
#define REMST_TYPES_HPP

#include <charconv>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace remst {

// Node identifier. Unique within a scenario, totally ordered; all protocol
// tie-breaks reduce to this order.
using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

// Cluster identity is the id of the cluster's current root node.
struct ClusterId {
    NodeId root = kNoNode;

    friend auto operator<=>(const ClusterId&, const ClusterId&) = default;
};

// Canonical key for an undirected weighted edge. lo < hi always holds, and
// (weight, lo, hi) is a strict total order even when weights collide, which
// makes every min-edge choice in the system deterministic.
struct EdgeKey {
    double weight = 0.0;
    NodeId lo = kNoNode;
    NodeId hi = kNoNode;

    friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;

    // Endpoint opposite to `me`; edge must be incident to `me`.
    NodeId other(NodeId me) const { return me == lo ? hi : lo; }
    bool touches(NodeId v) const { return v == lo || v == hi; }
};

inline EdgeKey make_edge(NodeId a, NodeId b, double weight) {
    if (a == b) throw std::invalid_argument("self-loop edge");
    return a < b ? EdgeKey{weight, a, b} : EdgeKey{weight, b, a};
}

enum class Ordering { less, equal, greater };

inline Ordering edge_order(const EdgeKey& a, const EdgeKey& b) {
    if (a == b) return Ordering::equal;
    return a < b ? Ordering::less : Ordering::greater;
}

// ---------------------------------------------------------------------------
// Error types. Each maps to a distinct failure mode surfaced by the CLI.

struct DisconnectedGraph : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownNode : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ProtocolViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RoundDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MissingTrace : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Text helpers. All floating-point output goes through fmt_double so that
// every artifact (dump, trace, CSV, report) is byte-stable and round-trips.

inline std::string fmt_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("fmt_double failed");
    return std::string(buf, ptr);
}

inline std::string fmt_edge(const EdgeKey& e) {
    return std::to_string(e.lo) + "-" + std::to_string(e.hi) + ":" + fmt_double(e.weight);
}

}  // namespace remst

#endif  // REMST_TYPES_HPP
