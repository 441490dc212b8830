#ifndef REMST_CLI_HPP
#define REMST_CLI_HPP

#include <optional>
#include <string>
#include <vector>

#include "remst/engine.hpp"
#include "remst/types.hpp"

namespace remst::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerify = 2;   // a verification verdict failed
inline constexpr int kExitConfig = 3;   // bad flags, graph, or fault set
inline constexpr int kExitIo = 4;       // unreadable input / unwritable output

struct RggSpec {
    int n = 0;
    double radius = 0.0;
    std::uint64_t seed = 0;
};

struct RandomFaultSpec {
    int m = 0;
    std::uint64_t seed = 0;
};

struct RunConfig {
    bool sweep = false;  // set when --trials is given
    std::string graph_file;
    std::optional<RggSpec> rgg;
    double side = 1.0;
    std::vector<NodeId> fail_ids;
    std::optional<RandomFaultSpec> fail_random;
    int trials = 1;
    std::string trace_path;
    std::string report_path;
    std::string csv_path;
    std::string dump_graph_path;
    int max_rounds = 0;
    bool parallel = false;
    int jobs = 1;
};

// Everything a single trial produced, ready for serialization.
struct TrialOutcome {
    int trial = 0;
    sim::SimResult result;
    std::size_t graph_nodes = 0;
    std::set<NodeId> faulty;
    bool irreparable_by_design = false;  // random fault search gave up
};

// True when the run counts as a success: every checker passed, or the
// scenario was detected as irreparable (acyclicity and bounds still hold).
bool outcome_passes(const sim::SimResult& r);

std::string report_json(const RunConfig& cfg, const TrialOutcome& t);
std::string csv_header();
std::string csv_row(const TrialOutcome& t);

int run_single(const RunConfig& cfg);
int run_sweep(const RunConfig& cfg);

// Parses argv and dispatches; returns the process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace remst::cli

#endif  // REMST_CLI_HPP
