#include "remst/cli.hpp"

#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "remst/rng.hpp"

namespace remst::cli {

using nlohmann::json;

namespace {

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ',')) out.push_back(cur);
    return out;
}

RggSpec parse_rgg(const std::string& s) {
    auto parts = split_commas(s);
    if (parts.size() != 3) throw ConfigError("--rgg expects n,radius,seed");
    RggSpec r;
    try {
        r.n = std::stoi(parts[0]);
        r.radius = std::stod(parts[1]);
        r.seed = std::stoull(parts[2]);
    } catch (const std::exception&) {
        throw ConfigError("--rgg expects n,radius,seed, got '" + s + "'");
    }
    if (r.n < 2) throw ConfigError("--rgg needs n >= 2");
    if (r.radius < 0) throw ConfigError("--rgg needs radius >= 0");
    return r;
}

RandomFaultSpec parse_fail_random(const std::string& s) {
    auto parts = split_commas(s);
    if (parts.size() != 2) throw ConfigError("--fail-random expects m,seed");
    RandomFaultSpec f;
    try {
        f.m = std::stoi(parts[0]);
        f.seed = std::stoull(parts[1]);
    } catch (const std::exception&) {
        throw ConfigError("--fail-random expects m,seed, got '" + s + "'");
    }
    if (f.m < 1) throw ConfigError("--fail-random needs m >= 1");
    return f;
}

std::vector<NodeId> parse_fail_list(const std::string& s) {
    std::vector<NodeId> ids;
    for (const std::string& p : split_commas(s)) {
        try {
            ids.push_back(static_cast<NodeId>(std::stol(p)));
        } catch (const std::exception&) {
            throw ConfigError("--fail expects a comma-separated id list, got '" + s + "'");
        }
    }
    if (ids.empty()) throw ConfigError("--fail list is empty");
    return ids;
}

// Deterministic per-trial graph. Sweeps scan forward from the trial's seed
// until the generated graph is connected; single runs use the seed as given.
CommGraph trial_graph(const RunConfig& cfg, int trial) {
    if (!cfg.graph_file.empty()) {
        CommGraph g = load_graph_file(cfg.graph_file);
        if (!is_connected(g))
            throw ConfigError("graph file describes a disconnected graph");
        return g;
    }
    const RggSpec& r = *cfg.rgg;
    if (!cfg.sweep) {
        CommGraph g = generate_rgg(r.n, r.radius, r.seed, cfg.side);
        if (!is_connected(g))
            throw ConfigError("generated graph is disconnected; raise the radius or change the seed");
        return g;
    }
    std::uint64_t base = r.seed + 1000003ull * static_cast<std::uint64_t>(trial);
    for (int attempt = 0; attempt < 64; ++attempt) {
        CommGraph g = generate_rgg(r.n, r.radius, base + attempt, cfg.side);
        if (is_connected(g)) return g;
    }
    throw ConfigError("no connected graph within 64 seeds of trial " + std::to_string(trial) +
                      "; the radius is too small for n");
}

// Fault set for a trial. Random selection redraws until the reduced graph
// stays connected; when every attempt fails the last draw is kept and the
// trial is flagged irreparable by design.
std::set<NodeId> trial_faults(const RunConfig& cfg, const CommGraph& g, int trial,
                              bool& irreparable_by_design) {
    irreparable_by_design = false;
    if (!cfg.fail_ids.empty()) {
        std::set<NodeId> f(cfg.fail_ids.begin(), cfg.fail_ids.end());
        if (f.size() != cfg.fail_ids.size()) throw ConfigError("--fail ids repeat");
        for (NodeId id : f)
            if (!g.has_node(id)) throw ConfigError("--fail id " + std::to_string(id) +
                                                   " is not in the graph");
        if (f.size() >= g.node_count()) throw ConfigError("fault set leaves no live node");
        return f;
    }
    const RandomFaultSpec& spec = *cfg.fail_random;
    if (static_cast<std::size_t>(spec.m) >= g.node_count())
        throw ConfigError("--fail-random m leaves no live node");
    std::vector<NodeId> ids = g.node_ids();
    Rng rng(spec.seed + static_cast<std::uint64_t>(trial));
    std::set<NodeId> draw;
    for (int attempt = 0; attempt < 64; ++attempt) {
        draw.clear();
        while (draw.size() < static_cast<std::size_t>(spec.m))
            draw.insert(ids[rng.next_below(ids.size())]);
        if (is_connected(remove_nodes(g, draw))) return draw;
    }
    irreparable_by_design = true;
    return draw;
}

TrialOutcome run_trial(const RunConfig& cfg, int trial) {
    CommGraph graph = trial_graph(cfg, trial);
    TrialOutcome out;
    out.trial = trial;
    out.graph_nodes = graph.node_count();
    out.faulty = trial_faults(cfg, graph, trial, out.irreparable_by_design);

    if (!cfg.dump_graph_path.empty() && trial == 0) {
        std::ofstream f(cfg.dump_graph_path);
        if (!f) throw IoError("cannot write " + cfg.dump_graph_path);
        f << dump_graph(graph);
    }

    sim::Scenario sc;
    try {
        sc = sim::make_scenario(std::move(graph), out.faulty);
    } catch (const DisconnectedGraph&) {
        throw ConfigError("graph is disconnected; no initial tree exists");
    }
    sc.max_rounds = cfg.max_rounds;
    sc.parallel_delivery = cfg.parallel;
    sc.trace_level = cfg.trace_path.empty() ? sim::TraceLevel::summary : sim::TraceLevel::full;
    out.result = sim::run(sc);
    return out;
}

int bool_cell(bool b) { return b ? 1 : 0; }

}  // namespace

bool outcome_passes(const sim::SimResult& r) {
    if (!r.verdicts.acyclic || !r.verdicts.message_bound_ok) return false;
    switch (r.status) {
        case sim::SimStatus::reconstructed:
            return r.verdicts.spanning && r.verdicts.mst_equivalent;
        case sim::SimStatus::irreparable:
            return true;  // correctly detected; nothing more to check
        case sim::SimStatus::round_limit:
            return false;
    }
    return false;
}

std::string report_json(const RunConfig& cfg, const TrialOutcome& t) {
    const sim::SimResult& r = t.result;
    json j;
    j["status"] = sim::to_string(r.status);
    j["rounds_used"] = r.rounds_used;
    j["initial_clusters"] = r.k_initial;
    j["live_nodes"] = r.live_nodes;
    j["reduced_edges"] = r.reduced_edges;
    j["irreparable_by_design"] = t.irreparable_by_design;

    json scenario;
    scenario["graph_nodes"] = t.graph_nodes;
    if (!cfg.graph_file.empty()) scenario["graph_file"] = cfg.graph_file;
    if (cfg.rgg) {
        scenario["rgg"] = {{"n", cfg.rgg->n}, {"radius", cfg.rgg->radius},
                           {"seed", cfg.rgg->seed}, {"side", cfg.side}};
    }
    scenario["faulty"] = std::vector<NodeId>(t.faulty.begin(), t.faulty.end());
    scenario["parallel_delivery"] = cfg.parallel;
    j["scenario"] = scenario;

    json verdicts;
    verdicts["acyclic"] = r.verdicts.acyclic;
    verdicts["spanning"] = r.verdicts.spanning;
    verdicts["mst_equivalent"] = r.verdicts.mst_equivalent;
    verdicts["weight_delta"] = r.verdicts.weight_delta;
    verdicts["message_bounds_ok"] = r.verdicts.message_bound_ok;
    verdicts["rounds_observed"] = r.verdicts.rounds_observed;
    verdicts["round_class"] = verify::to_string(verify::check_round_bounds(
        r.rounds_used, r.k_initial));
    verdicts["pass"] = outcome_passes(r);
    j["verdicts"] = verdicts;

    json rounds = json::array();
    for (const sim::RoundReport& rep : r.reports) {
        json jr;
        jr["round"] = rep.round;
        jr["clusters_before"] = rep.clusters_before;
        jr["clusters_after"] = rep.clusters_after;
        jr["delivery_steps"] = rep.delivery_steps;
        json merges = json::array();
        for (const sim::MergeRecord& m : rep.merges)
            merges.push_back({{"winner", m.winner.root}, {"absorbed", m.absorbed.root},
                              {"edge", fmt_edge(m.edge)}});
        jr["merges"] = merges;
        json msgs;
        for (int k = 0; k < proto::kMsgKindCount; ++k)
            msgs[proto::to_string(static_cast<proto::MsgKind>(k))] = rep.messages_by_kind[k];
        jr["messages"] = msgs;
        rounds.push_back(jr);
    }
    j["rounds"] = rounds;

    json totals;
    for (int k = 0; k < proto::kMsgKindCount; ++k)
        totals[proto::to_string(static_cast<proto::MsgKind>(k))] = r.message_totals[k];
    j["message_totals"] = totals;

    return j.dump(2) + "\n";
}

std::string csv_header() {
    return "trial,n,edges,k,rounds,status,msgs_find,msgs_test,msgs_accept,msgs_reject,"
           "msgs_report,msgs_inform,msgs_merge_req,msgs_internal,msgs_merge,msgs_commit,"
           "msgs_ignore,msgs_modify,mst_ok,acyclic_ok,bounds_ok\n";
}

std::string csv_row(const TrialOutcome& t) {
    using proto::MsgKind;
    const sim::SimResult& r = t.result;
    auto count = [&](MsgKind k) { return r.message_totals[static_cast<int>(k)]; };
    std::string s;
    s += std::to_string(t.trial) + ",";
    s += std::to_string(t.graph_nodes) + ",";
    s += std::to_string(r.reduced_edges) + ",";
    s += std::to_string(r.k_initial) + ",";
    s += std::to_string(r.rounds_used) + ",";
    s += std::string(sim::to_string(r.status)) + ",";
    for (MsgKind k : {MsgKind::find, MsgKind::test, MsgKind::accept, MsgKind::reject,
                      MsgKind::report, MsgKind::inform, MsgKind::merge_req, MsgKind::internal,
                      MsgKind::merge, MsgKind::commit, MsgKind::ignore, MsgKind::modify})
        s += std::to_string(count(k)) + ",";
    s += std::to_string(bool_cell(r.verdicts.mst_equivalent)) + ",";
    s += std::to_string(bool_cell(r.verdicts.acyclic)) + ",";
    s += std::to_string(bool_cell(r.verdicts.message_bound_ok)) + "\n";
    return s;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path);
    f << content;
    if (!f) throw IoError("write failed: " + path);
}

}  // namespace

int run_single(const RunConfig& cfg) {
    TrialOutcome t = run_trial(cfg, 0);
    if (!cfg.trace_path.empty()) write_file(cfg.trace_path, t.result.trace);
    if (!cfg.report_path.empty()) write_file(cfg.report_path, report_json(cfg, t));
    if (!cfg.csv_path.empty()) write_file(cfg.csv_path, csv_header() + csv_row(t));
    std::cout << "status=" << sim::to_string(t.result.status)
              << " rounds=" << t.result.rounds_used
              << " clusters=" << t.result.k_initial
              << " pass=" << (outcome_passes(t.result) ? "yes" : "no") << "\n";
    return outcome_passes(t.result) ? kExitOk : kExitVerify;
}

int run_sweep(const RunConfig& cfg) {
    if (cfg.csv_path.empty()) throw ConfigError("sweep mode needs --csv");
    std::vector<TrialOutcome> outcomes(cfg.trials);

    int jobs = std::max(1, cfg.jobs);
    if (jobs == 1) {
        for (int i = 0; i < cfg.trials; ++i) outcomes[i] = run_trial(cfg, i);
    } else {
        std::vector<std::future<void>> futures;
        std::atomic<int> next{0};
        for (int w = 0; w < jobs; ++w) {
            futures.push_back(std::async(std::launch::async, [&] {
                for (int i = next.fetch_add(1); i < cfg.trials; i = next.fetch_add(1))
                    outcomes[i] = run_trial(cfg, i);
            }));
        }
        for (auto& f : futures) f.get();
    }

    std::string csv = csv_header();
    bool all_pass = true;
    for (const TrialOutcome& t : outcomes) {
        csv += csv_row(t);
        all_pass = all_pass && outcome_passes(t.result);
    }
    write_file(cfg.csv_path, csv);
    if (!cfg.report_path.empty()) write_file(cfg.report_path, report_json(cfg, outcomes.back()));
    std::cout << "trials=" << cfg.trials << " pass=" << (all_pass ? "yes" : "no") << "\n";
    return all_pass ? kExitOk : kExitVerify;
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"remst: MST aggregation-tree repair simulator for sensor networks"};
    app.set_config("--config");

    std::string graph_file, rgg_str, fail_str, fail_random_str;
    RunConfig cfg;
    app.add_option("--graph", graph_file, "graph dump file to load");
    app.add_option("--rgg", rgg_str, "random geometric graph: n,radius,seed");
    app.add_option("--side", cfg.side, "side length of the RGG square (default 1.0)");
    app.add_option("--fail", fail_str, "comma-separated faulty node ids");
    app.add_option("--fail-random", fail_random_str, "random fault set: m,seed");
    auto* trials_opt = app.add_option("--trials", cfg.trials, "sweep trial count");
    app.add_option("--trace", cfg.trace_path, "write the full message trace here");
    app.add_option("--report", cfg.report_path, "write the JSON report here");
    app.add_option("--csv", cfg.csv_path, "write per-trial CSV rows here");
    app.add_option("--dump-graph", cfg.dump_graph_path, "write the (first) trial graph dump");
    app.add_option("--max-rounds", cfg.max_rounds, "round limit (default: node count)");
    app.add_flag("--parallel", cfg.parallel, "parallel delivery-step evaluation");
    app.add_option("--jobs", cfg.jobs, "concurrent sweep trials (default 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        cfg.graph_file = graph_file;
        if (!rgg_str.empty()) cfg.rgg = parse_rgg(rgg_str);
        if (!fail_str.empty()) cfg.fail_ids = parse_fail_list(fail_str);
        if (!fail_random_str.empty()) cfg.fail_random = parse_fail_random(fail_random_str);
        cfg.sweep = trials_opt->count() > 0;

        if (cfg.graph_file.empty() == !cfg.rgg)
            throw ConfigError("exactly one of --graph or --rgg is required");
        if (cfg.fail_ids.empty() == !cfg.fail_random)
            throw ConfigError("exactly one of --fail or --fail-random is required");
        if (cfg.trials < 1) throw ConfigError("--trials must be >= 1");
        if (cfg.max_rounds < 0) throw ConfigError("--max-rounds must be >= 1");

        return cfg.sweep ? run_sweep(cfg) : run_single(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const UnknownNode& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    }
}

}  // namespace remst::cli
