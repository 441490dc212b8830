#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "remst/cli.hpp"
#include "test_support.hpp"

using namespace remst;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/remst_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

int run_args(std::vector<std::string> args) {
    std::vector<const char*> argv{"remst"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    return cli::run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("single run writes a parseable report and passes") {
    TempFile report("report.json");
    TempFile trace("trace.tsv");
    int rc = run_args({"--rgg", "40,0.35,12", "--fail", "7", "--report", report.path,
                       "--trace", trace.path});
    CHECK(rc == cli::kExitOk);
    std::string body = slurp(report.path);
    CHECK(body.find("\"status\": \"reconstructed\"") != std::string::npos);
    CHECK(body.find("\"mst_equivalent\": true") != std::string::npos);
    CHECK(body.find("\"pass\": true") != std::string::npos);
    // Trace lines are tab-separated with six fields.
    std::istringstream t(slurp(trace.path));
    std::string line;
    REQUIRE(std::getline(t, line));
    int tabs = 0;
    for (char c : line)
        if (c == '\t') ++tabs;
    CHECK(tabs == 5);
}

TEST_CASE("unknown fault ids exit with the config code") {
    CHECK(run_args({"--rgg", "20,0.4,1", "--fail", "99"}) == cli::kExitConfig);
}

TEST_CASE("bad flag combinations exit with the config code") {
    CHECK(run_args({"--fail", "1"}) == cli::kExitConfig);                      // no graph
    CHECK(run_args({"--rgg", "20,0.4,1"}) == cli::kExitConfig);                // no faults
    CHECK(run_args({"--rgg", "20,0.4", "--fail", "1"}) == cli::kExitConfig);   // bad rgg
    CHECK(run_args({"--graph", "/nonexistent", "--rgg", "20,0.4,1", "--fail", "1"}) ==
          cli::kExitConfig);                                                   // both sources
}

TEST_CASE("missing graph file exits with the io code") {
    CHECK(run_args({"--graph", "/nonexistent.graph", "--fail", "1"}) == cli::kExitIo);
}

TEST_CASE("disconnected scenarios report irreparable but still exit zero") {
    TempFile report("irrep.json");
    // Radius too small for the fault to be survivable: craft via graph file.
    TempFile graph("bridge.graph");
    {
        CommGraph g;
        for (NodeId i = 0; i < 5; ++i) g.add_node(i, {double(i), 0.0});
        g.add_edge(0, 1, 1.0);
        g.add_edge(1, 2, 1.0);
        g.add_edge(2, 3, 1.0);
        g.add_edge(3, 4, 1.0);
        std::ofstream f(graph.path);
        f << dump_graph(g);
    }
    int rc = run_args({"--graph", graph.path, "--fail", "2", "--report", report.path});
    CHECK(rc == cli::kExitOk);
    CHECK(slurp(report.path).find("\"status\": \"irreparable\"") != std::string::npos);
}

TEST_CASE("sweep: csv has the fixed header and one row per trial") {
    TempFile csv("sweep.csv");
    int rc = run_args({"--rgg", "30,0.4,77", "--fail-random", "1,5", "--trials", "6",
                       "--csv", csv.path});
    CHECK(rc == cli::kExitOk);
    std::istringstream in(slurp(csv.path));
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line ==
          "trial,n,edges,k,rounds,status,msgs_find,msgs_test,msgs_accept,msgs_reject,"
          "msgs_report,msgs_inform,msgs_merge_req,msgs_internal,msgs_merge,msgs_commit,"
          "msgs_ignore,msgs_modify,mst_ok,acyclic_ok,bounds_ok");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(line.rfind(std::to_string(rows - 1) + ",", 0) == 0);  // ordered by trial
    }
    CHECK(rows == 6);
}

TEST_CASE("sweep reruns are byte-identical, also with parallel jobs") {
    TempFile a("sweep_a.csv"), b("sweep_b.csv"), c("sweep_c.csv");
    std::vector<std::string> base{"--rgg", "30,0.4,5", "--fail-random", "1,9",
                                  "--trials", "8"};
    auto with = [&](const std::string& path, std::vector<std::string> extra) {
        std::vector<std::string> args = base;
        args.push_back("--csv");
        args.push_back(path);
        for (auto& e : extra) args.push_back(e);
        return run_args(args);
    };
    CHECK(with(a.path, {}) == cli::kExitOk);
    CHECK(with(b.path, {}) == cli::kExitOk);
    CHECK(with(c.path, {"--jobs", "4"}) == cli::kExitOk);
    CHECK(slurp(a.path) == slurp(b.path));
    CHECK(slurp(a.path) == slurp(c.path));
}

TEST_CASE("graph dump option round-trips through the loader") {
    TempFile dump("dump.graph");
    TempFile report("dump_report.json");
    int rc = run_args({"--rgg", "25,0.4,3", "--fail", "0", "--dump-graph", dump.path,
                       "--report", report.path});
    CHECK(rc == cli::kExitOk);
    CommGraph g = load_graph_file(dump.path);
    CHECK(g.node_count() == 25);
    CHECK(g == generate_rgg(25, 0.4, 3));
}
