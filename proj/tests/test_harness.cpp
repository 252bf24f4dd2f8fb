#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "decprox/harness.hpp"
#include "test_support.hpp"

using namespace decprox;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("decprox_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string minimal_config(const fs::path& outdir) {
    std::ostringstream cfg;
    cfg << "problem.kind = quadratic\n"
        << "problem.m = 4\n"
        << "problem.d = 6\n"
        << "problem.seed = 3\n"
        << "problem.condition_target = 8\n"
        << "network.topology = complete\n"
        << "algorithm.N = 12\n"
        << "algorithm.T = 1\n"
        << "output.dir = " << outdir.string() << "\n";
    return cfg.str();
}

}  // namespace

TEST_CASE("config parsing: comments, whitespace, unknown keys, duplicates") {
    const ExperimentConfig cfg = ExperimentConfig::parse_text(
        "# a comment\n"
        "problem.m = 5   # trailing comment\n"
        "  problem.d=3\n"
        "\n"
        "network.p_drop = 0.25\n");
    CHECK(cfg.problem.m == 5);
    CHECK(cfg.problem.d == 3);
    CHECK(cfg.network.p_drop == doctest::Approx(0.25));

    CHECK_THROWS_WITH_AS(ExperimentConfig::parse_text("problem.bogus = 1\n"),
                         doctest::Contains("problem.bogus"), ConfigError);
    CHECK_THROWS_WITH_AS(ExperimentConfig::parse_text("problem.m = 2\nproblem.m = 3\n"),
                         doctest::Contains("duplicate"), ConfigError);
    CHECK_THROWS_WITH_AS(ExperimentConfig::parse_text("problem.m = two\n"),
                         doctest::Contains("problem.m"), ConfigError);
    CHECK_THROWS_WITH_AS(ExperimentConfig::parse_text("network.m = 9\n"),
                         doctest::Contains("network.m"), ConfigError);
}

TEST_CASE("validation rejects the unsupported composite pair, naming it") {
    CHECK_THROWS_WITH_AS(ExperimentConfig::parse_text("problem.g = l1\nproblem.q = ball\n"),
                         doctest::Contains("(l1, euclidean-ball)"), ConfigError);
    CHECK_THROWS_WITH_AS(ExperimentConfig::parse_text("algorithm.epsilon = 0\n"),
                         doctest::Contains("algorithm.epsilon"), ConfigError);
    CHECK_THROWS_WITH_AS(ExperimentConfig::parse_text("network.topology = star\n"),
                         doctest::Contains("network.topology"), ConfigError);
}

TEST_CASE("cli_run smoke: exit 0, trace has N+1 data rows, summary echoes derived values") {
    const fs::path dir = fresh_dir("smoke");
    const fs::path cfg_path = dir / "run.cfg";
    {
        std::ofstream out(cfg_path);
        out << minimal_config(dir / "out");
    }
    CHECK(cli_run(cfg_path.string()) == 0);

    const std::string trace = read_file(dir / "out" / "trace.csv");
    const long data_rows = std::count(trace.begin(), trace.end(), '\n') - 1;
    CHECK(data_rows == 13);  // N + 1 with N = 12
    CHECK(trace.rfind("k,gap,dist_sq,cons_err,beta,alpha,A,gamma,comm_rounds\n", 0) == 0);

    const std::string summary = read_file(dir / "out" / "summary.txt");
    for (const char* key : {"config_hash", "derived.chi", "derived.T", "derived.N", "derived.eta",
                            "derived.L_global", "derived.mu_global", "result.final_gap",
                            "result.comm_rounds"}) {
        INFO(key);
        CHECK(summary.find(key) != std::string::npos);
    }
    fs::remove_all(dir);
}

TEST_CASE("cli_run exits 1 on an invalid config naming the pair") {
    const fs::path dir = fresh_dir("invalid");
    const fs::path cfg_path = dir / "bad.cfg";
    {
        std::ofstream out(cfg_path);
        out << "problem.g = l1\nproblem.q = ball\noutput.dir = " << (dir / "out").string() << "\n";
    }
    CHECK(cli_run(cfg_path.string()) == 1);
    CHECK(cli_run((dir / "missing.cfg").string()) == 1);
    fs::remove_all(dir);
}

TEST_CASE("identical configs produce byte-identical traces") {
    const fs::path dir = fresh_dir("determinism");
    const fs::path cfg_a = dir / "a.cfg";
    const fs::path cfg_b = dir / "b.cfg";
    {
        std::ofstream out(cfg_a);
        out << "problem.kind = quadratic\nproblem.m = 6\nproblem.d = 5\nproblem.seed = 11\n"
            << "problem.condition_target = 12\nproblem.g = l1\nproblem.g_weight = 0.02\n"
            << "network.topology = ring-chords\nnetwork.p_drop = 0.3\nnetwork.seed = 4\n"
            << "algorithm.T = theorem\nalgorithm.epsilon = 1e-6\n"
            << "output.dir = " << (dir / "out_a").string() << "\n";
    }
    {
        std::ifstream in(cfg_a);
        std::ostringstream text;
        text << in.rdbuf();
        std::string copy = text.str();
        const std::string from = (dir / "out_a").string();
        copy.replace(copy.find(from), from.size(), (dir / "out_b").string());
        std::ofstream out(cfg_b);
        out << copy;
    }
    REQUIRE(cli_run(cfg_a.string()) == 0);
    REQUIRE(cli_run(cfg_b.string()) == 0);
    CHECK(read_file(dir / "out_a" / "trace.csv") == read_file(dir / "out_b" / "trace.csv"));
    fs::remove_all(dir);
}

TEST_CASE("schedule dump writes one line per consumed round") {
    const fs::path dir = fresh_dir("dump");
    const fs::path cfg_path = dir / "run.cfg";
    {
        std::ofstream out(cfg_path);
        out << "problem.m = 5\nproblem.d = 3\nnetwork.topology = ring\nnetwork.p_drop = 0.2\n"
            << "network.dump_schedule = true\nalgorithm.N = 7\nalgorithm.T = 3\n"
            << "output.dir = " << (dir / "out").string() << "\n";
    }
    REQUIRE(cli_run(cfg_path.string()) == 0);
    const std::string dump = read_file(dir / "out" / "schedule.txt");
    CHECK(std::count(dump.begin(), dump.end(), '\n') == 21);  // N * T rounds
    fs::remove_all(dir);
}

TEST_CASE("epsilon sweep: iterations to target grow affinely in log(1/eps)") {
    ExperimentConfig base = ExperimentConfig::parse_text(
        "problem.m = 6\nproblem.d = 5\nproblem.seed = 21\nproblem.condition_target = 10\n"
        "network.topology = ring\nalgorithm.T = theorem\n");
    const std::vector<std::string> values = {"1e-2", "1e-4", "1e-6"};
    const std::vector<SweepRow> rows = run_sweep(base, "epsilon", values);
    REQUIRE(rows.size() == 3);
    std::vector<double> logs, ns;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        REQUIRE(!rows[i].failed);
        REQUIRE(rows[i].n_to_eps > 0);
        logs.push_back(std::log(1.0 / std::stod(values[i])));
        ns.push_back(static_cast<double>(rows[i].n_to_eps));
    }
    CHECK(ns[0] < ns[1]);
    CHECK(ns[1] < ns[2]);
    // affine fit: both log-steps are equal, so the two increments should match
    const double inc1 = ns[1] - ns[0];
    const double inc2 = ns[2] - ns[1];
    CHECK(inc2 == doctest::Approx(inc1).epsilon(0.5));
    CHECK(test_support::fit_slope(logs, ns) > 0.0);
}

TEST_CASE("condition sweep: iteration growth tracks the square root of the condition number") {
    ExperimentConfig base = ExperimentConfig::parse_text(
        "problem.m = 6\nproblem.d = 8\nproblem.seed = 31\n"
        "network.topology = ring\nalgorithm.T = theorem\nalgorithm.epsilon = 1e-8\n");
    const std::vector<SweepRow> rows = run_sweep(base, "condition_target", {"4", "16", "64"});
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
        REQUIRE(!row.failed);
        REQUIRE(row.n_to_eps > 0);
    }
    const double r1 = static_cast<double>(rows[1].n_to_eps) / rows[0].n_to_eps;
    const double r2 = static_cast<double>(rows[2].n_to_eps) / rows[1].n_to_eps;
    CHECK(r1 >= 1.5);
    CHECK(r1 <= 3.0);
    CHECK(r2 >= 1.5);
    CHECK(r2 <= 3.0);
}

TEST_CASE("T sweep: a single gossip round per iteration stalls above the target") {
    ExperimentConfig base = ExperimentConfig::parse_text(
        "problem.m = 20\nproblem.d = 6\nproblem.seed = 41\nproblem.condition_target = 16\n"
        "problem.g = l1\nproblem.g_weight = 0.01\n"
        "network.topology = ring\nalgorithm.epsilon = 1e-6\n");
    const std::vector<SweepRow> rows = run_sweep(base, "T", {"1", "theorem"});
    REQUIRE(rows.size() == 2);
    // T = 1 on a poorly connected ring: the target is never certified reached
    CHECK(rows[0].n_to_eps == -1);
    // the theorem's depth reaches it
    REQUIRE(!rows[1].failed);
    CHECK(rows[1].n_to_eps > 0);
}

TEST_CASE("sweep csv has the documented shape and survives failed sub-runs") {
    const fs::path dir = fresh_dir("sweep");
    const fs::path cfg_path = dir / "base.cfg";
    {
        std::ofstream out(cfg_path);
        out << "problem.m = 4\nproblem.d = 4\nnetwork.topology = ring\n"
            << "algorithm.epsilon = 1e-4\nalgorithm.T = theorem\n"
            << "output.dir = " << (dir / "out").string() << "\n";
    }
    // "star" is not a topology: that sub-run fails, the sweep continues
    const int code = cli_sweep(cfg_path.string(), "chi_via_topology", {"complete", "star", "ring"});
    CHECK(code == 2);
    const std::string csv = read_file(dir / "out" / "sweep.csv");
    CHECK(csv.rfind("value,N_to_eps,comm_rounds,final_gap\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    CHECK(csv.find("star,-1,0,nan") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("check suites pass and unknown suites are rejected") {
    CHECK(run_check_suite("lemma3").pass);
    CHECK(run_check_suite("prox").pass);
    CHECK_THROWS_AS(run_check_suite("bogus"), ConfigError);
}

TEST_CASE("reference = none requires explicit bounds for the theorem rule") {
    CHECK_THROWS_WITH_AS(
        [] {
            const ExperimentConfig cfg = ExperimentConfig::parse_text(
                "problem.m = 3\nproblem.d = 3\nalgorithm.reference = none\nalgorithm.N = 5\n"
                "algorithm.T = theorem\n");
            (void)resolve_experiment(cfg);
        }(),
        doctest::Contains("grad_norm_at_opt_bound"), ConfigError);

    // with both bounds supplied the resolution goes through
    const ExperimentConfig cfg = ExperimentConfig::parse_text(
        "problem.m = 3\nproblem.d = 3\nalgorithm.reference = none\nalgorithm.N = 5\n"
        "algorithm.T = theorem\nalgorithm.grad_norm_at_opt_bound = 10\nalgorithm.r0_bound = 4\n");
    const ResolvedExperiment exp = resolve_experiment(cfg);
    CHECK(exp.rounds_per_iteration >= 1);
}
