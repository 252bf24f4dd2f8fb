#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "decprox/checks.hpp"
#include "decprox/config.hpp"
#include "decprox/network.hpp"
#include "decprox/objectives.hpp"
#include "decprox/solver.hpp"

namespace decprox {

/// Everything derived from one config: the problem, the certified network
/// and the resolved iteration/consensus budgets.
struct ResolvedExperiment {
    ExperimentConfig config;
    std::unique_ptr<ObjectiveEnsemble> ensemble;
    CompositeTerm term = CompositeTerm::zero();
    std::optional<ReferenceSolution> reference;
    NetworkConfig net;
    ChiCertificate certificate;
    int iterations = 0;
    int rounds_per_iteration = 0;
    double eta = 0.0;
    double r0_sq = 0.0;
    double grad_norm_sq_at_opt = 0.0;
    Eigen::VectorXd x0;
};

ResolvedExperiment resolve_experiment(const ExperimentConfig& config);

struct RunArtifacts {
    RunReport report;
    std::string summary;
    std::string trace_csv;
    std::string schedule_dump;  // empty unless requested
};

/// Executes one resolved experiment in memory (no file I/O).
RunArtifacts execute_experiment(const ResolvedExperiment& experiment);

/// run <config>: writes trace.csv and summary.txt into the output
/// directory. Exit 0 on success, 1 on invalid config, 2 on divergence,
/// 3 on I/O failure.
int cli_run(const std::string& config_path);

struct SweepRow {
    std::string value;
    int n_to_eps = -1;  // first iteration with dist_sq <= epsilon, -1 if never
    std::int64_t comm_rounds = 0;
    double final_gap = 0.0;
    bool failed = false;
};

/// sweep <config> --key k --values v1,v2,...: one run per value, results
/// aggregated into sweep.csv in the value order given. Failed sub-runs are
/// recorded and the sweep continues.
int cli_sweep(const std::string& config_path, const std::string& key, const std::vector<std::string>& values);
std::vector<SweepRow> run_sweep(const ExperimentConfig& base, const std::string& key,
                                const std::vector<std::string>& values);

/// check <suite>, suite in {lemma1, lemma3, consensus, prox, all}: runs the
/// named certification suite with fixed seeds and prints one
/// "name,index,margin,pass" line per check. Exit 0 iff everything passes.
int cli_check(const std::string& suite);
CheckReport run_check_suite(const std::string& suite);

/// FNV-1a of the canonical config text; echoed in the summary.
std::uint64_t config_hash(const ExperimentConfig& config);

std::string render_summary(const ResolvedExperiment& experiment, const RunReport& report);

}  // namespace decprox
