// Acceptance suite: runs every promised property at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code = failure count.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "decprox/checks.hpp"
#include "decprox/harness.hpp"
#include "decprox/network.hpp"
#include "decprox/objectives.hpp"
#include "decprox/solver.hpp"
#include "decprox/theory.hpp"
#include "test_support.hpp"

using namespace decprox;
namespace fs = std::filesystem;

namespace {

int failures = 0;

double seconds_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void report(int criterion, const char* title, bool pass, const std::string& detail) {
    if (!pass) ++failures;
    std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, title, detail.c_str());
    std::fflush(stdout);
}

struct SavedRun {
    std::string tag;
    RunReport report;
};

std::vector<SavedRun> saved_runs;

struct RateResult {
    double rate = 0.0;
    int n_to_target = -1;
    bool reached = false;
};

// least-squares geometric contraction of dist_sq per iteration, fitted on
// the stretch where the squared distance lies in [1e-7, 1e-3]
RateResult fitted_rate(const RunReport& run_report, double target) {
    RateResult result;
    std::vector<double> ks, logs;
    for (const auto& row : run_report.rows) {
        if (std::isfinite(row.dist_sq) && row.dist_sq > 0.0 && row.dist_sq <= 1e-3 &&
            row.dist_sq >= 1e-7) {
            ks.push_back(static_cast<double>(row.k));
            logs.push_back(std::log(row.dist_sq));
        }
        if (!result.reached && std::isfinite(row.dist_sq) && row.dist_sq <= target) {
            result.reached = true;
            result.n_to_target = row.k;
        }
    }
    if (ks.size() >= 5) {
        result.rate = std::exp(test_support::fit_slope(ks, logs));
    }
    return result;
}

void criterion_1() {
    const auto start = std::chrono::steady_clock::now();
    GeneratedProblem problem = generate_quadratic_ensemble(2024, 10, 20, 10.0);
    NetworkConfig net{.m = 10, .topology = Topology::complete, .p_drop = 0.0, .lazy = false, .seed = 1};
    const ChiCertificate cert = certify_chi(net, 1);
    MixingSchedule schedule(net);
    SolverOptions options;
    options.iterations = 200;
    options.chi = cert.chi;
    const ReferenceSolution ref = reference_minimizer(problem.ensemble, CompositeTerm::zero());
    options.reference = &ref;
    const RunReport run_report =
        run(problem.ensemble, CompositeTerm::zero(), schedule, 1, Eigen::VectorXd::Zero(20), options);

    double max_beta = 0.0;
    for (const auto& row : run_report.rows) max_beta = std::max(max_beta, row.beta);
    const double elapsed = seconds_since(start);
    saved_runs.push_back({"complete-graph", run_report});

    char detail[128];
    std::snprintf(detail, sizeof detail, "max beta = %.2e <= 1e-10 over N = 200, %.2fs < 1s", max_beta,
                  elapsed);
    report(1, "exact-averaging degeneration", max_beta <= 1e-10 && elapsed < 1.0, detail);
}

void criterion_2() {
    const auto start = std::chrono::steady_clock::now();
    const CheckReport check = check_model_sandwich(12, 900, 0xacce);  // 10800 draws, 12 ensembles
    const double elapsed = seconds_since(start);
    double min_margin = std::numeric_limits<double>::infinity();
    for (const auto& line : check.lines) min_margin = std::min(min_margin, line.margin);
    char detail[128];
    std::snprintf(detail, sizeof detail, "10800 draws x 12 ensembles, worst slack = %.2e >= -1e-8, %.2fs < 10s",
                  min_margin, elapsed);
    report(2, "inexact-model sandwich", check.pass && elapsed < 10.0, detail);
}

void criterion_3() {
    const auto start = std::chrono::steady_clock::now();
    const CheckReport check = check_coefficient_suite();
    const double elapsed = seconds_since(start);
    double min_margin = std::numeric_limits<double>::infinity();
    for (const auto& line : check.lines) min_margin = std::min(min_margin, line.margin);
    char detail[128];
    std::snprintf(detail, sizeof detail,
                  "4 constant pairs, prefixes to 2000, tightest margin = %.2e, %.2fs < 1s", min_margin,
                  elapsed);
    report(3, "coefficient growth and ratio bounds", check.pass && elapsed < 1.0, detail);
}

void criterion_4() {
    bool ok = true;
    double worst = std::numeric_limits<double>::infinity();
    std::string worst_tag = "-";
    long checked = 0;
    for (const auto& saved : saved_runs) {
        const RunReport& rr = saved.report;
        const double lambda = std::pow(1.0 - 1.0 / rr.chi, rr.rounds_per_iteration);
        for (int k = 0; k + 1 <= rr.n_comp; ++k) {
            const auto& row = rr.rows[static_cast<std::size_t>(k)];
            const auto& next = rr.rows[static_cast<std::size_t>(k) + 1];
            const double bound = (1.0 + lambda) * row.beta + lambda * row.gamma * row.grad_norm_next + 1e-8;
            const double margin = bound - next.beta;
            if (margin < worst) {
                worst = margin;
                worst_tag = saved.tag;
            }
            ok = ok && margin >= 0.0;
            ++checked;
        }
    }
    char detail[160];
    std::snprintf(detail, sizeof detail, "%ld iterations over %zu runs, worst margin = %.2e (%s)", checked,
                  saved_runs.size(), worst, worst_tag.c_str());
    report(4, "trajectory-deviation recurrence", ok && checked > 0, detail);
}

void criterion_5() {
    const auto start = std::chrono::steady_clock::now();
    const CheckReport check = check_consensus_contraction(20, 100, 50, 0xc0de);
    const double elapsed = seconds_since(start);
    char detail[128];
    std::snprintf(detail, sizeof detail, "100 vectors, rounds 1..50, worst margin = %.2e, %.2fs",
                  check.lines[0].margin, elapsed);
    report(5, "gossip contraction at the certified base", check.pass, detail);
}

void criterion_6() {
    const auto start = std::chrono::steady_clock::now();
    const double conditions[] = {4.0, 16.0, 64.0};
    std::vector<int> iterations_needed;
    bool rates_ok = true;
    std::ostringstream detail;
    for (const double kappa : conditions) {
        GeneratedProblem problem = generate_quadratic_ensemble(606, 10, 20, kappa);
        const CompositeTerm term = CompositeTerm::l1(0.01);
        const ReferenceSolution ref = reference_minimizer(problem.ensemble, term);
        const EnsembleConstants c = problem.ensemble.constants();

        NetworkConfig net{.m = 10, .topology = Topology::ring, .p_drop = 0.0, .lazy = false, .seed = 6};
        const ChiCertificate cert = certify_chi(net, 1);
        const double epsilon = 1e-8;
        const int budget = default_iteration_budget(c, epsilon);
        const double r0_sq = 10.0 * ref.x.squaredNorm();
        const int t = select_T(cert.chi, budget, epsilon, c, r0_sq, ref.grad_norm_sq);

        MixingSchedule schedule(net);
        schedule.set_contraction_bound(cert.rho_max);
        SolverOptions options;
        options.iterations = budget;
        options.epsilon_target = epsilon;
        options.reference = &ref;
        options.chi = cert.chi;
        const RunReport rr = run(problem.ensemble, term, schedule, t, Eigen::VectorXd::Zero(20), options);
        saved_runs.push_back({"rate-kappa" + std::to_string(static_cast<int>(kappa)), rr});

        const RateResult rate = fitted_rate(rr, epsilon);
        const double envelope = std::pow(1.0 + 0.25 * std::sqrt(c.mu_global / c.L_global), -2.0);
        rates_ok = rates_ok && rate.reached && rate.rate > 0.0 && rate.rate <= envelope + 0.01;
        iterations_needed.push_back(rate.n_to_target);
        char part[96];
        std::snprintf(part, sizeof part, "kappa %g: rate %.4f <= %.4f, N %d; ", kappa, rate.rate,
                      envelope + 0.01, rate.n_to_target);
        detail << part;
    }
    bool ratios_ok = true;
    for (std::size_t i = 1; i < iterations_needed.size(); ++i) {
        const double ratio = static_cast<double>(iterations_needed[i]) / iterations_needed[i - 1];
        ratios_ok = ratios_ok && ratio >= 1.5 && ratio <= 3.0;
        char part[48];
        std::snprintf(part, sizeof part, "ratio %.2f; ", ratio);
        detail << part;
    }
    const double elapsed = seconds_since(start);
    char tail[32];
    std::snprintf(tail, sizeof tail, "%.1fs < 30s", elapsed);
    detail << tail;
    report(6, "rate envelope and sqrt-condition scaling", rates_ok && ratios_ok && elapsed < 30.0,
           detail.str());
}

void criterion_7() {
    GeneratedProblem problem = generate_quadratic_ensemble(707, 10, 5, 16.0);
    const CompositeTerm term = CompositeTerm::l1(0.01);
    const ReferenceSolution ref = reference_minimizer(problem.ensemble, term);
    const EnsembleConstants c = problem.ensemble.constants();

    NetworkConfig net{.m = 10, .topology = Topology::ring, .p_drop = 0.0, .lazy = false, .seed = 7};
    const ChiCertificate cert = certify_chi(net, 1);
    const double epsilon = 1e-6;
    const int budget = default_iteration_budget(c, epsilon);
    const double r0_sq = 10.0 * ref.x.squaredNorm();
    const int t = select_T(cert.chi, budget, epsilon, c, r0_sq, ref.grad_norm_sq);

    MixingSchedule schedule(net);
    schedule.set_contraction_bound(cert.rho_max);
    SolverOptions options;
    options.iterations = budget;  // the full budget; no early exit
    options.reference = &ref;
    options.chi = cert.chi;
    const RunReport rr = run(problem.ensemble, term, schedule, t, Eigen::VectorXd::Zero(5), options);
    saved_runs.push_back({"delta-control", rr});

    const double dt = delta_total(rr, model_eta(c));
    char detail[128];
    std::snprintf(detail, sizeof detail, "T = %d, N = %d, delta_total = %.3e <= eps/2 = %.1e", t, budget, dt,
                  epsilon / 2.0);
    report(7, "inexactness kept below eps/2 by the depth rule", dt <= epsilon / 2.0, detail);
}

void criterion_8() {
    const fs::path dir = fs::temp_directory_path() / "decprox_acceptance";
    fs::create_directories(dir);
    bool all_ok = true;
    std::ostringstream detail;

    struct Family {
        const char* tag;
        ObjectiveEnsemble ensemble;
        CompositeTerm term;
    };
    std::vector<Family> families;
    {
        GeneratedProblem p = generate_quadratic_ensemble(808, 10, 8, 16.0);
        families.push_back({"quadratic+l1", std::move(p.ensemble), CompositeTerm::l1(0.02)});
    }
    {
        GeneratedProblem p = generate_quadratic_ensemble(809, 10, 8, 16.0);
        families.push_back({"quadratic+box", std::move(p.ensemble), CompositeTerm::box(-0.6, 0.6)});
    }
    {
        const std::string data = (dir / "toy.libsvm").string();
        test_support::write_toy_libsvm(data, 200, 5, 810);
        families.push_back({"logistic+zero", load_libsvm_ensemble(data, 10, 0.1), CompositeTerm::zero()});
    }

    for (auto& family : families) {
        const ReferenceSolution ref = reference_minimizer(family.ensemble, family.term);
        const EnsembleConstants c = family.ensemble.constants();
        NetworkConfig net{.m = 10, .topology = Topology::ring, .p_drop = 0.0, .lazy = false, .seed = 8};
        const ChiCertificate cert = certify_chi(net, 1);
        const double epsilon = 1e-9;
        const int budget = default_iteration_budget(c, epsilon);
        const double r0_sq = 10.0 * ref.x.squaredNorm();
        const int t = select_T(cert.chi, budget, epsilon, c, r0_sq, ref.grad_norm_sq);

        MixingSchedule schedule(net);
        schedule.set_contraction_bound(cert.rho_max);
        SolverOptions options;
        options.iterations = budget;
        options.epsilon_target = epsilon;
        options.reference = &ref;
        options.chi = cert.chi;
        const RunReport rr =
            run(family.ensemble, family.term, schedule, t, Eigen::VectorXd::Zero(family.ensemble.dim()),
                options);
        saved_runs.push_back({family.tag, rr});

        const double final_dist = rr.rows.back().dist_sq;
        all_ok = all_ok && ref.converged && final_dist <= 1e-8;
        char part[96];
        std::snprintf(part, sizeof part, "%s: dist_sq %.2e; ", family.tag, final_dist);
        detail << part;
    }
    report(8, "agreement with centralized references", all_ok, detail.str() + "all <= 1e-8");
}

void criterion_9() {
    const CheckReport check = check_prox_oracle(1000, 0x970c);
    double min_margin = std::numeric_limits<double>::infinity();
    for (const auto& line : check.lines) min_margin = std::min(min_margin, line.margin);
    char detail[128];
    std::snprintf(detail, sizeof detail,
                  "6 pairs x 1000 points vs 1-d search oracle, worst margin = %.2e", min_margin);
    report(9, "closed-form prox operators", check.pass, detail);
}

void criterion_10() {
    const fs::path dir = fs::temp_directory_path() / "decprox_acceptance" / "determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    bool ok = true;
    std::string detail = "trace.csv byte-identical across repeated runs";
    for (int variant = 0; variant < 2 && ok; ++variant) {
        std::string first, second;
        for (int attempt = 0; attempt < 2; ++attempt) {
            const fs::path out = dir / ("v" + std::to_string(variant) + "_" + std::to_string(attempt));
            const fs::path cfg_path = dir / "run.cfg";
            std::ofstream cfg(cfg_path);
            cfg << "problem.kind = quadratic\nproblem.m = 8\nproblem.d = 6\nproblem.seed = 5\n"
                << "problem.condition_target = 12\nproblem.g = l1\nproblem.g_weight = 0.05\n"
                << "problem.q = box\nproblem.box_lo = -1\nproblem.box_hi = 1\n"
                << "network.topology = ring-chords\nnetwork.p_drop = " << (variant == 0 ? "0.3" : "0")
                << "\nnetwork.seed = 12\nalgorithm.T = theorem\nalgorithm.epsilon = 1e-7\n"
                << "output.dir = " << out.string() << "\n";
            cfg.close();
            if (cli_run(cfg_path.string()) != 0) {
                ok = false;
                detail = "run failed";
                break;
            }
            std::ifstream in(out / "trace.csv", std::ios::binary);
            std::ostringstream buffer;
            buffer << in.rdbuf();
            (attempt == 0 ? first : second) = buffer.str();
        }
        ok = ok && !first.empty() && first == second;
    }
    report(10, "byte-deterministic traces", ok, detail);
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_4();  // consumes every decentralized run recorded above
    criterion_9();
    criterion_10();
    std::printf("%d of 10 criteria passed\n", 10 - failures);
    return failures;
}
