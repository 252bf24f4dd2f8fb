#include "decprox/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "decprox/parallel.hpp"
#include "decprox/theory.hpp"

namespace decprox {

namespace {

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

int certify_budget(const ExperimentConfig& config, int fallback) {
    return config.network.certify_rounds > 0 ? config.network.certify_rounds : fallback;
}

}  // namespace

std::uint64_t config_hash(const ExperimentConfig& config) {
    const std::string text = config.canonical_text();
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (const char ch : text) {
        hash ^= static_cast<unsigned char>(ch);
        hash *= 0x100000001b3ull;
    }
    return hash;
}

ResolvedExperiment resolve_experiment(const ExperimentConfig& config) {
    config.validate();
    ResolvedExperiment exp;
    exp.config = config;
    exp.term = config.composite_term();

    if (config.problem.kind == "quadratic") {
        GeneratedProblem generated = generate_quadratic_ensemble(
            config.problem.seed, config.problem.m, config.problem.d, config.problem.condition_target);
        exp.ensemble = std::make_unique<ObjectiveEnsemble>(std::move(generated.ensemble));
    } else {
        exp.ensemble = std::make_unique<ObjectiveEnsemble>(
            load_libsvm_ensemble(config.problem.dataset, config.problem.m, config.problem.ridge));
    }
    const EnsembleConstants& constants = exp.ensemble->constants();
    exp.eta = model_eta(constants);
    exp.x0 = config.initial_point(exp.ensemble->dim());
    exp.net = config.network_config(config.problem.m);

    if (config.algorithm.reference == "auto") {
        exp.reference = reference_minimizer(*exp.ensemble, exp.term);
        if (!exp.reference->converged) {
            throw ConfigError("algorithm.reference: centralized reference failed to converge; "
                              "set algorithm.reference = none and supply bounds");
        }
        exp.r0_sq = static_cast<double>(exp.ensemble->size()) * (exp.x0 - exp.reference->x).squaredNorm();
        exp.grad_norm_sq_at_opt = exp.reference->grad_norm_sq;
    } else {
        if (config.algorithm.T == "theorem") {
            if (!config.algorithm.grad_norm_at_opt_bound) {
                throw ConfigError("algorithm.grad_norm_at_opt_bound: required when reference = none "
                                  "and T = theorem");
            }
            if (!config.algorithm.r0_bound) {
                throw ConfigError("algorithm.r0_bound: required when reference = none and T = theorem");
            }
        }
        exp.r0_sq = config.algorithm.r0_bound.value_or(0.0);
        exp.grad_norm_sq_at_opt = config.algorithm.grad_norm_at_opt_bound.value_or(0.0);
    }

    exp.iterations = config.algorithm.N > 0
                         ? config.algorithm.N
                         : default_iteration_budget(constants, config.algorithm.epsilon);

    if (config.algorithm.T != "theorem") {
        exp.rounds_per_iteration = static_cast<int>(std::stoll(config.algorithm.T));
        const int samples = certify_budget(
            config, std::max(64, exp.iterations * std::max(1, exp.rounds_per_iteration)));
        exp.certificate = certify_chi(exp.net, samples);
    } else {
        // rho_max over a longer horizon can only grow, so iterate the
        // certificate until it covers the rounds the run will consume
        int samples = certify_budget(config, std::max(64, 2 * config.problem.m));
        for (int pass = 0; pass < 6; ++pass) {
            exp.certificate = certify_chi(exp.net, samples);
            exp.rounds_per_iteration =
                select_T(exp.certificate.chi, exp.iterations, config.algorithm.epsilon, constants, exp.r0_sq,
                         exp.grad_norm_sq_at_opt);
            const int needed = exp.iterations * exp.rounds_per_iteration;
            if (exp.net.p_drop == 0.0 || needed <= samples) break;
            samples = needed;
        }
    }
    return exp;
}

RunArtifacts execute_experiment(const ResolvedExperiment& exp) {
    if (exp.config.algorithm.threads == 1) {
        par::set_enabled(false);
    } else if (exp.config.algorithm.threads > 1) {
        par::set_enabled(true);
#ifdef _OPENMP
        omp_set_num_threads(exp.config.algorithm.threads);
#endif
    }

    MixingSchedule schedule(exp.net);
    schedule.set_contraction_bound(exp.certificate.rho_max);
    std::ostringstream dump;
    if (exp.config.network.dump_schedule) schedule.set_dump(&dump);

    SolverOptions options;
    options.iterations = exp.iterations;
    options.chi = exp.certificate.chi;
    if (exp.reference) {
        options.reference = &*exp.reference;
        // an explicit N runs to completion; a derived budget stops at the target
        if (exp.config.algorithm.N == 0) options.epsilon_target = exp.config.algorithm.epsilon;
    }

    RunArtifacts artifacts;
    artifacts.report = run(*exp.ensemble, exp.term, schedule, exp.rounds_per_iteration, exp.x0, options);
    artifacts.summary = render_summary(exp, artifacts.report);
    std::ostringstream csv;
    artifacts.report.write_csv(csv);
    artifacts.trace_csv = csv.str();
    artifacts.schedule_dump = dump.str();
    return artifacts;
}

std::string render_summary(const ResolvedExperiment& exp, const RunReport& report) {
    const EnsembleConstants& c = exp.ensemble->constants();
    std::ostringstream out;
    char hash[32];
    std::snprintf(hash, sizeof hash, "0x%016llx", static_cast<unsigned long long>(config_hash(exp.config)));
    out << "# run summary\n";
    out << "config_hash = " << hash << '\n';
    out << exp.config.canonical_text();
    out << "derived.L_local = " << format_double(c.L_local) << '\n';
    out << "derived.mu_local = " << format_double(c.mu_local) << '\n';
    out << "derived.L_global = " << format_double(c.L_global) << '\n';
    out << "derived.mu_global = " << format_double(c.mu_global) << '\n';
    out << "derived.eta = " << format_double(exp.eta) << '\n';
    out << "derived.rho_max = " << format_double(exp.certificate.rho_max) << '\n';
    out << "derived.chi = " << format_double(exp.certificate.chi) << '\n';
    out << "derived.T = " << exp.rounds_per_iteration << '\n';
    out << "derived.N = " << exp.iterations << '\n';
    out << "result.iterations = " << report.n_comp << '\n';
    out << "result.comm_rounds = " << report.n_comm << '\n';
    out << "result.reached_epsilon = " << (report.reached_epsilon ? "true" : "false") << '\n';
    if (!report.rows.empty()) {
        out << "result.final_gap = " << format_double(report.rows.back().gap) << '\n';
        out << "result.final_dist_sq = " << format_double(report.rows.back().dist_sq) << '\n';
        out << "result.final_cons_err = " << format_double(report.rows.back().cons_err) << '\n';
    }
    return out.str();
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw std::ios_base::failure("failed writing " + path.string());
}

int run_to_directory(const ExperimentConfig& config) {
    const ResolvedExperiment exp = resolve_experiment(config);
    const RunArtifacts artifacts = execute_experiment(exp);

    const std::filesystem::path dir(config.output.dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "summary.txt", artifacts.summary);
    if (config.output.csv) write_file(dir / "trace.csv", artifacts.trace_csv);
    if (config.network.dump_schedule) write_file(dir / "schedule.txt", artifacts.schedule_dump);
    return 0;
}

}  // namespace

int cli_run(const std::string& config_path) {
    try {
        return run_to_directory(ExperimentConfig::parse_file(config_path));
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return 1;
    } catch (const DivergenceError& err) {
        std::cerr << "aborted: " << err.what() << '\n';
        return 2;
    } catch (const std::ios_base::failure& err) {
        std::cerr << "io error: " << err.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return 1;
    }
}

namespace {

ExperimentConfig apply_sweep_value(const ExperimentConfig& base, const std::string& key,
                                   const std::string& value) {
    ExperimentConfig cfg = base;
    if (key == "condition_target") {
        cfg.problem.condition_target = std::stod(value);
    } else if (key == "chi_via_topology") {
        cfg.network.topology = value;
    } else if (key == "epsilon") {
        cfg.algorithm.epsilon = std::stod(value);
        cfg.algorithm.N = 0;  // re-derive the budget from the new target
    } else if (key == "T") {
        cfg.algorithm.T = value;
    } else {
        throw ConfigError("sweep key: expected condition_target, chi_via_topology, epsilon or T, got '" +
                          key + "'");
    }
    cfg.validate();
    return cfg;
}

}  // namespace

std::vector<SweepRow> run_sweep(const ExperimentConfig& base, const std::string& key,
                                const std::vector<std::string>& values) {
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (const std::string& value : values) {
        SweepRow row;
        row.value = value;
        try {
            const ExperimentConfig cfg = apply_sweep_value(base, key, value);
            const ResolvedExperiment exp = resolve_experiment(cfg);
            const RunArtifacts artifacts = execute_experiment(exp);
            const RunReport& report = artifacts.report;
            row.comm_rounds = report.n_comm;
            row.final_gap = report.rows.back().gap;
            row.n_to_eps = -1;
            for (const auto& rec : report.rows) {
                if (std::isfinite(rec.dist_sq) && rec.dist_sq <= cfg.algorithm.epsilon) {
                    row.n_to_eps = rec.k;
                    break;
                }
            }
        } catch (const std::exception& err) {
            row.failed = true;
            row.final_gap = std::numeric_limits<double>::quiet_NaN();
            std::cerr << "sweep value '" << value << "' failed: " << err.what() << '\n';
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

int cli_sweep(const std::string& config_path, const std::string& key,
              const std::vector<std::string>& values) {
    try {
        const ExperimentConfig base = ExperimentConfig::parse_file(config_path);
        const std::vector<SweepRow> rows = run_sweep(base, key, values);

        std::ostringstream csv;
        csv << "value,N_to_eps,comm_rounds,final_gap\n";
        for (const auto& row : rows) {
            csv << row.value << ',' << row.n_to_eps << ',' << row.comm_rounds << ','
                << format_double(row.final_gap) << '\n';
        }
        const std::filesystem::path dir(base.output.dir);
        std::filesystem::create_directories(dir);
        write_file(dir / "sweep.csv", csv.str());

        for (const auto& row : rows) {
            if (row.failed) return 2;
        }
        return 0;
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return 1;
    } catch (const std::ios_base::failure& err) {
        std::cerr << "io error: " << err.what() << '\n';
        return 3;
    }
}

CheckReport run_check_suite(const std::string& suite) {
    CheckReport report;
    const bool all = suite == "all";
    bool known = all;
    if (all || suite == "lemma1") {
        report.merge(check_model_sandwich(12, 900, 0x11aa));
        known = true;
    }
    if (all || suite == "lemma3") {
        report.merge(check_coefficient_suite());
        known = true;
    }
    if (all || suite == "consensus") {
        report.merge(check_consensus_contraction(20, 40, 50, 0x22bb));
        known = true;
    }
    if (all || suite == "prox") {
        report.merge(check_prox_oracle(1000, 0x33cc));
        known = true;
    }
    if (!known) {
        throw ConfigError("check suite: expected lemma1, lemma3, consensus, prox or all, got '" + suite + "'");
    }
    return report;
}

int cli_check(const std::string& suite) {
    try {
        const CheckReport report = run_check_suite(suite);
        for (const auto& line : report.lines) {
            std::cout << line.name << ',' << line.index << ',' << format_double(line.margin) << ','
                      << (line.pass ? 1 : 0) << '\n';
        }
        std::cout << (report.pass ? "PASS" : "FAIL") << ' ' << suite << '\n';
        return report.pass ? 0 : 1;
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return 1;
    }
}

}  // namespace decprox
