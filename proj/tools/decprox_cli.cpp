#include <CLI11.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "decprox/harness.hpp"
#include "decprox/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

int main(int argc, char** argv) {
    CLI::App app{"decprox: decentralized accelerated proximal optimization over simulated gossip networks"};
    app.require_subcommand(1);

    int threads = -1;
    app.add_option("--threads", threads, "worker threads for block-parallel kernels (1 = serial)");

    std::string run_config;
    auto* run_cmd = app.add_subcommand("run", "execute one experiment from a config file");
    run_cmd->add_option("config", run_config, "path to the config file")->required();

    std::string sweep_config;
    std::string sweep_key;
    std::string sweep_values;
    auto* sweep_cmd = app.add_subcommand("sweep", "run the config once per value of a swept key");
    sweep_cmd->add_option("config", sweep_config, "path to the base config file")->required();
    sweep_cmd->add_option("--key", sweep_key, "condition_target | chi_via_topology | epsilon | T")->required();
    sweep_cmd->add_option("--values", sweep_values, "comma-separated list of values")->required();

    std::string check_suite;
    auto* check_cmd = app.add_subcommand("check", "run a certification suite with fixed seeds");
    check_cmd->add_option("suite", check_suite, "lemma1 | lemma3 | consensus | prox | all")->required();

    CLI11_PARSE(app, argc, argv);

    if (threads == 1) {
        decprox::par::set_enabled(false);
    } else if (threads > 1) {
        decprox::par::set_enabled(true);
#ifdef _OPENMP
        omp_set_num_threads(threads);
#endif
    }

    if (run_cmd->parsed()) return decprox::cli_run(run_config);
    if (sweep_cmd->parsed()) {
        std::vector<std::string> values;
        std::istringstream in(sweep_values);
        std::string token;
        while (std::getline(in, token, ',')) {
            if (!token.empty()) values.push_back(token);
        }
        return decprox::cli_sweep(sweep_config, sweep_key, values);
    }
    return decprox::cli_check(check_suite);
}
