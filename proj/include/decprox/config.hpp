#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "decprox/network.hpp"
#include "decprox/prox.hpp"

namespace decprox {

/// Experiment description parsed from a flat "section.key = value" file
/// ('#' starts a comment). Unknown keys and invalid combinations fail at
/// load time, naming the key, before any computation starts.
struct ExperimentConfig {
    struct Problem {
        std::string kind = "quadratic";  // quadratic | logistic-l2
        int m = 4;
        int d = 8;
        std::uint64_t seed = 1;
        double condition_target = 10.0;
        std::string dataset;  // logistic-l2 input path
        double ridge = 0.1;
        std::string g = "zero";  // zero | l1 | elastic-net
        double g_weight = 0.0;
        double g_weight2 = 0.0;
        std::string q = "all-space";  // all-space | box | ball
        double box_lo = -1.0;
        double box_hi = 1.0;
        double ball_radius = 1.0;
        double ball_center = 0.0;  // broadcast per coordinate
    } problem;

    struct Network {
        std::string topology = "ring";
        double p_drop = 0.0;
        bool lazy = false;
        std::uint64_t seed = 2;
        int certify_rounds = 0;  // 0 = automatic
        bool dump_schedule = false;
    } network;

    struct Algorithm {
        std::string T = "theorem";  // "theorem" or an explicit integer
        int N = 0;                  // 0 = derive from epsilon
        double epsilon = 1e-6;
        std::string x0 = "zero";  // "zero" or comma-separated coordinates
        std::string reference = "auto";  // auto | none
        std::optional<double> grad_norm_at_opt_bound;
        std::optional<double> r0_bound;
        int threads = 0;  // 0 = library default, 1 = serial
    } algorithm;

    struct Output {
        std::string dir = "out";
        bool csv = true;
    } output;

    static ExperimentConfig parse_file(const std::string& path);
    static ExperimentConfig parse_text(const std::string& text);

    /// Cross-field validation (prox pair table, ranges); throws ConfigError
    /// naming the offending key.
    void validate() const;

    CompositeTerm composite_term() const;
    NetworkConfig network_config(int node_count) const;
    Eigen::VectorXd initial_point(int dim) const;

    /// Canonical echo of every effective field, one "key = value" per line.
    std::string canonical_text() const;
};

}  // namespace decprox
