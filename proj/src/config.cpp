#include "decprox/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace decprox {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double parsed = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    }
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long parsed = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an integer, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "on") return true;
    if (value == "false" || value == "0" || value == "off") return false;
    throw ConfigError(key + ": expected true/false, got '" + value + "'");
}

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_number = 0;
    std::map<std::string, std::string> seen;
    std::optional<std::int64_t> network_m;  // allowed for symmetry, must agree with problem.m
    while (std::getline(in, line)) {
        ++line_number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_number) + ": expected 'key = value'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("config line " + std::to_string(line_number) + ": empty key or value");
        }
        if (!seen.emplace(key, value).second) {
            throw ConfigError(key + ": duplicate key");
        }

        if (key == "problem.kind") cfg.problem.kind = value;
        else if (key == "problem.m") cfg.problem.m = static_cast<int>(parse_int(key, value));
        else if (key == "problem.d") cfg.problem.d = static_cast<int>(parse_int(key, value));
        else if (key == "problem.seed") cfg.problem.seed = static_cast<std::uint64_t>(parse_int(key, value));
        else if (key == "problem.condition_target") cfg.problem.condition_target = parse_double(key, value);
        else if (key == "problem.dataset") cfg.problem.dataset = value;
        else if (key == "problem.ridge") cfg.problem.ridge = parse_double(key, value);
        else if (key == "problem.g") cfg.problem.g = value;
        else if (key == "problem.g_weight") cfg.problem.g_weight = parse_double(key, value);
        else if (key == "problem.g_weight2") cfg.problem.g_weight2 = parse_double(key, value);
        else if (key == "problem.q") cfg.problem.q = value;
        else if (key == "problem.box_lo") cfg.problem.box_lo = parse_double(key, value);
        else if (key == "problem.box_hi") cfg.problem.box_hi = parse_double(key, value);
        else if (key == "problem.ball_radius") cfg.problem.ball_radius = parse_double(key, value);
        else if (key == "problem.ball_center") cfg.problem.ball_center = parse_double(key, value);
        else if (key == "network.topology") cfg.network.topology = value;
        else if (key == "network.m") network_m = parse_int(key, value);
        else if (key == "network.p_drop") cfg.network.p_drop = parse_double(key, value);
        else if (key == "network.lazy") cfg.network.lazy = parse_bool(key, value);
        else if (key == "network.seed") cfg.network.seed = static_cast<std::uint64_t>(parse_int(key, value));
        else if (key == "network.certify_rounds") cfg.network.certify_rounds = static_cast<int>(parse_int(key, value));
        else if (key == "network.dump_schedule") cfg.network.dump_schedule = parse_bool(key, value);
        else if (key == "algorithm.T") cfg.algorithm.T = value;
        else if (key == "algorithm.N") cfg.algorithm.N = static_cast<int>(parse_int(key, value));
        else if (key == "algorithm.epsilon") cfg.algorithm.epsilon = parse_double(key, value);
        else if (key == "algorithm.x0") cfg.algorithm.x0 = value;
        else if (key == "algorithm.reference") cfg.algorithm.reference = value;
        else if (key == "algorithm.grad_norm_at_opt_bound") cfg.algorithm.grad_norm_at_opt_bound = parse_double(key, value);
        else if (key == "algorithm.r0_bound") cfg.algorithm.r0_bound = parse_double(key, value);
        else if (key == "algorithm.threads") cfg.algorithm.threads = static_cast<int>(parse_int(key, value));
        else if (key == "output.dir") cfg.output.dir = value;
        else if (key == "output.csv") cfg.output.csv = parse_bool(key, value);
        else throw ConfigError(key + ": unknown key");
    }
    if (network_m && *network_m != cfg.problem.m) {
        throw ConfigError("network.m: must equal problem.m");
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_text(text.str());
}

void ExperimentConfig::validate() const {
    if (problem.kind != "quadratic" && problem.kind != "logistic-l2") {
        throw ConfigError("problem.kind: expected quadratic or logistic-l2, got '" + problem.kind + "'");
    }
    if (problem.kind == "logistic-l2" && problem.dataset.empty()) {
        throw ConfigError("problem.dataset: required for logistic-l2");
    }
    if (problem.kind == "logistic-l2" && !(problem.ridge > 0.0)) {
        throw ConfigError("problem.ridge: must be positive");
    }
    if (problem.m < 1) throw ConfigError("problem.m: need at least one node");
    if (problem.kind == "quadratic") {
        if (problem.d < 1) throw ConfigError("problem.d: need dimension >= 1");
        if (problem.condition_target < 1.0) throw ConfigError("problem.condition_target: must be >= 1");
    }
    composite_term();  // rejects unsupported (g, Q) pairs, naming them
    topology_from_string(network.topology);
    if (network.p_drop < 0.0 || network.p_drop >= 1.0) throw ConfigError("network.p_drop: must lie in [0, 1)");
    if (network.certify_rounds < 0) throw ConfigError("network.certify_rounds: must be nonnegative");
    if (algorithm.T != "theorem") {
        const std::int64_t t = parse_int("algorithm.T", algorithm.T);
        if (t < 0) throw ConfigError("algorithm.T: must be nonnegative or 'theorem'");
    }
    if (algorithm.N < 0) throw ConfigError("algorithm.N: must be nonnegative");
    if (!(algorithm.epsilon > 0.0)) throw ConfigError("algorithm.epsilon: must be positive");
    if (algorithm.reference != "auto" && algorithm.reference != "none") {
        throw ConfigError("algorithm.reference: expected auto or none");
    }
    if (algorithm.threads < 0) throw ConfigError("algorithm.threads: must be nonnegative");
    if (algorithm.reference == "none" && algorithm.N == 0) {
        throw ConfigError("algorithm.N: required explicitly when algorithm.reference = none");
    }
    if (output.dir.empty()) throw ConfigError("output.dir: must not be empty");
}

CompositeTerm ExperimentConfig::composite_term() const {
    CompositeTerm::GKind g;
    if (problem.g == "zero") g = CompositeTerm::GKind::zero;
    else if (problem.g == "l1") g = CompositeTerm::GKind::l1;
    else if (problem.g == "elastic-net") g = CompositeTerm::GKind::elastic_net;
    else throw ConfigError("problem.g: expected zero, l1 or elastic-net, got '" + problem.g + "'");

    CompositeTerm::QKind q;
    if (problem.q == "all-space") q = CompositeTerm::QKind::all_space;
    else if (problem.q == "box") q = CompositeTerm::QKind::box;
    else if (problem.q == "ball") q = CompositeTerm::QKind::ball;
    else throw ConfigError("problem.q: expected all-space, box or ball, got '" + problem.q + "'");

    try {
        Eigen::VectorXd center;
        if (q == CompositeTerm::QKind::ball && problem.ball_center != 0.0) {
            center = Eigen::VectorXd::Constant(problem.d, problem.ball_center);
        }
        return CompositeTerm::make(g, problem.g_weight, problem.g_weight2, q, Eigen::VectorXd(),
                                   Eigen::VectorXd(), problem.box_lo, problem.box_hi, std::move(center),
                                   problem.ball_radius);
    } catch (const ConfigError& err) {
        throw ConfigError(std::string("problem.g/problem.q: ") + err.what());
    }
}

NetworkConfig ExperimentConfig::network_config(int node_count) const {
    return NetworkConfig{.m = node_count,
                         .topology = topology_from_string(network.topology),
                         .p_drop = network.p_drop,
                         .lazy = network.lazy,
                         .seed = network.seed};
}

Eigen::VectorXd ExperimentConfig::initial_point(int dim) const {
    if (algorithm.x0 == "zero") return Eigen::VectorXd::Zero(dim);
    std::vector<double> coords;
    std::istringstream in(algorithm.x0);
    std::string token;
    while (std::getline(in, token, ',')) {
        coords.push_back(parse_double("algorithm.x0", trim(token)));
    }
    if (static_cast<int>(coords.size()) != dim) {
        throw ConfigError("algorithm.x0: expected 'zero' or " + std::to_string(dim) +
                          " comma-separated coordinates");
    }
    Eigen::VectorXd x0(dim);
    for (int i = 0; i < dim; ++i) x0[i] = coords[static_cast<std::size_t>(i)];
    return x0;
}

std::string ExperimentConfig::canonical_text() const {
    std::ostringstream out;
    out << "problem.kind = " << problem.kind << '\n';
    out << "problem.m = " << problem.m << '\n';
    if (problem.kind == "quadratic") {
        out << "problem.d = " << problem.d << '\n';
        out << "problem.seed = " << problem.seed << '\n';
        out << "problem.condition_target = " << format_double(problem.condition_target) << '\n';
    } else {
        out << "problem.dataset = " << problem.dataset << '\n';
        out << "problem.ridge = " << format_double(problem.ridge) << '\n';
    }
    out << "problem.g = " << problem.g << '\n';
    if (problem.g != "zero") {
        out << "problem.g_weight = " << format_double(problem.g_weight) << '\n';
        if (problem.g == "elastic-net") out << "problem.g_weight2 = " << format_double(problem.g_weight2) << '\n';
    }
    out << "problem.q = " << problem.q << '\n';
    if (problem.q == "box") {
        out << "problem.box_lo = " << format_double(problem.box_lo) << '\n';
        out << "problem.box_hi = " << format_double(problem.box_hi) << '\n';
    }
    if (problem.q == "ball") {
        out << "problem.ball_radius = " << format_double(problem.ball_radius) << '\n';
        out << "problem.ball_center = " << format_double(problem.ball_center) << '\n';
    }
    out << "network.topology = " << network.topology << '\n';
    out << "network.p_drop = " << format_double(network.p_drop) << '\n';
    out << "network.lazy = " << (network.lazy ? "true" : "false") << '\n';
    out << "network.seed = " << network.seed << '\n';
    out << "network.certify_rounds = " << network.certify_rounds << '\n';
    out << "network.dump_schedule = " << (network.dump_schedule ? "true" : "false") << '\n';
    out << "algorithm.T = " << algorithm.T << '\n';
    out << "algorithm.N = " << algorithm.N << '\n';
    out << "algorithm.epsilon = " << format_double(algorithm.epsilon) << '\n';
    out << "algorithm.x0 = " << algorithm.x0 << '\n';
    out << "algorithm.reference = " << algorithm.reference << '\n';
    if (algorithm.grad_norm_at_opt_bound) {
        out << "algorithm.grad_norm_at_opt_bound = " << format_double(*algorithm.grad_norm_at_opt_bound) << '\n';
    }
    if (algorithm.r0_bound) out << "algorithm.r0_bound = " << format_double(*algorithm.r0_bound) << '\n';
    out << "algorithm.threads = " << algorithm.threads << '\n';
    out << "output.dir = " << output.dir << '\n';
    out << "output.csv = " << (output.csv ? "true" : "false") << '\n';
    return out.str();
}

}  // namespace decprox
