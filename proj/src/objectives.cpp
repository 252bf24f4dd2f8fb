#include "decprox/objectives.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "decprox/parallel.hpp"
#include "decprox/rng.hpp"

namespace decprox {

namespace {

// log(1 + exp(t)) without overflow
double log1p_exp(double t) {
    if (t > 0.0) return t + std::log1p(std::exp(-t));
    return std::log1p(std::exp(t));
}

double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

}  // namespace

NodeObjective NodeObjective::quadratic(Eigen::MatrixXd matrix, Eigen::VectorXd shift) {
    if (matrix.rows() != matrix.cols() || matrix.rows() != shift.size() || matrix.rows() < 1) {
        throw std::invalid_argument("NodeObjective::quadratic: matrix must be square and match the shift");
    }
    if (!matrix.isApprox(matrix.transpose(), 1e-12)) {
        throw std::invalid_argument("NodeObjective::quadratic: matrix must be symmetric");
    }
    NodeObjective node;
    node.kind_ = Kind::quadratic;
    node.dim_ = static_cast<int>(matrix.rows());

    // constants are computed from the spectrum, not taken on trust
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(matrix, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (lo <= 0.0) {
        throw std::invalid_argument("NodeObjective::quadratic: matrix must be positive definite (min eig " +
                                    std::to_string(lo) + ")");
    }
    node.strong_convexity_ = lo;
    node.smoothness_ = hi;
    node.data_ = QuadraticNode{std::move(matrix), std::move(shift)};
    return node;
}

NodeObjective NodeObjective::logistic_l2(Eigen::MatrixXd features, Eigen::VectorXd labels, double ridge) {
    if (ridge <= 0.0) {
        throw std::invalid_argument("NodeObjective::logistic_l2: ridge must be positive");
    }
    if (features.rows() != labels.size()) {
        throw std::invalid_argument("NodeObjective::logistic_l2: sample count mismatch");
    }
    for (Eigen::Index j = 0; j < labels.size(); ++j) {
        if (labels[j] != 1.0 && labels[j] != -1.0) {
            throw std::invalid_argument("NodeObjective::logistic_l2: labels must be +1 or -1");
        }
    }
    NodeObjective node;
    node.kind_ = Kind::logistic_l2;
    node.dim_ = static_cast<int>(features.cols());
    node.strong_convexity_ = ridge;
    if (features.rows() == 0) {
        node.smoothness_ = ridge;
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(features.transpose() * features,
                                                           Eigen::EigenvaluesOnly);
        const double n = static_cast<double>(features.rows());
        node.smoothness_ = eig.eigenvalues().maxCoeff() / (4.0 * n) + ridge;
    }
    node.data_ = LogisticL2Node{std::move(features), std::move(labels), ridge};
    return node;
}

double NodeObjective::value(const Eigen::VectorXd& x) const {
    if (x.size() != dim_) throw std::invalid_argument("NodeObjective::value: dimension mismatch");
    if (kind_ == Kind::quadratic) {
        const auto& q = std::get<QuadraticNode>(data_);
        return 0.5 * x.dot(q.matrix * x) - q.shift.dot(x);
    }
    const auto& l = std::get<LogisticL2Node>(data_);
    const Eigen::Index n = l.features.rows();
    double loss = 0.0;
    if (n > 0) {
        const Eigen::VectorXd margins = l.features * x;
        for (Eigen::Index j = 0; j < n; ++j) {
            loss += log1p_exp(-l.labels[j] * margins[j]);
        }
        loss /= static_cast<double>(n);
    }
    return loss + 0.5 * l.ridge * x.squaredNorm();
}

void NodeObjective::gradient(const Eigen::VectorXd& x, Eigen::Ref<Eigen::VectorXd> out) const {
    if (x.size() != dim_ || out.size() != dim_) {
        throw std::invalid_argument("NodeObjective::gradient: dimension mismatch");
    }
    if (kind_ == Kind::quadratic) {
        const auto& q = std::get<QuadraticNode>(data_);
        out.noalias() = q.matrix * x;
        out -= q.shift;
        return;
    }
    const auto& l = std::get<LogisticL2Node>(data_);
    out = l.ridge * x;
    const Eigen::Index n = l.features.rows();
    if (n > 0) {
        const Eigen::VectorXd margins = l.features * x;
        const double scale = 1.0 / static_cast<double>(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double coeff = -l.labels[j] * sigmoid(-l.labels[j] * margins[j]) * scale;
            out += coeff * l.features.row(j).transpose();
        }
    }
}

Eigen::VectorXd NodeObjective::gradient(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out(dim_);
    gradient(x, out);
    return out;
}

ObjectiveEnsemble::ObjectiveEnsemble(std::vector<NodeObjective> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw std::invalid_argument("ObjectiveEnsemble: need at least one node");
    dim_ = nodes_[0].dim();
    for (const auto& node : nodes_) {
        if (node.dim() != dim_) throw std::invalid_argument("ObjectiveEnsemble: nodes disagree on dimension");
    }
    constants_.node_count = static_cast<int>(nodes_.size());
    constants_.L_local = 0.0;
    constants_.mu_local = std::numeric_limits<double>::infinity();
    double sum_L = 0.0;
    double sum_mu = 0.0;
    for (const auto& node : nodes_) {
        constants_.L_local = std::max(constants_.L_local, node.smoothness());
        constants_.mu_local = std::min(constants_.mu_local, node.strong_convexity());
        sum_L += node.smoothness();
        sum_mu += node.strong_convexity();
    }
    constants_.L_global = sum_L / static_cast<double>(nodes_.size());
    constants_.mu_global = sum_mu / static_cast<double>(nodes_.size());
}

EnsembleConstants ensemble_constants(const ObjectiveEnsemble& ens) { return ens.constants(); }

void grad_stacked(const ObjectiveEnsemble& ens, const StackedVector& x, StackedVector& out) {
    if (x.nodes() != ens.size() || x.dim() != ens.dim()) {
        throw std::invalid_argument("grad_stacked: stacked shape does not match the ensemble");
    }
    if (!out.same_shape(x)) out = StackedVector(x.nodes(), x.dim());
    par::for_each_index(ens.size(), static_cast<std::int64_t>(ens.dim()) * ens.dim(), [&](std::int64_t i) {
        const int node = static_cast<int>(i);
        ens.node(node).gradient(x.block(node), out.block(node));
    });
}

StackedVector grad_stacked(const ObjectiveEnsemble& ens, const StackedVector& x) {
    StackedVector out(x.nodes(), x.dim());
    grad_stacked(ens, x, out);
    return out;
}

double value_stacked(const ObjectiveEnsemble& ens, const StackedVector& x) {
    if (x.nodes() != ens.size() || x.dim() != ens.dim()) {
        throw std::invalid_argument("value_stacked: stacked shape does not match the ensemble");
    }
    return par::indexed_sum(ens.size(), static_cast<std::int64_t>(ens.dim()) * ens.dim(),
                            [&](std::int64_t i) { return ens.node(static_cast<int>(i)).value(x.block(static_cast<int>(i))); });
}

double value_avg(const ObjectiveEnsemble& ens, const Eigen::VectorXd& y) {
    if (y.size() != ens.dim()) throw std::invalid_argument("value_avg: dimension mismatch");
    const double total = par::indexed_sum(
        ens.size(), static_cast<std::int64_t>(ens.dim()) * ens.dim(),
        [&](std::int64_t i) { return ens.node(static_cast<int>(i)).value(y); });
    return total / static_cast<double>(ens.size());
}

Eigen::VectorXd grad_avg(const ObjectiveEnsemble& ens, const Eigen::VectorXd& y) {
    if (y.size() != ens.dim()) throw std::invalid_argument("grad_avg: dimension mismatch");
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(ens.dim());
    Eigen::VectorXd g(ens.dim());
    for (int i = 0; i < ens.size(); ++i) {
        ens.node(i).gradient(y, g);
        sum += g;
    }
    return sum / static_cast<double>(ens.size());
}

GeneratedProblem generate_quadratic_ensemble(std::uint64_t seed, int nodes, int dim, double condition_target) {
    if (nodes < 1 || dim < 1) {
        throw std::invalid_argument("generate_quadratic_ensemble: need nodes >= 1 and dim >= 1");
    }
    if (condition_target < 1.0) {
        throw std::invalid_argument("generate_quadratic_ensemble: condition_target must be >= 1");
    }
    if (dim == 1 && condition_target > 1.0) {
        // every 1-d node has L_i = mu_i, so the global condition is pinned to 1
        throw std::invalid_argument("generate_quadratic_ensemble: condition_target > 1 is unreachable with d = 1");
    }
    Rng rng(seed);

    // per-node strong convexity, then spread the smoothness surplus with
    // log-uniform weights so sum(L_i) = condition_target * sum(mu_i) exactly
    std::vector<double> mu(static_cast<std::size_t>(nodes));
    std::vector<double> weight(static_cast<std::size_t>(nodes));
    double mu_sum = 0.0;
    double weight_sum = 0.0;
    for (int i = 0; i < nodes; ++i) {
        mu[static_cast<std::size_t>(i)] = rng.log_uniform(0.5, 2.0);
        weight[static_cast<std::size_t>(i)] = rng.log_uniform(0.1, 10.0);
        mu_sum += mu[static_cast<std::size_t>(i)];
        weight_sum += weight[static_cast<std::size_t>(i)];
    }

    const Eigen::VectorXd target = rng.normal_vector(dim).normalized();

    std::vector<NodeObjective> members;
    members.reserve(static_cast<std::size_t>(nodes));
    Eigen::MatrixXd matrix_sum = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd shift_sum = Eigen::VectorXd::Zero(dim);

    for (int i = 0; i < nodes; ++i) {
        const double mu_i = mu[static_cast<std::size_t>(i)];
        const double L_i =
            mu_i + (condition_target - 1.0) * weight[static_cast<std::size_t>(i)] * mu_sum / weight_sum;

        Eigen::MatrixXd matrix;
        if (L_i == mu_i) {
            matrix = mu_i * Eigen::MatrixXd::Identity(dim, dim);
        } else {
            Eigen::VectorXd spectrum(dim);
            spectrum[0] = mu_i;
            spectrum[dim - 1] = L_i;
            for (int j = 1; j + 1 < dim; ++j) {
                spectrum[j] = rng.log_uniform(mu_i, L_i);
            }
            Eigen::MatrixXd gaussian(dim, dim);
            for (int r = 0; r < dim; ++r)
                for (int c = 0; c < dim; ++c) gaussian(r, c) = rng.normal();
            const Eigen::MatrixXd basis = Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian).householderQ();
            matrix = basis * spectrum.asDiagonal() * basis.transpose();
            matrix = 0.5 * (matrix + matrix.transpose());
        }

        Eigen::VectorXd shift = matrix * target + rng.normal_vector(dim);
        matrix_sum += matrix;
        shift_sum += shift;
        members.push_back(NodeObjective::quadratic(std::move(matrix), std::move(shift)));
    }

    GeneratedProblem problem{ObjectiveEnsemble(std::move(members)),
                             Eigen::LDLT<Eigen::MatrixXd>(matrix_sum).solve(shift_sum)};
    return problem;
}

ObjectiveEnsemble load_libsvm_ensemble(const std::string& path, int nodes, double ridge, int dim_hint) {
    if (nodes < 1) throw std::invalid_argument("load_libsvm_ensemble: need nodes >= 1");
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_libsvm_ensemble: cannot open " + path);

    struct Row {
        double label;
        std::vector<std::pair<int, double>> entries;  // 0-based
    };
    std::vector<Row> rows;
    int max_index = 0;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string token;
        if (!(fields >> token)) continue;  // blank line
        Row row;
        try {
            row.label = std::stod(token);
        } catch (const std::exception&) {
            throw std::runtime_error("load_libsvm_ensemble: bad label on line " + std::to_string(line_number));
        }
        if (row.label != 1.0 && row.label != -1.0) {
            throw std::runtime_error("load_libsvm_ensemble: label must be +1 or -1 on line " +
                                     std::to_string(line_number));
        }
        while (fields >> token) {
            const auto colon = token.find(':');
            if (colon == std::string::npos) {
                throw std::runtime_error("load_libsvm_ensemble: expected idx:val on line " +
                                         std::to_string(line_number));
            }
            int index = 0;
            double value = 0.0;
            try {
                index = std::stoi(token.substr(0, colon));
                value = std::stod(token.substr(colon + 1));
            } catch (const std::exception&) {
                throw std::runtime_error("load_libsvm_ensemble: bad idx:val on line " +
                                         std::to_string(line_number));
            }
            if (index < 1) {
                throw std::runtime_error("load_libsvm_ensemble: indices are 1-based, got " +
                                         std::to_string(index) + " on line " + std::to_string(line_number));
            }
            max_index = std::max(max_index, index);
            row.entries.emplace_back(index - 1, value);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("load_libsvm_ensemble: no samples in " + path);

    int dim = std::max(max_index, dim_hint);
    if (dim_hint > 0 && max_index > dim_hint) {
        throw std::runtime_error("load_libsvm_ensemble: feature index " + std::to_string(max_index) +
                                 " exceeds requested dimension " + std::to_string(dim_hint));
    }
    if (dim < 1) throw std::runtime_error("load_libsvm_ensemble: no features found");

    // round-robin partition by line order
    std::vector<std::vector<const Row*>> partition(static_cast<std::size_t>(nodes));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        partition[r % static_cast<std::size_t>(nodes)].push_back(&rows[r]);
    }

    std::vector<NodeObjective> members;
    members.reserve(static_cast<std::size_t>(nodes));
    for (int i = 0; i < nodes; ++i) {
        const auto& local = partition[static_cast<std::size_t>(i)];
        Eigen::MatrixXd features = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(local.size()), dim);
        Eigen::VectorXd labels(static_cast<Eigen::Index>(local.size()));
        for (std::size_t r = 0; r < local.size(); ++r) {
            labels[static_cast<Eigen::Index>(r)] = local[r]->label;
            for (const auto& [col, value] : local[r]->entries) {
                features(static_cast<Eigen::Index>(r), col) = value;
            }
        }
        members.push_back(NodeObjective::logistic_l2(std::move(features), std::move(labels), ridge));
    }
    return ObjectiveEnsemble(std::move(members));
}

}  // namespace decprox
