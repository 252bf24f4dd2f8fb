#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "decprox/stacked.hpp"

namespace decprox {

/// f(x) = 0.5 x^T A x - b^T x with A symmetric positive definite.
struct QuadraticNode {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd shift;
};

/// Regularized logistic loss over the node's local samples:
/// f(x) = (1/n) sum_j log(1 + exp(-y_j z_j.x)) + (ridge/2) ||x||^2.
struct LogisticL2Node {
    Eigen::MatrixXd features;  // one sample per row
    Eigen::VectorXd labels;    // entries in {-1, +1}
    double ridge = 0.0;
};

/// A per-node smooth strongly convex objective with certified constants.
/// Quadratic constants come from an eigendecomposition at construction;
/// logistic constants use the 1/4 sigmoid curvature bound.
class NodeObjective {
public:
    enum class Kind { quadratic, logistic_l2 };

    static NodeObjective quadratic(Eigen::MatrixXd matrix, Eigen::VectorXd shift);
    static NodeObjective logistic_l2(Eigen::MatrixXd features, Eigen::VectorXd labels, double ridge);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    double smoothness() const { return smoothness_; }
    double strong_convexity() const { return strong_convexity_; }

    double value(const Eigen::VectorXd& x) const;
    void gradient(const Eigen::VectorXd& x, Eigen::Ref<Eigen::VectorXd> out) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;

    const QuadraticNode& quadratic_data() const { return std::get<QuadraticNode>(data_); }
    const LogisticL2Node& logistic_data() const { return std::get<LogisticL2Node>(data_); }

private:
    NodeObjective() = default;

    Kind kind_ = Kind::quadratic;
    int dim_ = 0;
    double smoothness_ = 0.0;
    double strong_convexity_ = 0.0;
    std::variant<QuadraticNode, LogisticL2Node> data_;
};

/// Aggregate smoothness / strong-convexity constants of an ensemble:
/// worst-case per node (local) and averaged over nodes (global).
struct EnsembleConstants {
    int node_count = 0;
    double L_local = 0.0;
    double mu_local = 0.0;
    double L_global = 0.0;
    double mu_global = 0.0;
};

class ObjectiveEnsemble {
public:
    explicit ObjectiveEnsemble(std::vector<NodeObjective> nodes);

    int size() const { return static_cast<int>(nodes_.size()); }
    int dim() const { return dim_; }
    const NodeObjective& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    const EnsembleConstants& constants() const { return constants_; }

private:
    std::vector<NodeObjective> nodes_;
    int dim_ = 0;
    EnsembleConstants constants_;
};

EnsembleConstants ensemble_constants(const ObjectiveEnsemble& ens);

/// Stacked gradient: block i of the result is the gradient of node i's
/// objective at block i of x. One call is one oracle round for every node.
StackedVector grad_stacked(const ObjectiveEnsemble& ens, const StackedVector& x);
void grad_stacked(const ObjectiveEnsemble& ens, const StackedVector& x, StackedVector& out);

/// sum_i f_i(x_i) over the stacked blocks.
double value_stacked(const ObjectiveEnsemble& ens, const StackedVector& x);

/// (1/m) sum_i f_i(y): the averaged objective at a single point.
double value_avg(const ObjectiveEnsemble& ens, const Eigen::VectorXd& y);

/// Mean of the per-node gradients at a single point, (1/m) sum_i grad f_i(y).
Eigen::VectorXd grad_avg(const ObjectiveEnsemble& ens, const Eigen::VectorXd& y);

struct GeneratedProblem {
    ObjectiveEnsemble ensemble;
    /// Minimizer of sum_i f_i over the consensus set when the composite
    /// term is absent: the solution of (sum A_i) x = sum b_i.
    Eigen::VectorXd smooth_minimizer;
};

/// Synthetic quadratic ensemble with exact spectrum placement. The global
/// condition number L_global/mu_global equals condition_target by
/// construction; per-node conditions are drawn heterogeneously so the local
/// constants can be far worse than the global ones. Deterministic per seed.
GeneratedProblem generate_quadratic_ensemble(std::uint64_t seed, int nodes, int dim, double condition_target);

/// LibSVM-format text ingestion: lines "label idx:val idx:val ..." with
/// 1-based indices and labels in {-1,+1}. Rows are assigned to nodes
/// round-robin by line number. dim_hint (if > 0) fixes the feature
/// dimension; otherwise the maximum index seen is used.
ObjectiveEnsemble load_libsvm_ensemble(const std::string& path, int nodes, double ridge, int dim_hint = 0);

}  // namespace decprox
