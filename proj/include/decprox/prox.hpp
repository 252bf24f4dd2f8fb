#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

#include "decprox/stacked.hpp"

namespace decprox {

/// Thrown for invalid configuration (unsupported term pairs, bad keys, ...).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The shared composite term: a simple convex g plus the constraint set Q.
/// Only pairs with a closed-form constrained prox are accepted; anything
/// else is rejected when the term is built, never at evaluation time.
///
/// Supported pairs: (zero, any Q); (l1, all-space); (l1, box);
/// (elastic-net, all-space).
class CompositeTerm {
public:
    enum class GKind { zero, l1, elastic_net };
    enum class QKind { all_space, box, ball };

    /// g = 0, Q = R^d.
    static CompositeTerm zero();
    /// g = w ||x||_1, Q = R^d.
    static CompositeTerm l1(double weight);
    /// g = w1 ||x||_1 + (w2/2) ||x||^2, Q = R^d.
    static CompositeTerm elastic_net(double l1_weight, double ridge_weight);
    /// g = 0, Q = box (scalar bounds broadcast per coordinate).
    static CompositeTerm box(double lo, double hi);
    /// g = 0, Q = box with per-coordinate bounds.
    static CompositeTerm box(Eigen::VectorXd lo, Eigen::VectorXd hi);
    /// g = w ||x||_1 over a box.
    static CompositeTerm l1_box(double weight, double lo, double hi);
    static CompositeTerm l1_box(double weight, Eigen::VectorXd lo, Eigen::VectorXd hi);
    /// g = 0, Q = Euclidean ball (default center: origin).
    static CompositeTerm ball(double radius);
    static CompositeTerm ball(Eigen::VectorXd center, double radius);

    /// Validating constructor used by the config layer.
    static CompositeTerm make(GKind g, double w1, double w2, QKind q, Eigen::VectorXd box_lo,
                              Eigen::VectorXd box_hi, double scalar_lo, double scalar_hi,
                              Eigen::VectorXd ball_center, double ball_radius);

    GKind g_kind() const { return g_kind_; }
    QKind q_kind() const { return q_kind_; }
    double l1_weight() const { return w1_; }
    double ridge_weight() const { return w2_; }

    static const char* name(GKind g);
    static const char* name(QKind q);

    double g_value(const Eigen::VectorXd& x) const;

    /// argmin_{y in Q} { g(y) + ||y - x||^2 / (2 gamma) }.
    Eigen::VectorXd prox_point(double gamma, const Eigen::VectorXd& x) const;

    /// Blockwise prox of the stacked term; block i is prox_point of block i.
    StackedVector prox_stacked(double gamma, const StackedVector& x) const;
    void prox_stacked(double gamma, const StackedVector& x, StackedVector& out) const;

    /// Euclidean projection onto Q (identity for all-space).
    Eigen::VectorXd project_q(const Eigen::VectorXd& x) const;

    bool contains(const Eigen::VectorXd& x, double tol = 1e-12) const;

private:
    CompositeTerm() = default;

    double box_lo(Eigen::Index i) const { return lo_.size() > 0 ? lo_[i] : scalar_lo_; }
    double box_hi(Eigen::Index i) const { return hi_.size() > 0 ? hi_[i] : scalar_hi_; }
    void check_box_dim(Eigen::Index d, const char* where) const;

    GKind g_kind_ = GKind::zero;
    QKind q_kind_ = QKind::all_space;
    double w1_ = 0.0;
    double w2_ = 0.0;
    Eigen::VectorXd lo_, hi_;  // empty => scalar bounds broadcast
    double scalar_lo_ = 0.0, scalar_hi_ = 0.0;
    Eigen::VectorXd ball_center_;  // empty => origin
    double ball_radius_ = 0.0;
};

}  // namespace decprox
