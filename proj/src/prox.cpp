#include "decprox/prox.hpp"

#include <algorithm>
#include <cmath>

#include "decprox/parallel.hpp"

namespace decprox {

namespace {

double soft_threshold(double x, double threshold) {
    if (x > threshold) return x - threshold;
    if (x < -threshold) return x + threshold;
    return 0.0;
}

CompositeTerm::GKind validate_pair(CompositeTerm::GKind g, CompositeTerm::QKind q) {
    using G = CompositeTerm::GKind;
    using Q = CompositeTerm::QKind;
    const bool ok = (g == G::zero) || (g == G::l1 && (q == Q::all_space || q == Q::box)) ||
                    (g == G::elastic_net && q == Q::all_space);
    if (!ok) {
        throw ConfigError(std::string("composite term: unsupported pair (") + CompositeTerm::name(g) +
                          ", " + CompositeTerm::name(q) + ")");
    }
    return g;
}

}  // namespace

const char* CompositeTerm::name(GKind g) {
    switch (g) {
        case GKind::zero: return "zero";
        case GKind::l1: return "l1";
        case GKind::elastic_net: return "elastic-net";
    }
    return "?";
}

const char* CompositeTerm::name(QKind q) {
    switch (q) {
        case QKind::all_space: return "all-space";
        case QKind::box: return "box";
        case QKind::ball: return "euclidean-ball";
    }
    return "?";
}

CompositeTerm CompositeTerm::zero() { return CompositeTerm(); }

CompositeTerm CompositeTerm::l1(double weight) {
    if (weight < 0.0) throw ConfigError("composite term: l1 weight must be nonnegative");
    CompositeTerm t;
    t.g_kind_ = GKind::l1;
    t.w1_ = weight;
    return t;
}

CompositeTerm CompositeTerm::elastic_net(double l1_weight, double ridge_weight) {
    if (l1_weight < 0.0 || ridge_weight < 0.0) {
        throw ConfigError("composite term: elastic-net weights must be nonnegative");
    }
    CompositeTerm t;
    t.g_kind_ = GKind::elastic_net;
    t.w1_ = l1_weight;
    t.w2_ = ridge_weight;
    return t;
}

CompositeTerm CompositeTerm::box(double lo, double hi) {
    if (!(lo <= hi)) throw ConfigError("composite term: box requires lo <= hi");
    CompositeTerm t;
    t.q_kind_ = QKind::box;
    t.scalar_lo_ = lo;
    t.scalar_hi_ = hi;
    return t;
}

CompositeTerm CompositeTerm::box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
    if (lo.size() != hi.size() || lo.size() < 1 || (lo.array() > hi.array()).any()) {
        throw ConfigError("composite term: box bounds must match in size with lo <= hi");
    }
    CompositeTerm t;
    t.q_kind_ = QKind::box;
    t.lo_ = std::move(lo);
    t.hi_ = std::move(hi);
    return t;
}

CompositeTerm CompositeTerm::l1_box(double weight, double lo, double hi) {
    CompositeTerm t = box(lo, hi);
    if (weight < 0.0) throw ConfigError("composite term: l1 weight must be nonnegative");
    t.g_kind_ = GKind::l1;
    t.w1_ = weight;
    return t;
}

CompositeTerm CompositeTerm::l1_box(double weight, Eigen::VectorXd lo, Eigen::VectorXd hi) {
    CompositeTerm t = box(std::move(lo), std::move(hi));
    if (weight < 0.0) throw ConfigError("composite term: l1 weight must be nonnegative");
    t.g_kind_ = GKind::l1;
    t.w1_ = weight;
    return t;
}

CompositeTerm CompositeTerm::ball(double radius) {
    if (radius <= 0.0) throw ConfigError("composite term: ball radius must be positive");
    CompositeTerm t;
    t.q_kind_ = QKind::ball;
    t.ball_radius_ = radius;
    return t;
}

CompositeTerm CompositeTerm::ball(Eigen::VectorXd center, double radius) {
    CompositeTerm t = ball(radius);
    t.ball_center_ = std::move(center);
    return t;
}

CompositeTerm CompositeTerm::make(GKind g, double w1, double w2, QKind q, Eigen::VectorXd box_lo,
                                  Eigen::VectorXd box_hi, double scalar_lo, double scalar_hi,
                                  Eigen::VectorXd ball_center, double ball_radius) {
    validate_pair(g, q);
    CompositeTerm t;
    switch (q) {
        case QKind::all_space: break;
        case QKind::box:
            t = box_lo.size() > 0 ? box(std::move(box_lo), std::move(box_hi)) : box(scalar_lo, scalar_hi);
            break;
        case QKind::ball:
            t = ball_center.size() > 0 ? ball(std::move(ball_center), ball_radius) : ball(ball_radius);
            break;
    }
    if (g == GKind::l1 && w1 < 0.0) throw ConfigError("composite term: l1 weight must be nonnegative");
    if (g == GKind::elastic_net && (w1 < 0.0 || w2 < 0.0)) {
        throw ConfigError("composite term: elastic-net weights must be nonnegative");
    }
    t.g_kind_ = g;
    t.w1_ = (g == GKind::zero) ? 0.0 : w1;
    t.w2_ = (g == GKind::elastic_net) ? w2 : 0.0;
    return t;
}

void CompositeTerm::check_box_dim(Eigen::Index d, const char* where) const {
    if (lo_.size() > 0 && lo_.size() != d) {
        throw std::invalid_argument(std::string(where) + ": box bound dimension mismatch");
    }
}

double CompositeTerm::g_value(const Eigen::VectorXd& x) const {
    switch (g_kind_) {
        case GKind::zero: return 0.0;
        case GKind::l1: return w1_ * x.lpNorm<1>();
        case GKind::elastic_net: return w1_ * x.lpNorm<1>() + 0.5 * w2_ * x.squaredNorm();
    }
    return 0.0;
}

Eigen::VectorXd CompositeTerm::prox_point(double gamma, const Eigen::VectorXd& x) const {
    if (!(gamma > 0.0)) throw std::invalid_argument("prox_point: gamma must be positive");
    switch (q_kind_) {
        case QKind::all_space: {
            if (g_kind_ == GKind::zero) return x;
            Eigen::VectorXd out(x.size());
            const double threshold = gamma * w1_;
            const double shrink = 1.0 / (1.0 + gamma * w2_);  // 1 when not elastic-net
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                out[i] = soft_threshold(x[i], threshold) * shrink;
            }
            return out;
        }
        case QKind::box: {
            check_box_dim(x.size(), "prox_point");
            Eigen::VectorXd out(x.size());
            const double threshold = gamma * w1_;  // zero for plain projection
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                // the 1-d subproblem is convex, so clamping its unconstrained
                // minimizer to the interval is exact
                out[i] = std::clamp(soft_threshold(x[i], threshold), box_lo(i), box_hi(i));
            }
            return out;
        }
        case QKind::ball: {
            Eigen::VectorXd offset =
                ball_center_.size() > 0 ? Eigen::VectorXd(x - ball_center_) : Eigen::VectorXd(x);
            const double distance = offset.norm();
            if (distance > ball_radius_) offset *= ball_radius_ / distance;
            return ball_center_.size() > 0 ? Eigen::VectorXd(ball_center_ + offset) : offset;
        }
    }
    return x;
}

void CompositeTerm::prox_stacked(double gamma, const StackedVector& x, StackedVector& out) const {
    if (!(gamma > 0.0)) throw std::invalid_argument("prox_stacked: gamma must be positive");
    if (!out.same_shape(x)) out = StackedVector(x.nodes(), x.dim());
    par::for_each_index(x.nodes(), 8 * x.dim(), [&](std::int64_t i) {
        const int node = static_cast<int>(i);
        out.block(node) = prox_point(gamma, x.block(node));
    });
}

StackedVector CompositeTerm::prox_stacked(double gamma, const StackedVector& x) const {
    StackedVector out(x.nodes(), x.dim());
    prox_stacked(gamma, x, out);
    return out;
}

Eigen::VectorXd CompositeTerm::project_q(const Eigen::VectorXd& x) const {
    switch (q_kind_) {
        case QKind::all_space: return x;
        case QKind::box: {
            check_box_dim(x.size(), "project_q");
            Eigen::VectorXd out(x.size());
            for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = std::clamp(x[i], box_lo(i), box_hi(i));
            return out;
        }
        case QKind::ball: {
            Eigen::VectorXd offset =
                ball_center_.size() > 0 ? Eigen::VectorXd(x - ball_center_) : Eigen::VectorXd(x);
            const double distance = offset.norm();
            if (distance > ball_radius_) offset *= ball_radius_ / distance;
            return ball_center_.size() > 0 ? Eigen::VectorXd(ball_center_ + offset) : offset;
        }
    }
    return x;
}

bool CompositeTerm::contains(const Eigen::VectorXd& x, double tol) const {
    switch (q_kind_) {
        case QKind::all_space: return true;
        case QKind::box: {
            check_box_dim(x.size(), "contains");
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                if (x[i] < box_lo(i) - tol || x[i] > box_hi(i) + tol) return false;
            }
            return true;
        }
        case QKind::ball: {
            const double distance =
                ball_center_.size() > 0 ? (x - ball_center_).norm() : x.norm();
            return distance <= ball_radius_ + tol;
        }
    }
    return true;
}

}  // namespace decprox
