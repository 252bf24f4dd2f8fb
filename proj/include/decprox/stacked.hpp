#pragma once

#include <Eigen/Dense>

namespace decprox {

/// An element of R^{md} held as m contiguous node blocks of dimension d.
/// All arithmetic is defined only between vectors of equal shape.
class StackedVector {
public:
    StackedVector() = default;
    StackedVector(int nodes, int dim);

    /// Stacks m copies of a single d-vector (a point of the consensus set).
    static StackedVector broadcast(int nodes, const Eigen::VectorXd& block);

    int nodes() const { return nodes_; }
    int dim() const { return dim_; }
    bool same_shape(const StackedVector& other) const {
        return nodes_ == other.nodes_ && dim_ == other.dim_;
    }

    Eigen::Ref<Eigen::VectorXd> block(int i) { return data_.segment(static_cast<Eigen::Index>(i) * dim_, dim_); }
    Eigen::Ref<const Eigen::VectorXd> block(int i) const {
        return data_.segment(static_cast<Eigen::Index>(i) * dim_, dim_);
    }

    Eigen::VectorXd& flat() { return data_; }
    const Eigen::VectorXd& flat() const { return data_; }

    void set_zero() { data_.setZero(); }
    double squared_norm() const { return data_.squaredNorm(); }
    double norm() const { return data_.norm(); }

private:
    int nodes_ = 0;
    int dim_ = 0;
    Eigen::VectorXd data_;
};

void require_same_shape(const StackedVector& a, const StackedVector& b, const char* where);

double dot(const StackedVector& a, const StackedVector& b);

/// out = a*x + b*y, computed block-parallel (elementwise, deterministic).
/// out may alias x or y.
void set_lincomb(StackedVector& out, double a, const StackedVector& x, double b, const StackedVector& y);

/// out = a*x + b*y + c*z (used for the gradient step), aliasing allowed.
void set_lincomb3(StackedVector& out, double a, const StackedVector& x, double b, const StackedVector& y,
                  double c, const StackedVector& z);

/// Mean of the node blocks, (1/m) sum_i v_i.
Eigen::VectorXd block_mean(const StackedVector& v);

/// Projection onto the consensus set: every block becomes the block mean.
StackedVector project_consensus(const StackedVector& v);

/// Distance to the consensus set, ||v - P v||_2.
double consensus_error(const StackedVector& v);

/// sqrt(sum_i ||v_i - y||^2) for a stacked v against a single d-vector y.
double distance_to_broadcast(const StackedVector& v, const Eigen::VectorXd& y);

/// The operator P = (1/m) 11^T (x) I acting on stacked vectors.
struct AveragingProjector {
    StackedVector operator()(const StackedVector& v) const { return project_consensus(v); }
};

}  // namespace decprox
