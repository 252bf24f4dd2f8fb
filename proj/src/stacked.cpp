#include "decprox/stacked.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "decprox/parallel.hpp"

namespace decprox {

StackedVector::StackedVector(int nodes, int dim) : nodes_(nodes), dim_(dim) {
    if (nodes < 1 || dim < 1) {
        throw std::invalid_argument("StackedVector: need nodes >= 1 and dim >= 1, got m=" +
                                    std::to_string(nodes) + " d=" + std::to_string(dim));
    }
    data_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nodes) * dim);
}

StackedVector StackedVector::broadcast(int nodes, const Eigen::VectorXd& block) {
    StackedVector v(nodes, static_cast<int>(block.size()));
    par::for_each_index(nodes, block.size(), [&](std::int64_t i) { v.block(static_cast<int>(i)) = block; });
    return v;
}

void require_same_shape(const StackedVector& a, const StackedVector& b, const char* where) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(where) + ": stacked shape mismatch (" +
                                    std::to_string(a.nodes()) + "x" + std::to_string(a.dim()) + " vs " +
                                    std::to_string(b.nodes()) + "x" + std::to_string(b.dim()) + ")");
    }
}

double dot(const StackedVector& a, const StackedVector& b) {
    require_same_shape(a, b, "dot");
    return a.flat().dot(b.flat());
}

void set_lincomb(StackedVector& out, double a, const StackedVector& x, double b, const StackedVector& y) {
    require_same_shape(x, y, "set_lincomb");
    if (!out.same_shape(x)) out = StackedVector(x.nodes(), x.dim());
    par::for_each_index(x.nodes(), 2 * x.dim(), [&](std::int64_t i) {
        const int node = static_cast<int>(i);
        out.block(node) = a * x.block(node) + b * y.block(node);
    });
}

void set_lincomb3(StackedVector& out, double a, const StackedVector& x, double b, const StackedVector& y,
                  double c, const StackedVector& z) {
    require_same_shape(x, y, "set_lincomb3");
    require_same_shape(x, z, "set_lincomb3");
    if (!out.same_shape(x)) out = StackedVector(x.nodes(), x.dim());
    par::for_each_index(x.nodes(), 3 * x.dim(), [&](std::int64_t i) {
        const int node = static_cast<int>(i);
        out.block(node) = a * x.block(node) + b * y.block(node) + c * z.block(node);
    });
}

Eigen::VectorXd block_mean(const StackedVector& v) {
    // serial over blocks in index order, so the sum is reduction-order stable
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(v.dim());
    for (int i = 0; i < v.nodes(); ++i) {
        mean += v.block(i);
    }
    mean /= static_cast<double>(v.nodes());
    return mean;
}

StackedVector project_consensus(const StackedVector& v) {
    return StackedVector::broadcast(v.nodes(), block_mean(v));
}

double consensus_error(const StackedVector& v) {
    const Eigen::VectorXd mean = block_mean(v);
    return distance_to_broadcast(v, mean);
}

double distance_to_broadcast(const StackedVector& v, const Eigen::VectorXd& y) {
    if (y.size() != v.dim()) {
        throw std::invalid_argument("distance_to_broadcast: dimension mismatch");
    }
    const double sq = par::indexed_sum(v.nodes(), 2 * v.dim(), [&](std::int64_t i) {
        return (v.block(static_cast<int>(i)) - y).squaredNorm();
    });
    return std::sqrt(sq);
}

}  // namespace decprox
