#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "decprox/network.hpp"
#include "decprox/rng.hpp"
#include "decprox/stacked.hpp"

namespace test_support {

/// Central finite differences of a scalar function.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-6) {
    Eigen::VectorXd grad(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + h;
        const double up = f(probe);
        probe[i] = x[i] - h;
        const double down = f(probe);
        probe[i] = x[i];
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

/// Dense-matrix reference for one gossip round: (W (x) I) v.
inline decprox::StackedVector dense_mix(const Eigen::MatrixXd& w, const decprox::StackedVector& v) {
    decprox::StackedVector out(v.nodes(), v.dim());
    for (int i = 0; i < v.nodes(); ++i) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(v.dim());
        for (int j = 0; j < v.nodes(); ++j) {
            acc += w(i, j) * v.block(j);
        }
        out.block(i) = acc;
    }
    return out;
}

inline decprox::StackedVector random_stacked(decprox::Rng& rng, int nodes, int dim, double scale = 1.0) {
    decprox::StackedVector v(nodes, dim);
    for (int i = 0; i < nodes; ++i) v.block(i) = scale * rng.normal_vector(dim);
    return v;
}

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Two-class Gaussian toy in LibSVM text format, labels +1/-1, round-robin
/// friendly. Deterministic per seed.
inline void write_toy_libsvm(const std::string& path, int rows, int dim, std::uint64_t seed) {
    decprox::Rng rng(seed);
    const Eigen::VectorXd separator = rng.normal_vector(dim).normalized();
    std::ofstream out(path);
    for (int r = 0; r < rows; ++r) {
        const Eigen::VectorXd z = rng.normal_vector(dim);
        const double margin = separator.dot(z) + 0.3 * rng.normal();
        const int label = margin >= 0.0 ? 1 : -1;
        out << label;
        for (int j = 0; j < dim; ++j) {
            out << ' ' << (j + 1) << ':' << z[j];
        }
        out << '\n';
    }
}

}  // namespace test_support
