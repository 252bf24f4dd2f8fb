#include "decprox/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>

#include "decprox/parallel.hpp"

namespace decprox {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

bool is_connected(const std::vector<Edge>& edges, int m) {
    if (m <= 1) return true;
    UnionFind uf(m);
    for (const auto& e : edges) uf.unite(e.a, e.b);
    const int root = uf.find(0);
    for (int i = 1; i < m; ++i) {
        if (uf.find(i) != root) return false;
    }
    return true;
}

std::vector<Edge> sorted_unique(std::vector<Edge> edges) {
    for (auto& e : edges) {
        if (e.a > e.b) std::swap(e.a, e.b);
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
        return x.a != y.a ? x.a < y.a : x.b < y.b;
    });
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](const Edge& x, const Edge& y) { return x.a == y.a && x.b == y.b; }),
                edges.end());
    return edges;
}

}  // namespace

void MixingMatrix::apply(const StackedVector& in, StackedVector& out) const {
    if (in.nodes() != size) throw std::invalid_argument("MixingMatrix::apply: node count mismatch");
    if (!out.same_shape(in)) out = StackedVector(in.nodes(), in.dim());
    par::for_each_index(size, 6 * in.dim(), [&](std::int64_t i) {
        const int node = static_cast<int>(i);
        out.block(node) = self_weight[static_cast<std::size_t>(node)] * in.block(node);
        for (const auto& [neighbor, weight] : neighbor_weights[static_cast<std::size_t>(node)]) {
            out.block(node) += weight * in.block(neighbor);
        }
    });
}

void MixingMatrix::apply_vector(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
    out.resize(size);
    for (int i = 0; i < size; ++i) {
        double acc = self_weight[static_cast<std::size_t>(i)] * in[i];
        for (const auto& [neighbor, weight] : neighbor_weights[static_cast<std::size_t>(i)]) {
            acc += weight * in[neighbor];
        }
        out[i] = acc;
    }
}

Eigen::MatrixXd MixingMatrix::dense() const {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(size, size);
    for (int i = 0; i < size; ++i) {
        w(i, i) = self_weight[static_cast<std::size_t>(i)];
        for (const auto& [neighbor, weight] : neighbor_weights[static_cast<std::size_t>(i)]) {
            w(i, neighbor) = weight;
        }
    }
    return w;
}

MixingMatrix metropolis_weights(const std::vector<Edge>& edges, int node_count, bool lazy) {
    if (node_count < 1) throw std::invalid_argument("metropolis_weights: need at least one node");
    std::set<std::pair<int, int>> seen;
    std::vector<int> degree(static_cast<std::size_t>(node_count), 0);
    for (const auto& e : edges) {
        if (e.a < 0 || e.b < 0 || e.a >= node_count || e.b >= node_count) {
            throw std::invalid_argument("metropolis_weights: edge endpoint out of range");
        }
        if (e.a == e.b) throw std::invalid_argument("metropolis_weights: self-loops are rejected");
        const auto key = std::minmax(e.a, e.b);
        if (!seen.insert(key).second) {
            throw std::invalid_argument("metropolis_weights: duplicate edge " + std::to_string(key.first) +
                                        "-" + std::to_string(key.second));
        }
        ++degree[static_cast<std::size_t>(e.a)];
        ++degree[static_cast<std::size_t>(e.b)];
    }

    MixingMatrix w;
    w.size = node_count;
    w.self_weight.assign(static_cast<std::size_t>(node_count), 1.0);
    w.neighbor_weights.assign(static_cast<std::size_t>(node_count), {});
    w.edges.reserve(seen.size());
    for (const auto& [a, b] : seen) {
        const double weight = 1.0 / (1.0 + static_cast<double>(std::max(degree[static_cast<std::size_t>(a)],
                                                                        degree[static_cast<std::size_t>(b)])));
        w.neighbor_weights[static_cast<std::size_t>(a)].emplace_back(b, weight);
        w.neighbor_weights[static_cast<std::size_t>(b)].emplace_back(a, weight);
        w.edges.push_back(Edge{a, b});
    }
    for (int i = 0; i < node_count; ++i) {
        auto& list = w.neighbor_weights[static_cast<std::size_t>(i)];
        std::sort(list.begin(), list.end());
        double off_diagonal = 0.0;
        for (const auto& [_, weight] : list) off_diagonal += weight;
        w.self_weight[static_cast<std::size_t>(i)] = 1.0 - off_diagonal;
    }
    if (lazy) {
        for (int i = 0; i < node_count; ++i) {
            w.self_weight[static_cast<std::size_t>(i)] = 0.5 * (w.self_weight[static_cast<std::size_t>(i)] + 1.0);
            for (auto& [_, weight] : w.neighbor_weights[static_cast<std::size_t>(i)]) weight *= 0.5;
        }
    }
    return w;
}

double deviation_norm_power(const MixingMatrix& w, double tol, int max_iter) {
    const int m = w.size;
    if (m == 1) return 0.0;
    Rng rng(0x5eed0000u ^ static_cast<std::uint64_t>(m));
    Eigen::VectorXd q = rng.normal_vector(m);
    q.array() -= q.mean();
    if (q.norm() < 1e-300) q[0] = 1.0;
    q.normalize();

    Eigen::VectorXd t(m);
    auto deviation_apply = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
        w.apply_vector(in, out);
        out.array() -= in.mean();
    };

    double estimate = 0.0;
    for (int iter = 0; iter < max_iter; ++iter) {
        deviation_apply(q, t);
        const double norm_t = t.norm();
        if (norm_t < 1e-300) return 0.0;  // already in the kernel: W acts as exact averaging
        const double next = norm_t;       // ||M q|| with ||q|| = 1, approaches the norm from below
        Eigen::VectorXd t2(m);
        deviation_apply(t, t2);           // squared operator keeps the iteration stable under sign flips
        const double norm_t2 = t2.norm();
        if (norm_t2 < 1e-300) return next;
        q = t2 / norm_t2;
        if (iter > 0 && std::abs(next - estimate) <= tol * std::max(1.0, next)) {
            return next;
        }
        estimate = next;
    }
    return estimate;
}

Topology topology_from_string(const std::string& name) {
    if (name == "complete") return Topology::complete;
    if (name == "ring") return Topology::ring;
    if (name == "path") return Topology::path;
    if (name == "ring-chords") return Topology::ring_chords;
    throw ConfigError("network.topology: unknown topology '" + name + "'");
}

const char* topology_name(Topology t) {
    switch (t) {
        case Topology::complete: return "complete";
        case Topology::ring: return "ring";
        case Topology::path: return "path";
        case Topology::ring_chords: return "ring-chords";
    }
    return "?";
}

MixingSchedule::MixingSchedule(const NetworkConfig& config) : config_(config), rng_(config.seed) {
    if (config_.m < 1) throw ConfigError("network.m: need at least one node");
    if (config_.p_drop < 0.0 || config_.p_drop >= 1.0) {
        throw ConfigError("network.p_drop: must lie in [0, 1)");
    }
    const int m = config_.m;

    std::vector<Edge> ring;
    for (int i = 0; i + 1 < m; ++i) ring.push_back(Edge{i, i + 1});
    if (m > 2) ring.push_back(Edge{m - 1, 0});

    switch (config_.topology) {
        case Topology::ring:
            base_edges_ = ring;
            spanning_edges_ = ring;
            break;
        case Topology::path: {
            std::vector<Edge> path;
            for (int i = 0; i + 1 < m; ++i) path.push_back(Edge{i, i + 1});
            base_edges_ = path;
            spanning_edges_ = path;
            break;
        }
        case Topology::complete: {
            for (int i = 0; i < m; ++i)
                for (int j = i + 1; j < m; ++j) base_edges_.push_back(Edge{i, j});
            spanning_edges_ = ring;
            break;
        }
        case Topology::ring_chords: {
            base_edges_ = ring;
            spanning_edges_ = ring;
            const int chords = m / 4;
            std::set<std::pair<int, int>> used;
            for (const auto& e : ring) used.insert(std::minmax(e.a, e.b));
            int added = 0;
            int attempts = 0;
            while (added < chords && attempts < 64 * (chords + 1)) {
                ++attempts;
                const int a = static_cast<int>(rng_.uniform_int(0, m - 1));
                const int b = static_cast<int>(rng_.uniform_int(0, m - 1));
                if (a == b) continue;
                if (!used.insert(std::minmax(a, b)).second) continue;
                base_edges_.push_back(Edge{std::min(a, b), std::max(a, b)});
                ++added;
            }
            break;
        }
    }
    base_edges_ = sorted_unique(base_edges_);
    spanning_edges_ = sorted_unique(spanning_edges_);
    is_static_ = config_.p_drop == 0.0;
}

void MixingSchedule::emit_checks() {
    current_.deviation = deviation_norm_power(current_);
    if (current_.deviation >= 1.0 - 1e-12) {
        throw ConfigError("mixing schedule: round " + std::to_string(cursor_) +
                          " does not contract (graph disconnected?)");
    }
    if (rho_bound_ >= 0.0 && current_.deviation > rho_bound_ + 1e-12) {
        throw ConfigError("mixing schedule: round " + std::to_string(cursor_) + " exceeds certified bound (" +
                          std::to_string(current_.deviation) + " > " + std::to_string(rho_bound_) + ")");
    }
}

const MixingMatrix& MixingSchedule::next() {
    if (is_static_) {
        if (!static_built_) {
            current_ = metropolis_weights(base_edges_, config_.m, config_.lazy);
            emit_checks();
            static_built_ = true;
        } else if (rho_bound_ >= 0.0 && current_.deviation > rho_bound_ + 1e-12) {
            throw ConfigError("mixing schedule: certified bound below the static matrix deviation");
        }
    } else {
        std::vector<Edge> kept;
        kept.reserve(base_edges_.size());
        for (const auto& e : base_edges_) {
            if (rng_.uniform() >= config_.p_drop) kept.push_back(e);
        }
        if (!is_connected(kept, config_.m)) {
            // re-add the base spanning structure; the round stays connected
            kept.insert(kept.end(), spanning_edges_.begin(), spanning_edges_.end());
            kept = sorted_unique(kept);
        }
        current_ = metropolis_weights(kept, config_.m, config_.lazy);
        emit_checks();
    }
    if (dump_ != nullptr) {
        (*dump_) << cursor_ << ':';
        for (const auto& e : current_.edges) (*dump_) << ' ' << e.a << '-' << e.b;
        (*dump_) << '\n';
    }
    ++cursor_;
    return current_;
}

FixedSchedule::FixedSchedule(std::vector<MixingMatrix> matrices, bool cycle)
    : matrices_(std::move(matrices)), cycle_(cycle) {
    if (matrices_.empty()) throw std::invalid_argument("FixedSchedule: empty matrix list");
    for (auto& w : matrices_) {
        if (w.deviation == 0.0) w.deviation = deviation_norm_power(w);
    }
}

const MixingMatrix& FixedSchedule::next() {
    const std::size_t count = matrices_.size();
    std::size_t index = static_cast<std::size_t>(cursor_);
    if (index >= count) {
        if (!cycle_) throw std::runtime_error("FixedSchedule: matrix sequence exhausted");
        index %= count;
    }
    ++cursor_;
    return matrices_[index];
}

ChiCertificate certify_chi(MixingSource& source, int sample_count) {
    if (sample_count < 1) throw std::invalid_argument("certify_chi: need sample_count >= 1");
    ChiCertificate cert;
    cert.samples = sample_count;
    for (int s = 0; s < sample_count; ++s) {
        const std::int64_t round = source.cursor();
        const MixingMatrix& w = source.next();
        if (w.deviation >= 1.0 - 1e-12) {
            throw ConfigError("certify_chi: round " + std::to_string(round) +
                              " does not contract (graph disconnected?)");
        }
        if (w.deviation > cert.rho_max) {
            cert.rho_max = w.deviation;
            cert.worst_round = round;
        }
    }
    cert.chi = 1.0 / (1.0 - cert.rho_max);
    return cert;
}

ChiCertificate certify_chi(const NetworkConfig& config, int sample_count) {
    // a static schedule repeats one matrix, so a single sample certifies it
    MixingSchedule schedule(config);
    const int samples = config.p_drop == 0.0 ? 1 : sample_count;
    ChiCertificate cert = certify_chi(schedule, samples);
    cert.samples = samples;
    return cert;
}

StackedVector consensus(MixingSource& source, const StackedVector& v, int rounds, ConsensusTrace* trace) {
    if (rounds < 0) throw std::invalid_argument("consensus: rounds must be nonnegative");
    StackedVector current = v;
    StackedVector scratch(v.nodes(), v.dim());
    if (trace != nullptr) {
        trace->rounds_used = rounds;
        trace->pre_error = consensus_error(v);
        trace->first_round = rounds > 0 ? source.cursor() : -1;
        trace->round_errors.clear();
        trace->round_errors.reserve(static_cast<std::size_t>(rounds));
    }
    for (int t = 0; t < rounds; ++t) {
        const MixingMatrix& w = source.next();
        w.apply(current, scratch);
        std::swap(current, scratch);
        if (trace != nullptr) trace->round_errors.push_back(consensus_error(current));
    }
    if (trace != nullptr) {
        trace->last_round = rounds > 0 ? source.cursor() - 1 : -1;
        trace->post_error = trace->round_errors.empty() ? trace->pre_error : trace->round_errors.back();
    }
    return current;
}

}  // namespace decprox
