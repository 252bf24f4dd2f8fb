#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "decprox/prox.hpp"
#include "decprox/rng.hpp"
#include "decprox/stacked.hpp"

namespace decprox {

struct Edge {
    int a = 0;
    int b = 0;
};

/// A symmetric doubly stochastic mixing matrix stored as per-node neighbor
/// lists, applied as one round of message passing: each node combines its
/// own value with its neighbors' values. One application = one
/// communication round.
struct MixingMatrix {
    int size = 0;
    std::vector<double> self_weight;
    std::vector<std::vector<std::pair<int, double>>> neighbor_weights;  // sorted by neighbor index
    std::vector<Edge> edges;
    /// ||W - (1/m) 11^T||_2, certified at emission time.
    double deviation = 0.0;

    /// out_i = W_ii v_i + sum_j W_ij v_j over blocks (parallel over nodes).
    void apply(const StackedVector& in, StackedVector& out) const;
    /// Same action on a plain R^m vector (power iteration, tests).
    void apply_vector(const Eigen::VectorXd& in, Eigen::VectorXd& out) const;
    /// Dense form, used only by reference/oracle paths.
    Eigen::MatrixXd dense() const;
};

/// Metropolis rule on a simple undirected graph: W_ij = 1/(1 + max(deg_i,
/// deg_j)) across edges, diagonal takes the remainder. Doubly stochastic and
/// symmetric by construction. The lazy variant averages with the identity,
/// keeping the spectrum nonnegative.
MixingMatrix metropolis_weights(const std::vector<Edge>& edges, int node_count, bool lazy = false);

/// ||W - (1/m) 11^T||_2 by power iteration on the squared deviation
/// operator (symmetric, so the Rayleigh estimate approaches the norm from
/// below; the tolerance bounds the final increment).
double deviation_norm_power(const MixingMatrix& w, double tol = 1e-12, int max_iter = 100000);

/// A stream of mixing matrices. Matrices are consumed strictly in order and
/// never reused; cursor() counts emissions (= communication rounds spent).
class MixingSource {
public:
    virtual ~MixingSource() = default;
    virtual const MixingMatrix& next() = 0;
    virtual std::int64_t cursor() const = 0;
};

enum class Topology { complete, ring, path, ring_chords };

Topology topology_from_string(const std::string& name);
const char* topology_name(Topology t);

struct NetworkConfig {
    int m = 2;
    Topology topology = Topology::ring;
    double p_drop = 0.0;  // per-round independent edge removal probability
    bool lazy = false;
    std::uint64_t seed = 1;
};

/// Seeded time-varying topology process: a fixed base graph (ring, path,
/// complete or ring plus random chords) with per-round independent edge
/// drops. If a round's survivors are disconnected the base spanning
/// structure is re-added, so every emitted matrix contracts. Identical
/// seeds replay identical matrix sequences, which is what makes the
/// empirical contraction certificate binding.
class MixingSchedule final : public MixingSource {
public:
    explicit MixingSchedule(const NetworkConfig& config);

    const MixingMatrix& next() override;
    std::int64_t cursor() const override { return cursor_; }

    /// Installs the certified contraction bound; every further emission is
    /// re-checked against it and fails loudly when exceeded.
    void set_contraction_bound(double rho_max) { rho_bound_ = rho_max; }

    /// Streams one line per emitted round listing the edge set.
    void set_dump(std::ostream* sink) { dump_ = sink; }

    const NetworkConfig& config() const { return config_; }
    const std::vector<Edge>& base_edges() const { return base_edges_; }

private:
    void emit_checks();

    NetworkConfig config_;
    Rng rng_;
    std::vector<Edge> base_edges_;
    std::vector<Edge> spanning_edges_;
    MixingMatrix current_;
    bool is_static_ = false;
    bool static_built_ = false;
    std::int64_t cursor_ = 0;
    double rho_bound_ = -1.0;
    std::ostream* dump_ = nullptr;
};

/// Explicit matrix sequence, optionally cycled. Reference and test path.
class FixedSchedule final : public MixingSource {
public:
    explicit FixedSchedule(std::vector<MixingMatrix> matrices, bool cycle = true);
    const MixingMatrix& next() override;
    std::int64_t cursor() const override { return cursor_; }

private:
    std::vector<MixingMatrix> matrices_;
    bool cycle_;
    std::int64_t cursor_ = 0;
};

struct ChiCertificate {
    double chi = 1.0;
    double rho_max = 0.0;  // max over sampled rounds of ||W - P||_2
    int samples = 0;
    std::int64_t worst_round = -1;
};

/// Empirical graph condition number over sample_count rounds drawn from the
/// source: chi = 1 / (1 - rho_max). Fails (naming the round) if a sampled
/// round does not contract, i.e. its graph is disconnected.
ChiCertificate certify_chi(MixingSource& source, int sample_count);
/// Convenience overload: certifies a fresh schedule built from the config.
ChiCertificate certify_chi(const NetworkConfig& config, int sample_count);

struct ConsensusTrace {
    int rounds_used = 0;
    double pre_error = 0.0;
    double post_error = 0.0;
    std::int64_t first_round = -1;  // schedule cursor of the first matrix consumed
    std::int64_t last_round = -1;
    std::vector<double> round_errors;  // consensus error after each round
};

/// T rounds of gossip: v <- W^(c+T-1) ... W^(c) v, consuming matrices from
/// the source in order. Double stochasticity preserves the block mean.
StackedVector consensus(MixingSource& source, const StackedVector& v, int rounds,
                        ConsensusTrace* trace = nullptr);

}  // namespace decprox
