#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "decprox/network.hpp"
#include "decprox/objectives.hpp"
#include "decprox/prox.hpp"

namespace decprox {

/// One certification result: the tightest margin observed for a named
/// check, with the draw/prefix index where it occurred. margin >= 0 passes.
struct CheckLine {
    std::string name;
    std::int64_t index = -1;
    double margin = 0.0;
    bool pass = false;
};

struct CheckReport {
    std::vector<CheckLine> lines;
    bool pass = true;

    void add(std::string name, std::int64_t index, double margin, double tolerance = 0.0);
    void merge(const CheckReport& other);
};

/// Model sandwich over random draws: y, z Gaussian (z projected onto Q),
/// x_i = y + Gaussian spread at scales {0.01, 1, 10}, across seeded
/// quadratic ensembles with and without a composite term. Margins are the
/// two sandwich slacks plus the 1e-8 allowance.
CheckReport check_model_sandwich(int ensembles, int draws_per_ensemble, std::uint64_t seed);

/// Coefficient growth and ratio bounds at every prefix up to n = 2000 for
/// (L, mu) in {(1,1), (1,0.1), (1,0.01), (10,0.1)}.
CheckReport check_coefficient_suite();

/// Gossip contraction on a time-varying ring with random edge drops:
/// certifies the schedule, then verifies for random stacked vectors that
/// the consensus error after t rounds is within rho_max^t of the initial
/// error (plus 1e-9) for every t up to max_rounds.
CheckReport check_consensus_contraction(int nodes, int vectors, int max_rounds, std::uint64_t seed);

/// Every supported (g, Q) pair against an independent one-dimensional
/// search oracle on random points; margin is 1e-6 minus the worst
/// coordinate deviation.
CheckReport check_prox_oracle(int points_per_pair, std::uint64_t seed);

/// Scalar constrained prox by golden-section search (test oracle):
/// argmin over [lo, hi] of w1 |t| + (w2/2) t^2 + (t - x)^2 / (2 gamma).
double scalar_prox_search(double x, double gamma, double w1, double w2, double lo, double hi);

}  // namespace decprox
