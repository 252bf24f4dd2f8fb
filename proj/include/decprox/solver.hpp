#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "decprox/network.hpp"
#include "decprox/objectives.hpp"
#include "decprox/prox.hpp"
#include "decprox/stacked.hpp"

namespace decprox {

/// Raised when an iterate norm passes the divergence guard.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Greater root of (A + alpha)(1 + A mu/2) = 2 L alpha^2.
double next_alpha(double big_a, double L_global, double mu_global);

struct CoeffStep {
    int k = 0;            // this step advances iterate k -> k+1
    double prev_A = 0.0;  // A^k
    double alpha = 0.0;   // alpha^{k+1}
    double A = 0.0;       // A^{k+1}
    double gamma = 0.0;   // alpha^{k+1} / (1 + A^{k+1} mu/2)
    double tau = 0.0;     // alpha^{k+1} / A^{k+1}, the convex-combination weight
    double mu_gamma = 0.0;  // (mu/2) gamma, the y-coefficient of the gradient step
};

/// The coupled (alpha, A, gamma) recurrence. A grows geometrically and
/// overflows double precision near condition number 1 long before N = 2000,
/// so the running state is kept in extended precision; the per-step ratios
/// the iteration actually consumes (tau, gamma) are O(1) doubles.
class CoefficientSchedule {
public:
    CoefficientSchedule(double L_global, double mu_global);

    CoeffStep next();
    CoeffStep peek() const;

    int steps_taken() const { return k_; }
    long double A_extended() const { return A_; }
    long double A_sum_extended() const { return sum_A_; }

private:
    CoeffStep compute_next() const;

    double L_;
    double mu_;
    long double A_ = 0.0L;
    long double sum_A_ = 0.0L;  // sum of A^1..A^k
    int k_ = 0;
};

struct SolverState {
    int k = 0;
    StackedVector x, u, y, v;
    Eigen::VectorXd mirror_x, mirror_u, mirror_y;  // the exact-averaging twin, one block
    double beta = 0.0;                             // max distance between the two trajectories
    CoefficientSchedule coefficients;
    CoeffStep last;               // coefficients used by the step that produced this state
    double last_grad_norm = std::numeric_limits<double>::quiet_NaN();  // ||grad F(y^{k})|| of that step
};

SolverState make_solver_state(const ObjectiveEnsemble& ens, const Eigen::VectorXd& x0);

/// One iteration: y (momentum combination), one stacked gradient, the
/// gradient step v, T gossip rounds, the blockwise prox, then x. The mirror
/// trajectory replays the same coefficients with exact averaging in place
/// of gossip and is driven by the same gradient, so beta measures purely
/// the consensus inexactness.
void step(SolverState& state, const ObjectiveEnsemble& ens, const CompositeTerm& term, MixingSource& network,
          int rounds);

struct IterationRecord {
    int k = 0;
    double gap = std::numeric_limits<double>::quiet_NaN();      // h(mean x) - h(x*) when x* known
    double dist_sq = std::numeric_limits<double>::quiet_NaN();  // ||mean x - x*||^2
    double cons_err = 0.0;
    double beta = 0.0;
    double alpha = 0.0;  // alpha^{k+1}, the next step's coefficients
    double A = 0.0;      // A^{k+1}
    double gamma = 0.0;  // gamma_k
    std::int64_t comm_rounds = 0;
    // not serialized: used by the certification checks
    double grad_norm_next = std::numeric_limits<double>::quiet_NaN();  // ||grad F(y^{k+1})||
    double dist_sq_stacked = std::numeric_limits<double>::quiet_NaN();
};

struct ReferenceSolution {
    Eigen::VectorXd x;
    double objective = 0.0;       // f(x*) + g(x*)
    double grad_norm_sq = 0.0;    // sum_i ||grad f_i(x*)||^2 (stacked)
    bool converged = false;
    long iterations = 0;
};

struct RunReport {
    std::vector<IterationRecord> rows;  // rows[k] describes the state after k steps
    int n_comp = 0;                     // iterations executed = stacked gradient calls
    std::int64_t n_comm = 0;            // communication rounds = n_comp * T
    int rounds_per_iteration = 0;
    double chi = std::numeric_limits<double>::quiet_NaN();
    double L_global = 0.0;
    double mu_global = 0.0;
    bool reached_epsilon = false;
    double A_final = 0.0;
    double A_sum = 0.0;
    std::int64_t grad_evals = 0;

    void write_csv(std::ostream& out) const;
};

struct SolverOptions {
    int iterations = 0;
    /// Stops early once ||mean x - x*||^2 falls below this (needs reference).
    double epsilon_target = -1.0;
    const ReferenceSolution* reference = nullptr;
    double divergence_limit = 1e12;
    double chi = std::numeric_limits<double>::quiet_NaN();  // recorded in the report
};

RunReport run(const ObjectiveEnsemble& ens, const CompositeTerm& term, MixingSource& network, int rounds,
              const Eigen::VectorXd& x0, const SolverOptions& options);

/// Centralized reference for x*: the closed-form solve when the problem is
/// quadratic and unconstrained with g = 0, otherwise plain proximal
/// gradient iterated to the requested accuracy. Independent of the
/// decentralized method; used only for reports and for selecting T.
ReferenceSolution reference_minimizer(const ObjectiveEnsemble& ens, const CompositeTerm& term,
                                      double tol = 1e-12, long max_iterations = 2000000);

/// Real-valued consensus-depth rule before rounding:
/// (chi/2) log(32 N^3 (a R0^2 + ||grad F(x*)||^2) / (eta mu_g L_g eps)).
double select_T_raw(double chi, int iterations, double epsilon, const EnsembleConstants& constants,
                    double r0_sq, double grad_norm_sq_at_opt);

/// ceil of the rule, floored at one round per iteration.
int select_T(double chi, int iterations, double epsilon, const EnsembleConstants& constants, double r0_sq,
             double grad_norm_sq_at_opt);

/// Harness default iteration budget: ceil(4 sqrt(L_g/mu_g) log(1/eps)).
int default_iteration_budget(const EnsembleConstants& constants, double epsilon);

}  // namespace decprox
