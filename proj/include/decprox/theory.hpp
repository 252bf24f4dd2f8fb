#pragma once

#include <Eigen/Dense>

#include "decprox/objectives.hpp"
#include "decprox/prox.hpp"
#include "decprox/stacked.hpp"

namespace decprox {

struct RunReport;

/// Inexactness constant of the first-order model built from scattered
/// evaluation points: (1/2m)(L_l^2/L_g + 2 L_l^2/mu_g + L_l - mu_l).
double model_eta(const EnsembleConstants& constants);

struct ModelValues {
    double f_delta = 0.0;
    double psi_delta = 0.0;
    double delta = 0.0;
};

/// First-order surrogate of the composite objective h = (1/m) sum f_i + g
/// anchored at the scattered points x_i, linearized toward y:
///   f_delta  = (1/m) sum [ f_i(x_i) + g(x_i) + <grad f_i(x_i), y - x_i>
///                          + (mu_l - 2 L_l^2/mu_g)/2 ||y - x_i||^2 ]
///   psi_delta = (1/m) sum [ <grad f_i(x_i), z - y> + g(z) - g(x_i) ]
///   delta     = eta sum ||x_i - y||^2
/// The quadratic coefficient of f_delta is typically negative; the slack
/// delta absorbs it. f_delta carries the composite anchor (1/m) sum g(x_i)
/// so that the sandwich below is exact when the x_i collapse onto y.
ModelValues model_values(const ObjectiveEnsemble& ens, const CompositeTerm& term, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& z, const StackedVector& x);

struct SandwichSlack {
    double lower = 0.0;  // h(z) - f_delta - psi_delta - (mu_g/4) ||z - y||^2
    double upper = 0.0;  // L_g ||z - y||^2 + delta - (h(z) - f_delta - psi_delta)
};

/// Both slacks are nonnegative (up to float noise) when the surrogate is a
/// valid (delta, 2 L_g, mu_g/2)-model of the composite objective.
SandwichSlack check_sandwich(const ObjectiveEnsemble& ens, const CompositeTerm& term, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& z, const StackedVector& x);

struct CoefficientBoundsReport {
    int prefixes_checked = 0;
    /// log A^n minus the guaranteed growth floor, at its tightest prefix.
    double min_growth_margin = 0.0;
    int growth_argmin = 0;
    /// (1 + 2 sqrt(L/mu)) minus sum A^{k+1} / A^n, at its tightest prefix.
    double min_ratio_margin = 0.0;
    int ratio_argmin = 0;
    bool pass = false;
};

/// Verifies, for every prefix n = 1..N of the coefficient recurrence,
///   A^n >= (1/2L) (1 + sqrt(mu/L)/4)^(2(n-1))   and
///   sum_{k=0}^{n-1} A^{k+1} / A^n <= 1 + 2 sqrt(L/mu).
/// Margins are computed in extended precision (the growth one in log space)
/// because A^N overflows double range for well-conditioned problems.
CoefficientBoundsReport check_coefficient_bounds(double L_global, double mu_global, int prefix_count);

/// eta * sum of beta_k^2 over the executed iterations of a run.
double delta_total(const RunReport& report, double eta);

/// Bookkeeping constants of the communication-depth analysis.
double envelope_a(const EnsembleConstants& constants);                    // 4 L^3 / mu
double envelope_b(const EnsembleConstants& constants);                    // (8 L^2/mu)(1 + 2 sqrt(L/mu))
double envelope_c(int iterations, double lambda);                        // N ((1+lambda)^(N-1) - 1)^2

struct EnvelopeCheck {
    double measured = 0.0;  // final stacked squared distance to the optimum
    double bound = 0.0;     // 2 R0^2/(A^N mu) + 8 (sum A) delta / (A^N mu)
    bool pass = false;
};

/// Distance envelope of a finished run against its recorded coefficients.
EnvelopeCheck check_envelope(const RunReport& report, double r0_sq, double delta_tot);

}  // namespace decprox
