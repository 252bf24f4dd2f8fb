#include "decprox/theory.hpp"

#include <cmath>
#include <stdexcept>

#include "decprox/parallel.hpp"
#include "decprox/solver.hpp"

namespace decprox {

double model_eta(const EnsembleConstants& c) {
    if (c.node_count < 1 || !(c.mu_local > 0.0)) {
        throw std::invalid_argument("model_eta: constants not certified");
    }
    const double Ll = c.L_local;
    return (Ll * Ll / c.L_global + 2.0 * Ll * Ll / c.mu_global + Ll - c.mu_local) /
           (2.0 * static_cast<double>(c.node_count));
}

ModelValues model_values(const ObjectiveEnsemble& ens, const CompositeTerm& term, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& z, const StackedVector& x) {
    if (y.size() != ens.dim() || z.size() != ens.dim() || x.dim() != ens.dim() || x.nodes() != ens.size()) {
        throw std::invalid_argument("model_values: dimension mismatch");
    }
    const EnsembleConstants& c = ens.constants();
    const double quad_coeff = 0.5 * (c.mu_local - 2.0 * c.L_local * c.L_local / c.mu_global);
    const double g_at_z = term.g_value(z);
    const int m = ens.size();

    double f_acc = 0.0;
    double psi_acc = 0.0;
    double spread = 0.0;
    Eigen::VectorXd grad(ens.dim());
    for (int i = 0; i < m; ++i) {
        const auto xi = x.block(i);
        ens.node(i).gradient(xi, grad);
        const Eigen::VectorXd to_y = y - xi;
        const double g_at_xi = term.g_value(xi);
        f_acc += ens.node(i).value(xi) + g_at_xi + grad.dot(to_y) + quad_coeff * to_y.squaredNorm();
        psi_acc += grad.dot(z - y) + g_at_z - g_at_xi;
        spread += to_y.squaredNorm();
    }

    ModelValues values;
    values.f_delta = f_acc / static_cast<double>(m);
    values.psi_delta = psi_acc / static_cast<double>(m);
    values.delta = model_eta(c) * spread;
    return values;
}

SandwichSlack check_sandwich(const ObjectiveEnsemble& ens, const CompositeTerm& term, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& z, const StackedVector& x) {
    const ModelValues model = model_values(ens, term, y, z, x);
    const double h_at_z = value_avg(ens, z) + term.g_value(z);
    const double center = h_at_z - model.f_delta - model.psi_delta;
    const double gap_sq = (z - y).squaredNorm();
    const EnsembleConstants& c = ens.constants();
    SandwichSlack slack;
    slack.lower = center - 0.25 * c.mu_global * gap_sq;
    slack.upper = c.L_global * gap_sq + model.delta - center;
    return slack;
}

CoefficientBoundsReport check_coefficient_bounds(double L_global, double mu_global, int prefix_count) {
    if (!(L_global > 0.0) || !(mu_global > 0.0) || mu_global > L_global || prefix_count < 1) {
        throw std::invalid_argument("check_coefficient_bounds: need 0 < mu <= L and N >= 1");
    }
    const long double L = L_global;
    const long double mu = mu_global;
    const long double log_growth_base = 2.0L * logl(1.0L + 0.25L * sqrtl(mu / L));
    const long double log_floor_0 = -logl(2.0L * L);
    const long double ratio_cap = 1.0L + 2.0L * sqrtl(L / mu);

    CoefficientBoundsReport report;
    report.prefixes_checked = prefix_count;
    report.min_growth_margin = std::numeric_limits<double>::infinity();
    report.min_ratio_margin = std::numeric_limits<double>::infinity();

    long double A = 0.0L;
    long double sum_A = 0.0L;
    for (int n = 1; n <= prefix_count; ++n) {
        const long double b = 1.0L + A * mu / 2.0L;
        const long double alpha = (b + sqrtl(b * b + 8.0L * L * A * b)) / (4.0L * L);
        A += alpha;
        sum_A += A;

        const double growth_margin =
            static_cast<double>(logl(A) - (log_floor_0 + static_cast<long double>(n - 1) * log_growth_base));
        if (growth_margin < report.min_growth_margin) {
            report.min_growth_margin = growth_margin;
            report.growth_argmin = n;
        }
        const double ratio_margin = static_cast<double>(ratio_cap - sum_A / A);
        if (ratio_margin < report.min_ratio_margin) {
            report.min_ratio_margin = ratio_margin;
            report.ratio_argmin = n;
        }
    }
    // the growth bound is an equality at n = 1; allow float noise only
    report.pass = report.min_growth_margin >= -1e-12 && report.min_ratio_margin >= -1e-12;
    return report;
}

double delta_total(const RunReport& report, double eta) {
    double acc = 0.0;
    for (int k = 0; k < report.n_comp; ++k) {
        const double beta = report.rows[static_cast<std::size_t>(k)].beta;
        acc += beta * beta;
    }
    return eta * acc;
}

double envelope_a(const EnsembleConstants& c) {
    return 4.0 * std::pow(c.L_global, 3) / c.mu_global;
}

double envelope_b(const EnsembleConstants& c) {
    const double kappa = c.L_global / c.mu_global;
    return 8.0 * c.L_global * c.L_global / c.mu_global * (1.0 + 2.0 * std::sqrt(kappa));
}

double envelope_c(int iterations, double lambda) {
    const double n = static_cast<double>(iterations);
    const double growth = std::pow(1.0 + lambda, n - 1.0) - 1.0;
    return n * growth * growth;
}

EnvelopeCheck check_envelope(const RunReport& report, double r0_sq, double delta_tot) {
    if (report.rows.empty() || report.n_comp < 1) {
        throw std::invalid_argument("check_envelope: empty run");
    }
    EnvelopeCheck check;
    check.measured = report.rows.back().dist_sq_stacked;
    if (!std::isfinite(check.measured)) {
        throw std::invalid_argument("check_envelope: run has no reference solution");
    }
    const double mu = report.mu_global;
    check.bound = 2.0 * r0_sq / (report.A_final * mu) + 8.0 * report.A_sum * delta_tot / (report.A_final * mu);
    check.pass = check.measured <= check.bound;
    return check;
}

}  // namespace decprox
