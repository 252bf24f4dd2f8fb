#include "decprox/solver.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "decprox/parallel.hpp"
#include "decprox/theory.hpp"

namespace decprox {

namespace {

void require_finite(double value, const char* what) {
    if (!std::isfinite(value)) {
        throw std::invalid_argument(std::string(what) + ": non-finite input");
    }
}

long double next_alpha_extended(long double big_a, long double L, long double mu) {
    const long double b = 1.0L + big_a * mu / 2.0L;
    return (b + sqrtl(b * b + 8.0L * L * big_a * b)) / (4.0L * L);
}

void format_float(std::string& line, double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    line += buffer;
}

}  // namespace

double next_alpha(double big_a, double L_global, double mu_global) {
    require_finite(big_a, "next_alpha");
    require_finite(L_global, "next_alpha");
    require_finite(mu_global, "next_alpha");
    if (big_a < 0.0 || L_global <= 0.0 || mu_global <= 0.0 || mu_global > L_global) {
        throw std::invalid_argument("next_alpha: need A >= 0 and 0 < mu <= L");
    }
    return static_cast<double>(next_alpha_extended(big_a, L_global, mu_global));
}

CoefficientSchedule::CoefficientSchedule(double L_global, double mu_global) : L_(L_global), mu_(mu_global) {
    if (!(L_global > 0.0) || !(mu_global > 0.0) || mu_global > L_global) {
        throw std::invalid_argument("CoefficientSchedule: need 0 < mu <= L");
    }
}

CoeffStep CoefficientSchedule::compute_next() const {
    const long double alpha = next_alpha_extended(A_, L_, mu_);
    const long double A_next = A_ + alpha;
    const long double gamma = alpha / (1.0L + A_next * mu_ / 2.0L);
    CoeffStep step;
    step.k = k_;
    step.prev_A = static_cast<double>(A_);
    step.alpha = static_cast<double>(alpha);
    step.A = static_cast<double>(A_next);
    step.gamma = static_cast<double>(gamma);
    step.tau = static_cast<double>(alpha / A_next);
    step.mu_gamma = static_cast<double>(gamma * (mu_ / 2.0L));
    return step;
}

CoeffStep CoefficientSchedule::peek() const { return compute_next(); }

CoeffStep CoefficientSchedule::next() {
    const CoeffStep step = compute_next();
    const long double alpha = next_alpha_extended(A_, L_, mu_);
    A_ += alpha;
    sum_A_ += A_;
    ++k_;
    return step;
}

SolverState make_solver_state(const ObjectiveEnsemble& ens, const Eigen::VectorXd& x0)
{
    if (x0.size() != ens.dim()) {
        throw std::invalid_argument("make_solver_state: x0 dimension does not match the ensemble");
    }
    SolverState state{.k = 0,
                      .x = StackedVector::broadcast(ens.size(), x0),
                      .u = StackedVector::broadcast(ens.size(), x0),
                      .y = StackedVector::broadcast(ens.size(), x0),
                      .v = StackedVector(ens.size(), ens.dim()),
                      .mirror_x = x0,
                      .mirror_u = x0,
                      .mirror_y = x0,
                      .beta = 0.0,
                      .coefficients = CoefficientSchedule(ens.constants().L_global, ens.constants().mu_global),
                      .last = CoeffStep{},
                      .last_grad_norm = std::numeric_limits<double>::quiet_NaN()};
    return state;
}

void step(SolverState& state, const ObjectiveEnsemble& ens, const CompositeTerm& term, MixingSource& network,
          int rounds) {
    const CoeffStep c = state.coefficients.next();
    const double tau = c.tau;

    // momentum combination
    set_lincomb(state.y, tau, state.u, 1.0 - tau, state.x);
    state.mirror_y = tau * state.mirror_u + (1.0 - tau) * state.mirror_x;

    // the single oracle round of this iteration
    const StackedVector gradient = grad_stacked(ens, state.y);
    state.last_grad_norm = gradient.norm();

    // gradient step, then T rounds of gossip, then the blockwise prox
    set_lincomb3(state.v, c.mu_gamma, state.y, 1.0 - c.mu_gamma, state.u, -c.gamma, gradient);
    const StackedVector mixed = consensus(network, state.v, rounds);
    term.prox_stacked(c.gamma, mixed, state.u);
    set_lincomb(state.x, tau, state.u, 1.0 - tau, state.x);

    // exact-averaging twin, driven by the same gradient: the averaged
    // gradient step needs no gossip, so its iterates stay in the consensus set
    const Eigen::VectorXd mean_gradient = block_mean(gradient);
    const Eigen::VectorXd mirror_v =
        c.mu_gamma * state.mirror_y + (1.0 - c.mu_gamma) * state.mirror_u - c.gamma * mean_gradient;
    state.mirror_u = term.prox_point(c.gamma, mirror_v);
    state.mirror_x = tau * state.mirror_u + (1.0 - tau) * state.mirror_x;

    state.beta = std::max({distance_to_broadcast(state.y, state.mirror_y),
                           distance_to_broadcast(state.u, state.mirror_u),
                           distance_to_broadcast(state.x, state.mirror_x)});
    state.last = c;
    ++state.k;
}

namespace {

IterationRecord make_record(const SolverState& state, const ObjectiveEnsemble& ens, const CompositeTerm& term,
                            const SolverOptions& options, int rounds) {
    IterationRecord rec;
    rec.k = state.k;
    rec.cons_err = consensus_error(state.x);
    rec.beta = state.beta;
    const CoeffStep upcoming = state.coefficients.peek();
    rec.alpha = upcoming.alpha;
    rec.A = upcoming.A;
    rec.gamma = upcoming.gamma;
    rec.comm_rounds = static_cast<std::int64_t>(state.k) * rounds;
    if (options.reference != nullptr) {
        const Eigen::VectorXd mean = block_mean(state.x);
        rec.gap = value_avg(ens, mean) + term.g_value(mean) - options.reference->objective;
        rec.dist_sq = (mean - options.reference->x).squaredNorm();
        rec.dist_sq_stacked =
            std::pow(distance_to_broadcast(state.x, options.reference->x), 2);
    }
    return rec;
}

}  // namespace

void RunReport::write_csv(std::ostream& out) const {
    out << "k,gap,dist_sq,cons_err,beta,alpha,A,gamma,comm_rounds\n";
    for (const auto& rec : rows) {
        std::string line = std::to_string(rec.k);
        line += ',';
        format_float(line, rec.gap);
        line += ',';
        format_float(line, rec.dist_sq);
        line += ',';
        format_float(line, rec.cons_err);
        line += ',';
        format_float(line, rec.beta);
        line += ',';
        format_float(line, rec.alpha);
        line += ',';
        format_float(line, rec.A);
        line += ',';
        format_float(line, rec.gamma);
        line += ',';
        line += std::to_string(rec.comm_rounds);
        line += '\n';
        out << line;
    }
}

RunReport run(const ObjectiveEnsemble& ens, const CompositeTerm& term, MixingSource& network, int rounds,
              const Eigen::VectorXd& x0, const SolverOptions& options) {
    if (options.iterations < 0) throw std::invalid_argument("run: iterations must be nonnegative");
    if (rounds < 0) throw std::invalid_argument("run: rounds per iteration must be nonnegative");

    SolverState state = make_solver_state(ens, x0);
    RunReport report;
    report.rounds_per_iteration = rounds;
    report.chi = options.chi;
    report.L_global = ens.constants().L_global;
    report.mu_global = ens.constants().mu_global;
    report.rows.reserve(static_cast<std::size_t>(options.iterations) + 1);
    report.rows.push_back(make_record(state, ens, term, options, rounds));

    const std::int64_t cursor_start = network.cursor();
    for (int k = 0; k < options.iterations; ++k) {
        step(state, ens, term, network, rounds);
        ++report.grad_evals;
        report.rows.back().grad_norm_next = state.last_grad_norm;
        report.rows.push_back(make_record(state, ens, term, options, rounds));

        const double iterate_norm = state.x.norm();
        if (!(iterate_norm <= options.divergence_limit)) {
            char msg[160];
            std::snprintf(msg, sizeof msg,
                          "divergence guard: ||x|| = %.3e at iteration %d (T = %d, chi = %.6g)", iterate_norm,
                          state.k, rounds, options.chi);
            throw DivergenceError(msg);
        }
        if (options.epsilon_target > 0.0 && options.reference != nullptr &&
            report.rows.back().dist_sq <= options.epsilon_target) {
            report.reached_epsilon = true;
            break;
        }
    }
    report.n_comp = state.k;
    report.n_comm = static_cast<std::int64_t>(state.k) * rounds;
    if (network.cursor() - cursor_start != report.n_comm) {
        throw std::logic_error("run: schedule cursor does not match the communication accounting");
    }
    report.A_final = static_cast<double>(state.coefficients.A_extended());
    report.A_sum = static_cast<double>(state.coefficients.A_sum_extended());
    return report;
}

ReferenceSolution reference_minimizer(const ObjectiveEnsemble& ens, const CompositeTerm& term, double tol,
                                      long max_iterations) {
    ReferenceSolution ref;
    const int d = ens.dim();

    bool all_quadratic = true;
    for (int i = 0; i < ens.size(); ++i) {
        if (ens.node(i).kind() != NodeObjective::Kind::quadratic) all_quadratic = false;
    }

    if (all_quadratic && term.g_kind() == CompositeTerm::GKind::zero &&
        term.q_kind() == CompositeTerm::QKind::all_space) {
        Eigen::MatrixXd matrix_sum = Eigen::MatrixXd::Zero(d, d);
        Eigen::VectorXd shift_sum = Eigen::VectorXd::Zero(d);
        for (int i = 0; i < ens.size(); ++i) {
            matrix_sum += ens.node(i).quadratic_data().matrix;
            shift_sum += ens.node(i).quadratic_data().shift;
        }
        ref.x = Eigen::LDLT<Eigen::MatrixXd>(matrix_sum).solve(shift_sum);
        ref.converged = true;
    } else {
        // plain proximal gradient on h = (1/m) sum f_i + g; a different
        // algorithm family than the method under test
        double smoothness;
        if (all_quadratic) {
            Eigen::MatrixXd mean_matrix = Eigen::MatrixXd::Zero(d, d);
            for (int i = 0; i < ens.size(); ++i) mean_matrix += ens.node(i).quadratic_data().matrix;
            mean_matrix /= static_cast<double>(ens.size());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(mean_matrix, Eigen::EigenvaluesOnly);
            smoothness = eig.eigenvalues().maxCoeff();
        } else {
            smoothness = ens.constants().L_global;
        }
        const double mu = ens.constants().mu_global;
        const double step_size = 1.0 / smoothness;
        const double target = std::max(tol * mu, 1e-15);

        Eigen::VectorXd x = term.project_q(Eigen::VectorXd::Zero(d));
        for (long it = 0; it < max_iterations; ++it) {
            const Eigen::VectorXd next = term.prox_point(step_size, x - step_size * grad_avg(ens, x));
            const double mapping_norm = (x - next).norm() / step_size;
            x = next;
            ref.iterations = it + 1;
            if (mapping_norm <= target) {
                ref.converged = true;
                break;
            }
        }
        ref.x = x;
    }

    ref.objective = value_avg(ens, ref.x) + term.g_value(ref.x);
    ref.grad_norm_sq = grad_stacked(ens, StackedVector::broadcast(ens.size(), ref.x)).squared_norm();
    return ref;
}

double select_T_raw(double chi, int iterations, double epsilon, const EnsembleConstants& constants,
                    double r0_sq, double grad_norm_sq_at_opt) {
    if (!(chi >= 1.0) || iterations < 1 || !(epsilon > 0.0) || !(r0_sq >= 0.0) ||
        !(grad_norm_sq_at_opt >= 0.0)) {
        throw std::invalid_argument("select_T: need chi >= 1, N >= 1, eps > 0 and nonnegative magnitudes");
    }
    const double eta = model_eta(constants);
    const double a = 4.0 * std::pow(constants.L_global, 3) / constants.mu_global;
    const double n = static_cast<double>(iterations);
    const double arg = 32.0 * n * n * n * (a * r0_sq + grad_norm_sq_at_opt) /
                       (eta * constants.mu_global * constants.L_global * epsilon);
    if (!std::isfinite(arg)) throw std::invalid_argument("select_T: non-finite log argument");
    if (arg <= 1.0) return 0.0;  // already accurate enough; the caller clamps to one round
    return 0.5 * chi * std::log(arg);
}

int select_T(double chi, int iterations, double epsilon, const EnsembleConstants& constants, double r0_sq,
             double grad_norm_sq_at_opt) {
    const double raw = select_T_raw(chi, iterations, epsilon, constants, r0_sq, grad_norm_sq_at_opt);
    return std::max(1, static_cast<int>(std::ceil(raw)));
}

int default_iteration_budget(const EnsembleConstants& constants, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("default_iteration_budget: epsilon must be positive");
    const double kappa = constants.L_global / constants.mu_global;
    return std::max(1, static_cast<int>(std::ceil(4.0 * std::sqrt(kappa) * std::log(1.0 / epsilon))));
}

}  // namespace decprox
