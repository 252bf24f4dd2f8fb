// Timing comparison between the serial reference path and the OpenMP
// block-parallel kernels. Both paths must produce bit-identical results;
// the benchmark verifies that while it measures.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <functional>

#include "decprox/network.hpp"
#include "decprox/objectives.hpp"
#include "decprox/parallel.hpp"
#include "decprox/prox.hpp"
#include "decprox/solver.hpp"

using namespace decprox;

namespace {

double time_ms(const std::function<void()>& body, int repeats) {
    const auto start = std::chrono::steady_clock::now();
    for (int r = 0; r < repeats; ++r) body();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count() / repeats;
}

struct Kernel {
    const char* name;
    std::function<Eigen::VectorXd()> run;  // returns the result for the bitwise comparison
    int repeats;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"decprox kernel benchmark: serial reference vs OpenMP"};
    int m = 32;
    int d = 400;
    int repeats = 20;
    int solver_iters = 10;
    app.add_option("--m", m, "node count");
    app.add_option("--d", d, "per-node dimension");
    app.add_option("--repeats", repeats, "repetitions per kernel");
    app.add_option("--solver-iters", solver_iters, "iterations for the end-to-end solver kernel");
    CLI11_PARSE(app, argc, argv);

    GeneratedProblem problem = generate_quadratic_ensemble(7, m, d, 25.0);
    const ObjectiveEnsemble& ens = problem.ensemble;
    const CompositeTerm term = CompositeTerm::l1_box(0.01, -2.0, 2.0);

    Rng rng(11);
    StackedVector point(m, d);
    for (int i = 0; i < m; ++i) point.block(i) = rng.normal_vector(d);

    const NetworkConfig netcfg{.m = m, .topology = Topology::ring_chords, .p_drop = 0.2, .lazy = false, .seed = 5};

    std::vector<Kernel> kernels;
    kernels.push_back({"grad_stacked", [&] { return grad_stacked(ens, point).flat(); }, repeats});
    kernels.push_back({"prox_stacked", [&] { return term.prox_stacked(0.37, point).flat(); }, repeats});
    // pre-emit the mixing matrices so spectra are certified outside the
    // timed region; the kernel under test is the gossip application itself
    std::vector<MixingMatrix> rounds;
    {
        MixingSchedule schedule(netcfg);
        for (int r = 0; r < 50; ++r) rounds.push_back(schedule.next());
    }
    kernels.push_back({"consensus(50 rounds)",
                       [&] {
                           FixedSchedule schedule(rounds);
                           return consensus(schedule, point, 50).flat();
                       },
                       std::max(1, repeats / 4)});
    kernels.push_back({"solver run",
                       [&] {
                           FixedSchedule schedule(rounds);
                           SolverOptions options;
                           options.iterations = solver_iters;
                           const RunReport report =
                               run(ens, term, schedule, 5, Eigen::VectorXd::Zero(d), options);
                           return Eigen::VectorXd::Constant(1, report.rows.back().cons_err);
                       },
                       1});

    std::printf("m = %d, d = %d, threads = %d\n", m, d, par::thread_count());
    std::printf("%-22s %12s %12s %9s %s\n", "kernel", "serial ms", "openmp ms", "speedup", "bitwise");
    for (const auto& kernel : kernels) {
        Eigen::VectorXd serial_result, parallel_result;
        double serial_ms, parallel_ms;
        {
            par::ScopedMode mode(false);
            serial_result = kernel.run();
            serial_ms = time_ms([&] { kernel.run(); }, kernel.repeats);
        }
        {
            par::ScopedMode mode(true);
            parallel_result = kernel.run();
            parallel_ms = time_ms([&] { kernel.run(); }, kernel.repeats);
        }
        const bool identical = serial_result.size() == parallel_result.size() &&
                               std::memcmp(serial_result.data(), parallel_result.data(),
                                           sizeof(double) * static_cast<std::size_t>(serial_result.size())) == 0;
        std::printf("%-22s %12.3f %12.3f %8.2fx %s\n", kernel.name, serial_ms, parallel_ms,
                    serial_ms / parallel_ms, identical ? "ok" : "MISMATCH");
        if (!identical) return 1;
    }
    return 0;
}
