#pragma once

#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace decprox::par {

/// Returns true when block-parallel kernels run with OpenMP.
bool enabled();

/// Toggles the OpenMP kernels at runtime (the serial path is the reference
/// implementation; results are bit-identical either way).
void set_enabled(bool on);

int thread_count();

/// RAII helper for tests and benchmarks that flip the execution mode.
struct ScopedMode {
    bool previous;
    explicit ScopedMode(bool on) : previous(enabled()) { set_enabled(on); }
    ~ScopedMode() { set_enabled(previous); }
};

/// Forking a parallel region costs more than this many scalar ops of work.
inline constexpr std::int64_t kMinParallelWork = 1 << 19;

/// Runs body(i) for i in [0, n). Iterations must write disjoint outputs;
/// under that contract the parallel and serial paths produce identical bits.
/// work_per_index estimates the scalar ops of one iteration; small totals
/// stay serial to avoid paying the fork cost (the result is unchanged).
template <class F>
void for_each_index(std::int64_t n, std::int64_t work_per_index, F&& body) {
#ifdef _OPENMP
    if (enabled() && n > 1 && n * work_per_index >= kMinParallelWork) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        body(i);
    }
}

template <class F>
void for_each_index(std::int64_t n, F&& body) {
    for_each_index(n, kMinParallelWork, static_cast<F&&>(body));
}

/// Deterministic reduction: per-index terms are evaluated (possibly in
/// parallel) into a buffer and combined serially in index order, so the
/// result does not depend on the thread count.
template <class F>
double indexed_sum(std::int64_t n, std::int64_t work_per_index, F&& term) {
    std::vector<double> partial(static_cast<std::size_t>(n));
    for_each_index(n, work_per_index,
                   [&](std::int64_t i) { partial[static_cast<std::size_t>(i)] = term(i); });
    double total = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        total += partial[static_cast<std::size_t>(i)];
    }
    return total;
}

template <class F>
double indexed_sum(std::int64_t n, F&& term) {
    return indexed_sum(n, kMinParallelWork, static_cast<F&&>(term));
}

}  // namespace decprox::par
