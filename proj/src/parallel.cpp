#include "decprox/parallel.hpp"

#include <atomic>

namespace decprox::par {

namespace {
std::atomic<bool>& flag() {
#ifdef _OPENMP
    static std::atomic<bool> value{true};
#else
    static std::atomic<bool> value{false};
#endif
    return value;
}
}  // namespace

bool enabled() { return flag().load(std::memory_order_relaxed); }

void set_enabled(bool on) { flag().store(on, std::memory_order_relaxed); }

int thread_count() {
#ifdef _OPENMP
    return enabled() ? omp_get_max_threads() : 1;
#else
    return 1;
#endif
}

}  // namespace decprox::par
