#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

// Grid evaluation strategy. Every grid kernel in this project is a pure
// per-index function, so the parallel path must produce bit-identical output
// to the serial reference; tests and the benchmark target hold it to that.

namespace omniport {

struct Execution {
    bool parallel = false;
    int threads = 0;  // 0 picks the OpenMP default

    static Execution serial() { return {false, 0}; }
    static Execution with_threads(int n) { return {n != 1, n}; }
};

// applies fn(i) for i in [0, n). Exceptions thrown by fn are captured and
// rethrown on the calling thread (the first one wins).
template <class F>
void for_each_index(std::size_t n, const Execution& ex, F&& fn) {
    if (!ex.parallel || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
#ifdef _OPENMP
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const int threads = ex.threads > 0 ? ex.threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            const std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
#else
    for (std::size_t i = 0; i < n; ++i) fn(i);
#endif
}

}  // namespace omniport
