#pragma once

#include <cstddef>
#include <cstdlib>
#include <type_traits>

#ifdef _OPENMP
#include <omp.h>
#endif

// Execution policy shared by the heavy kernels (campaign runs, batched
// surrogate evaluation, grid solves). Every kernel is written as an index
// map into pre-sized storage followed by an order-stable reduction, so the
// serial and parallel paths produce bit-identical results; tests rely on
// that and tools/bench_kernels compares their wall time.

namespace soec::par {

enum class Exec { serial, parallel };

// Worker cap: SOEC_THREADS when set (clamped to >= 1), else the OpenMP
// default; 1 when built without OpenMP.
inline int worker_count() {
#ifdef _OPENMP
    int n = omp_get_max_threads();
#else
    int n = 1;
#endif
    if (const char* env = std::getenv("SOEC_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1 && cap < n) n = cap;
    }
    return n < 1 ? 1 : n;
}

template <class Fn>
void for_each_index(std::size_t n, Exec exec, Fn&& fn) {
#ifdef _OPENMP
    if (exec == Exec::parallel && worker_count() > 1 && n > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(soec::par::worker_count())
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            fn(static_cast<std::size_t>(i));
        return;
    }
#endif
    (void)exec;
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace soec::par
