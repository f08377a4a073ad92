#ifndef LYRICA_PARALLEL_HPP
#define LYRICA_PARALLEL_HPP

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lyrica {

// Number of hardware threads OpenMP would use, 1 without OpenMP.
inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Runs body(i) for i in [0, n). threads <= 1 takes the plain serial loop,
// which is the reference path the parallel tests compare against. Bodies must
// only write to per-index state; both paths then produce identical results.
template <typename Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
#ifdef _OPENMP
    if (threads > 1 && n > 1) {
        const long long count = static_cast<long long>(n);
#pragma omp parallel for num_threads(threads) schedule(static)
        for (long long i = 0; i < count; ++i) {
            body(static_cast<std::size_t>(i));
        }
        return;
    }
#endif
    (void)threads;
    for (std::size_t i = 0; i < n; ++i) {
        body(i);
    }
}

}  // namespace lyrica

#endif
