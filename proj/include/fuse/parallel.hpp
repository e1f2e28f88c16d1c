#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fuse {

// Execution policy for the data-parallel kernels (per-attribute transforms,
// correlation matrices, CV folds, experiment grid cells). Every kernel writes
// results into slots keyed by loop index, so Serial and Parallel produce
// identical output; the serial path doubles as the reference implementation
// in tests and benchmarks.
enum class Exec { Serial, Parallel };

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Caps the OpenMP team size; n <= 0 restores the hardware default.
void set_threads(int n);

template <typename F>
void parallel_for(std::size_t n, Exec exec, F&& body) {
    if (exec == Exec::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            body(static_cast<std::size_t>(i));
        }
        return;
#endif
    }
    for (std::size_t i = 0; i < n; ++i) body(i);
}

} // namespace fuse
