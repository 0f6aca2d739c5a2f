#pragma once

#include <cstddef>
#include <vector>

#ifdef CAVITYKIT_HAVE_OPENMP
#include <omp.h>
#endif

namespace cavitykit {

// Sweeps (wavelength scans, finesse grids, distance grids) are embarrassingly
// parallel: each grid point writes its own output slot, so the result is
// bitwise identical for both policies.
enum class Exec { serial, parallel };

template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn, Exec exec = Exec::parallel) {
    std::vector<T> out(n);
#ifdef CAVITYKIT_HAVE_OPENMP
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
        return out;
    }
#else
    (void)exec;
#endif
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
}

}  // namespace cavitykit
