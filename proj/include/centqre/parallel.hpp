#pragma once

// OpenMP orchestration used by the embarrassingly parallel kernels
// (permutation nulls, posterior-predictive replicates, optimizer multi-starts).
// Each task writes to its own output slot and owns an Rng substream, so the
// result is bit-identical to the serial reference regardless of thread count.

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace centqre {

inline int hardware_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// requested <= 0 means "use all available".
inline int effective_threads(int requested) {
  const int hw = hardware_threads();
  if (requested <= 0) return hw;
  return requested < hw ? requested : hw;
}

// Runs f(i) for i in [0, n). threads == 1 is the serial reference path.
template <typename F>
void parallel_index(std::int64_t n, int threads, F&& f) {
  threads = effective_threads(threads);
  if (threads <= 1 || n < 2) {
    for (std::int64_t i = 0; i < n; ++i) f(i);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) f(i);
#else
  for (std::int64_t i = 0; i < n; ++i) f(i);
#endif
}

// Serial reference loop, kept distinct so tests and the benchmark can compare
// it against the OpenMP path.
template <typename F>
void serial_index(std::int64_t n, F&& f) {
  for (std::int64_t i = 0; i < n; ++i) f(i);
}

}  // namespace centqre
