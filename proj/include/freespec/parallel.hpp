#pragma once

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace freespec {

// Thread-count resolution: explicit request wins, then the FREESPEC_THREADS
// environment variable, then the OpenMP default. Returns 1 without OpenMP.
inline int effective_threads(int requested = 0) {
#ifdef _OPENMP
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FREESPEC_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return omp_get_max_threads();
#else
  (void)requested;
  return 1;
#endif
}

// Data-parallel loop over [0, n). threads == 1 runs the plain serial loop,
// which is the reference path the tests compare against. Work items must
// write to disjoint slots; no reductions happen inside.
template <class F>
void parallel_for(int n, int threads, F&& body) {
#ifdef _OPENMP
  if (threads > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
#else
  (void)threads;
#endif
  for (int i = 0; i < n; ++i) body(i);
}

}  // namespace freespec
