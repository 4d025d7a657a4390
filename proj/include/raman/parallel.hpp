#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace raman {

// Global worker cap shared by every OpenMP kernel (CLI --threads).
// 0 means "whatever the runtime gives us".
void set_max_threads(int n);
int max_threads();

// Static-schedule parallel map over [0, n). Bodies must write disjoint state;
// every kernel in this codebase keeps its arithmetic order independent of the
// thread count so serial and parallel runs produce identical bytes.
template <class F>
void parallel_for(int n, F&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(max_threads())
  for (int i = 0; i < n; ++i) body(i);
#else
  for (int i = 0; i < n; ++i) body(i);
#endif
}

}  // namespace raman
