#include "raman/parallel.hpp"

#include <atomic>

namespace raman {

namespace {
std::atomic<int> g_max_threads{0};
}

void set_max_threads(int n) { g_max_threads.store(n < 0 ? 0 : n); }

int max_threads() {
  int cap = g_max_threads.load();
#ifdef _OPENMP
  int hw = omp_get_max_threads();
  return (cap == 0 || cap > hw) ? hw : cap;
#else
  return cap == 0 ? 1 : cap;
#endif
}

}  // namespace raman
