#include "kinetics/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>

namespace kinetics {

namespace {
std::atomic<int> g_thread_cap{0};
}

void set_thread_cap(int threads) { g_thread_cap = std::max(1, threads); }

int thread_cap() {
  const int cap = g_thread_cap.load();
  return cap > 0 ? cap : std::max(1, omp_get_max_threads());
}

}  // namespace kinetics
