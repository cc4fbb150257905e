#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace kinetics {

/// Upper bound on worker threads used by every parallel loop (>= 1).
void set_thread_cap(int threads);
int thread_cap();

/// Runs fn(i) for i in [0, count). Iterations must write disjoint outputs;
/// the first exception thrown by any iteration is rethrown on the caller.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_cap())
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace kinetics
