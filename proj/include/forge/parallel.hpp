#pragma once

#include <cstddef>

#include <omp.h>

namespace forge {

/// Upper bound on worker threads; 0 means "OpenMP default".
struct Threads {
  int count = 0;

  int resolved() const { return count > 0 ? count : omp_get_max_threads(); }
};

/// Runs body(i) for i in [0, n). Each index is independent and writes only
/// its own output slot; scheduling never affects results.
template <typename Body>
void parallel_for(std::size_t n, Threads threads, Body&& body) {
  const auto total = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads.resolved())
  for (long long i = 0; i < total; ++i) {
    body(static_cast<std::size_t>(i));
  }
}

}  // namespace forge
