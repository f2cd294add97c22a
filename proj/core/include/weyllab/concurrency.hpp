#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace weyllab {

// Worker cap: explicit argument > WEYL_LAB_THREADS > hardware concurrency.
inline int resolve_thread_count(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("WEYL_LAB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Static block partition over [0, n). Each cell must be independent; results
// are written to preallocated slots so the merge order is deterministic.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  const int nthreads = resolve_thread_count(threads);
  if (nthreads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t workers = std::min<std::size_t>(nthreads, n);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace weyllab
