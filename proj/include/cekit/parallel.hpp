#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace cekit {

// Worker cap: CEKIT_THREADS if set, otherwise the hardware count.
inline int thread_cap() {
  if (const char* env = std::getenv("CEKIT_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(0..n-1) across at most thread_cap() workers. Each index must be
// independent; results keyed by index stay deterministic regardless of the
// worker count.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
  int workers = std::min(thread_cap(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace cekit
