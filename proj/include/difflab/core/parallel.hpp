#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace difflab {

/// Worker count: DIFFLAB_THREADS when set, otherwise the hardware concurrency.
inline unsigned thread_budget() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DIFFLAB_THREADS")) {
    try {
      long n = std::stol(env);
      if (n >= 1) return static_cast<unsigned>(std::min<long>(n, hw));
    } catch (...) {
    }
  }
  return hw;
}

/// Runs fn(i) for i in [0, n). Results must be written to per-index slots, so the
/// outcome is independent of scheduling. The exception of the lowest failing index
/// is rethrown.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  unsigned workers = std::min<std::size_t>(thread_budget(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::size_t first_index = n;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (i < first_index) {
            first_index = i;
            first = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

} // namespace difflab
