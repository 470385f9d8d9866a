#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace rjacobi {

// Runs body(i) for i in [0, n) on up to `threads` workers. Work is split by
// contiguous index blocks; callers must make body(i) write only to slot i of
// preallocated storage, so results are bitwise identical for any thread
// count (reductions happen afterwards in index order).
inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(n));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned t = 0; t < workers; ++t) {
    std::size_t lo = static_cast<std::size_t>(t) * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body]() {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace rjacobi
