#ifndef PCT_PARALLEL_HPP
#define PCT_PARALLEL_HPP

#include <cstddef>
#include <thread>
#include <vector>

namespace pct {

inline std::size_t& worker_thread_cap() {
  static std::size_t cap = 1;
  return cap;
}

// Runs body(i) for i in [0, n). With cap > 1, iterations are split into
// contiguous blocks; bodies must write to disjoint slots so results do not
// depend on the schedule.
template <typename Body>
inline void parallel_for(std::size_t n, const Body& body) {
  std::size_t threads = worker_thread_cap();
  if (threads <= 1 || n < 2 * threads) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (n + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    std::size_t lo = t * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace pct

#endif
