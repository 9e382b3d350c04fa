#pragma once

#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace ndevoi {

// Worker cap: NDE_VOI_THREADS if set (>= 1), otherwise hardware concurrency
// clamped to 8. Results must not depend on the thread count; bodies write to
// disjoint, pre-sized slots.
inline int max_threads() {
  static const int cached = [] {
    if (const char* env = std::getenv("NDE_VOI_THREADS")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v >= 1) return static_cast<int>(v);
      return 1;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    const unsigned capped = hw == 0 ? 1 : (hw > 8 ? 8 : hw);
    return static_cast<int>(capped);
  }();
  return cached;
}

// Runs body(i) for i in [0, n) across up to max_threads() workers with static
// chunking. Rethrows the first exception raised by any worker.
template <class F>
void parallel_for(std::size_t n, F&& body) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(max_threads()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t lo = n * w / workers;
      const std::size_t hi = n * (w + 1) / workers;
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace ndevoi
