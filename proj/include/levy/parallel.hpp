#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace levy {

// Number of workers parallel_for may spawn: LEVY_INVENTORY_THREADS when set
// (clamped to [1, 512]), otherwise the hardware concurrency.
int worker_count();

namespace detail {
extern thread_local bool inside_parallel_region;
}

// Runs f(i) for i in [0, n) over a static block partition. Each call must
// touch only its own slot so that results do not depend on the worker count.
// Nested invocations degrade to the serial loop; the first exception thrown
// by any worker is rethrown on the calling thread.
template <class F>
void parallel_for(std::int64_t n, F&& f) {
  if (n <= 0) return;
  int workers = worker_count();
  if (static_cast<std::int64_t>(workers) > n) workers = static_cast<int>(n);
  if (workers <= 1 || detail::inside_parallel_region) {
    for (std::int64_t i = 0; i < n; ++i) f(i);
    return;
  }
  const std::int64_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&f, &errors, w, chunk, n] {
      detail::inside_parallel_region = true;
      try {
        const std::int64_t lo = static_cast<std::int64_t>(w) * chunk;
        const std::int64_t hi = std::min(n, lo + chunk);
        for (std::int64_t i = lo; i < hi; ++i) f(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace levy
