#pragma once

#include <cstdint>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace ftfl {

// Worker count for trial loops.  FTFL_THREADS=k forces k workers, 0 or an
// unset/garbled value means one per hardware thread.
inline int worker_count() {
  if (const char* env = std::getenv("FTFL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v > 256 ? 256 : int(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(hw);
}

// Static chunking over [0, n).  `fn(i)` must write its result to a slot
// indexed by i only; then the outcome is independent of the schedule and of
// the worker count.
template <class Fn>
void parallel_for(std::int64_t n, Fn&& fn, int threads = worker_count()) {
  if (n <= 0) return;
  if (threads <= 1 || n == 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  if (std::int64_t(threads) > n) threads = int(n);
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(threads));
  auto errors = std::vector<std::exception_ptr>(std::size_t(threads));
  const std::int64_t chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const std::int64_t lo = t * chunk;
    const std::int64_t hi = lo + chunk < n ? lo + chunk : n;
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn, err = &errors[std::size_t(t)]] {
      try {
        for (std::int64_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        *err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

}  // namespace ftfl
