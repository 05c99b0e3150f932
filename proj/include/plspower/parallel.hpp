#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace plspower {

/// Worker cap: PLSPOWER_THREADS when set (clamped to >= 1), else all cores.
inline unsigned max_workers() {
  if (const char* env = std::getenv("PLSPOWER_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
    return 1;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

namespace detail {
inline thread_local bool inside_parallel_region = false;
}

/// Runs fn(i) for i in [0, count). Scheduling is dynamic, but callers must
/// write results into per-index slots and draw randomness from per-index
/// substreams, so the outcome is identical for any worker count. Nested
/// calls from inside a worker degrade to serial execution.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  if (count == 0) return;
  unsigned workers = max_workers();
  if (workers > count) workers = static_cast<unsigned>(count);
  if (workers <= 1 || detail::inside_parallel_region) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    detail::inside_parallel_region = true;
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
    detail::inside_parallel_region = false;
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace plspower
