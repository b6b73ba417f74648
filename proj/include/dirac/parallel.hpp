#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace dirac {

/// Worker count for parallel_for.  Defaults to DIRACSPEC_THREADS if set,
/// otherwise the hardware concurrency.
int thread_count();
void set_thread_count(int n);

namespace detail {
inline std::atomic<int>& thread_count_slot() {
  static std::atomic<int> count{0};
  return count;
}
}  // namespace detail

inline int thread_count() {
  int c = detail::thread_count_slot().load(std::memory_order_relaxed);
  if (c > 0) return c;
  if (const char* env = std::getenv("DIRACSPEC_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) {
      detail::thread_count_slot().store(parsed, std::memory_order_relaxed);
      return parsed;
    }
  }
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  const int fallback = hw > 0 ? hw : 1;
  detail::thread_count_slot().store(fallback, std::memory_order_relaxed);
  return fallback;
}

inline void set_thread_count(int n) {
  detail::thread_count_slot().store(n > 0 ? n : 1, std::memory_order_relaxed);
}

/// Runs fn(i) for i in [begin, end) on up to thread_count() workers.
/// fn must be safe to call concurrently for distinct i.
template <class F>
void parallel_for(int begin, int end, F&& fn) {
  const int total = end - begin;
  if (total <= 0) return;
  const int workers = std::min(thread_count(), total);
  if (workers <= 1) {
    for (int i = begin; i < end; ++i) fn(i);
    return;
  }
  std::atomic<int> next{begin};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= end || failed.load(std::memory_order_relaxed)) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace dirac
