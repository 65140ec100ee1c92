#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace ucf::parallel {

  namespace detail {
    inline std::size_t& thread_count_ref() {
      static std::size_t count = 0; // 0 = not yet resolved
      return count;
    }
  }

  /// Number of worker threads. Resolution order: explicit set_thread_count,
  /// UCF_THREADS environment variable, hardware concurrency.
  inline std::size_t thread_count() {
    std::size_t& c = detail::thread_count_ref();
    if (c == 0) {
      if (const char* env = std::getenv("UCF_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) c = static_cast<std::size_t>(v);
      }
      if (c == 0) c = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }
    return c;
  }

  inline void set_thread_count(std::size_t n) { detail::thread_count_ref() = n == 0 ? 1 : n; }

  /// Run fn(i) for i in [0, n). Work is handed out through an atomic counter;
  /// results must be position-addressed by the caller so that the worker
  /// count never affects the outcome. The first exception thrown by any
  /// worker is rethrown on the calling thread.
  inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min(thread_count(), n);
    if (workers <= 1) {
      for (std::size_t i = 0; i < n; ++i) fn(i);
      return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

} // namespace ucf::parallel
