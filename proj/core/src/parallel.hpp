#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nanophase::detail {

inline std::size_t resolve_threads(std::size_t requested, std::size_t work_items) {
  std::size_t t = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return std::clamp<std::size_t>(t, 1, std::max<std::size_t>(1, work_items));
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be written
/// to per-index slots so the outcome does not depend on scheduling.
/// The first exception thrown by any fn is rethrown after all workers join.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = resolve_threads(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> workers;
    for (std::size_t t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace nanophase::detail
