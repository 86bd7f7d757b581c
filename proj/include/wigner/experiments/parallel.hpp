#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace wigner {

inline std::size_t resolve_workers(std::size_t workers) {
  if (workers > 0) return workers;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// out[i] = fn(i) for i < count on at most `workers` threads (0 means one per
/// core). Each result lands in its own slot, so the output is independent of
/// scheduling. The first exception thrown by fn is rethrown after all workers stop.
template <class T, class Fn>
std::vector<T> parallel_slots(std::size_t count, std::size_t workers, Fn fn) {
  std::vector<T> out(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
      }
    }
  };
  const std::size_t pool = std::min(resolve_workers(workers), count);
  if (pool <= 1) {
    work();
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t k = 0; k < pool; ++k) threads.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace wigner
