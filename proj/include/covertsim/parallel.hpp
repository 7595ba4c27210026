#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace covertsim {

/// Runs fn(i) for every i in [0, count), split into contiguous ranges
/// across `workers` threads. fn must confine its writes to per-index
/// slots (no shared mutable state), which makes the overall result
/// independent of the worker count; every trial loop in this codebase
/// relies on that for reproducibility. The first exception thrown by any
/// worker is rethrown on the calling thread after all workers join.
inline void parallel_for(std::int64_t count, int workers,
                         const std::function<void(std::int64_t)>& fn) {
  if (count <= 0) return;
  const int nw = static_cast<int>(
      std::min<std::int64_t>(std::max(workers, 1), count));
  if (nw == 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::int64_t chunk = (count + nw - 1) / nw;
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(nw));
  for (int w = 0; w < nw; ++w) {
    threads.emplace_back([&, w] {
      const std::int64_t begin = w * chunk;
      const std::int64_t end = std::min(count, begin + chunk);
      try {
        for (std::int64_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace covertsim
