#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace ufinsler {

/// Worker count from UFINSLER_WORKERS, else the hardware concurrency.
inline unsigned default_workers() {
  if (const char* env = std::getenv("UFINSLER_WORKERS")) {
    try {
      const long n = std::stol(env);
      if (n >= 1) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for every i in [0, count) on up to `workers` threads. Work is
/// split into contiguous blocks, so results written by index are identical
/// for any worker count. The first exception thrown by fn is rethrown.
template <class Fn>
void parallel_for_index(std::size_t count, unsigned workers, Fn&& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t block = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = w * block;
    const std::size_t end = std::min(count, begin + block);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace ufinsler
