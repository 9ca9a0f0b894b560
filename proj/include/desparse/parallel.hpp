#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "desparse/errors.hpp"

namespace desparse {

/// 0 means "all cores".
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
/// visited exactly once; the exception thrown by the lowest failing index is
/// rethrown on the calling thread after all workers join.
template <class Body>
void parallel_for(Index count, int threads, Body&& body) {
  const int workers = static_cast<int>(std::min<Index>(resolve_threads(threads), count));
  if (workers <= 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<Index> next{0};
  std::mutex error_mutex;
  Index failed_index = count;
  std::exception_ptr failure;
  auto worker = [&] {
    for (Index i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace desparse
