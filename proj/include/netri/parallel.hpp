#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace netri {

// Runs fn(begin, end) over an even static partition of [0, n). Work items
// must be independent and write only to their own slots; results are then
// identical for any thread count. The first worker exception is rethrown on
// the calling thread.
inline void parallel_for(std::int64_t n, int threads,
                         const std::function<void(std::int64_t, std::int64_t)>& fn) {
  if (n <= 0) return;
  int k = threads > 0 ? threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  if (k < 1) k = 1;
  if (static_cast<std::int64_t>(k) > n) k = static_cast<int>(n);
  if (k == 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(k));
  std::exception_ptr error;
  std::mutex error_mutex;
  const std::int64_t chunk = (n + k - 1) / k;
  for (int t = 0; t < k; ++t) {
    const std::int64_t begin = t * chunk;
    const std::int64_t end = std::min<std::int64_t>(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace netri
