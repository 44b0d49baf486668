#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace rdeq {

inline unsigned resolve_threads(int requested) {
  if (requested > 0) return static_cast<unsigned>(requested);
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

/// Runs fn over [0, count) split into contiguous chunks, one per worker.
/// Workers write to disjoint outputs, so results cannot depend on the
/// number of threads. The first exception thrown by a worker is rethrown.
inline void parallel_for_chunks(std::size_t count, int threads,
                                const std::function<void(std::size_t, std::size_t)>& fn) {
  if (count == 0) return;
  const std::size_t n_workers = std::min<std::size_t>(resolve_threads(threads), count);
  if (n_workers <= 1) {
    fn(0, count);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(n_workers);
  const std::size_t base = count / n_workers;
  const std::size_t rem = count % n_workers;
  std::size_t begin = 0;
  for (std::size_t w = 0; w < n_workers; ++w) {
    const std::size_t len = base + (w < rem ? 1 : 0);
    const std::size_t end = begin + len;
    pool.emplace_back([&fn, &errors, w, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
    begin = end;
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace rdeq
