#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace trajmatch {

// Run fn(i) for i in [0, count) across worker threads. Each worker owns a
// static contiguous slice, so writes into preallocated per-index slots give
// results identical to a sequential loop regardless of thread count.
// threads == 0 uses the hardware concurrency; 1 runs inline.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (count == 0) return;
  std::size_t workers = threads == 0
                            ? std::max(1u, std::thread::hardware_concurrency())
                            : threads;
  if (workers > count) workers = count;
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace trajmatch
