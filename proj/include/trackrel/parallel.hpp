#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace trackrel {

inline int worker_count(int requested, std::size_t jobs) {
  int n = requested > 0 ? requested : int(std::max(1u, std::thread::hardware_concurrency()));
  return int(std::clamp<std::size_t>(std::size_t(n), 1, std::max<std::size_t>(1, jobs)));
}

/// Calls fn(i) for i in [0, n) on a pool of worker threads. Each index runs
/// exactly once; callers write results into slot i so order is deterministic.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  const int count = worker_count(threads, n);
  if (count == 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (int t = 0; t < count; ++t) pool.emplace_back(worker);
}

}  // namespace trackrel
