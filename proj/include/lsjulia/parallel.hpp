#pragma once
#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace lsjulia {

// Runs fn(begin, end) over a partition of [0, n) on `workers` threads.
// Blocks are contiguous and assignment depends only on (n, workers), so any
// per-index state the callback writes lands at the same place regardless of
// scheduling. workers <= 1 runs inline. First exception wins and is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  if (n == 0) return;
  if (workers <= 1 || n == 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  std::size_t chunk = (n + nthreads - 1) / nthreads;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) {
    std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, t, lo, hi] {
      try {
        fn(lo, hi);
      } catch (...) {
        errs[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace lsjulia
