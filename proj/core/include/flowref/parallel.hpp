#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace flowref {

namespace detail {
inline int& thread_count_ref() {
  static int n = 1;
  return n;
}
}  // namespace detail

/// Number of worker threads used by row-parallel kernels. 1 = serial.
/// Kernels write disjoint output rows and read only immutable inputs, so
/// results are bit-identical for any thread count.
inline int worker_threads() { return detail::thread_count_ref(); }

inline void set_worker_threads(int n) {
  detail::thread_count_ref() = std::max(1, n);
}

/// Calls fn(y) for y in [y0, y1), partitioned by rows over worker_threads().
template <typename Fn>
void parallel_rows(int y0, int y1, Fn&& fn) {
  const int rows = y1 - y0;
  const int nthreads = std::min(worker_threads(), std::max(1, rows));
  if (nthreads <= 1 || rows <= 1) {
    for (int y = y0; y < y1; ++y) fn(y);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  const int chunk = (rows + nthreads - 1) / nthreads;
  for (int t = 0; t < nthreads; ++t) {
    const int a = y0 + t * chunk;
    const int b = std::min(y1, a + chunk);
    if (a >= b) break;
    pool.emplace_back([a, b, &fn] {
      for (int y = a; y < b; ++y) fn(y);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace flowref
