#pragma once

// Fixed-size worker pool for independent scenarios. Size from SPECTRALAB_THREADS,
// default 1.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace spectralab {

inline int worker_count() {
  const char* env = std::getenv("SPECTRALAB_THREADS");
  if (!env || !*env) return 1;
  try {
    return std::clamp(std::stoi(env), 1, 256);
  } catch (const std::exception&) {
    return 1;
  }
}

/// Calls fn(i) for i in [0, n) on up to `workers` threads. The first exception
/// (lowest index) is rethrown after all tasks finish.
template <class F>
void parallel_for(int n, F&& fn, int workers = worker_count()) {
  std::vector<std::exception_ptr> errors(static_cast<size_t>(std::max(n, 0)));
  std::atomic<int> next{0};
  auto loop = [&] {
    for (int i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        errors[static_cast<size_t>(i)] = std::current_exception();
      }
    }
  };
  const int t = std::min(workers, n);
  if (t <= 1) {
    loop();
  } else {
    std::vector<std::thread> threads;
    for (int k = 0; k < t; ++k) threads.emplace_back(loop);
    for (auto& th : threads) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace spectralab
