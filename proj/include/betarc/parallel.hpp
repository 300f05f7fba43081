#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace betarc {

/// Worker count: hardware concurrency, capped by BETARC_THREADS when set.
inline std::size_t thread_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BETARC_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
    } catch (const std::exception&) {
    }
  }
  return n;
}

/// Runs body(i) for i in [0, count). Each index is handled exactly once; the
/// first exception thrown by any worker is rethrown after all workers join.
template <class Body>
void parallel_for(std::size_t count, Body&& body, std::size_t workers = thread_count()) {
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace betarc
