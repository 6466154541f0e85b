#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "blockmax/error.hpp"

namespace blockmax::detail {

// Worker count from BLOCKMAX_THREADS (unset or 0 means hardware concurrency),
// never more than the number of tasks.
inline std::size_t worker_count(std::size_t tasks) {
  std::size_t want = 0;
  if (const char* env = std::getenv("BLOCKMAX_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0) {
      fail(Errc::config_error, std::string("BLOCKMAX_THREADS must be a non-negative integer, got '") + env + "'");
    }
    want = static_cast<std::size_t>(v);
  }
  if (want == 0) want = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(want, tasks));
}

// Runs body(i) for i in [0, n). Each index is executed exactly once; results
// must be written to per-index slots so the outcome does not depend on
// scheduling. The exception from the lowest failing index is rethrown.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  if (n == 0) return;
  const std::size_t workers = worker_count(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 0; t + 1 < workers; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace blockmax::detail
