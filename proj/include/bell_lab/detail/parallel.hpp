// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace bell_lab::detail {

/// BELL_LAB_WORKERS caps parallelism; 0 or unset means automatic.
inline std::size_t env_worker_cap() {
  const char* env = std::getenv("BELL_LAB_WORKERS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const long value = std::strtol(env, &end, 10);
  if (end == env || value <= 0) return 0;
  return static_cast<std::size_t>(value);
}

inline std::size_t resolve_workers(std::size_t jobs) {
  std::size_t hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const std::size_t cap = env_worker_cap();
  const std::size_t workers = (cap == 0) ? hw : std::min(hw, cap);
  return std::max<std::size_t>(1, std::min(workers, jobs));
}

/// Runs fn(begin, end) over disjoint contiguous ranges covering [0, n).
/// Callers must make per-index results independent of the chunking (write to
/// index-addressed slots, or reduce in an order-insensitive domain such as
/// integers) so that output never depends on the worker count.
template <typename Fn>
void for_each_chunk(std::size_t n, Fn&& fn) {
  if (n == 0) return;
  const std::size_t workers = resolve_workers(n > 4096 ? n / 4096 : 1);
  if (workers <= 1) {
    fn(std::size_t{0}, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::atomic_flag error_claimed = ATOMIC_FLAG_INIT;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, &first_error, &error_claimed, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        if (!error_claimed.test_and_set()) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace bell_lab::detail
