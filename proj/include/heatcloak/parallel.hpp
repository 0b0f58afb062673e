#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace heatcloak {

/// Number of worker threads: hardware concurrency, at least one.
inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Applies fn to 0..count-1 on a small thread pool. Results are written by
/// index, so the output order never depends on completion order. The first
/// exception thrown by any task is rethrown after all workers join.
template <class Fn>
auto parallel_map(std::size_t count, Fn fn, unsigned workers = 0) {
  using R = std::invoke_result_t<Fn, std::size_t>;
  std::vector<std::optional<R>> slots(count);
  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace heatcloak
