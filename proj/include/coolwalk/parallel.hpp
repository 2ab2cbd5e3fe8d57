#pragma once

#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace coolwalk {

// Runs fn(begin, end) over a partition of [0, count) on `threads` workers.
// Partitioning is deterministic; results must be written to disjoint,
// index-addressed slots so the outcome is independent of scheduling.
template <typename Fn>
void parallel_for(int threads, std::int64_t count, Fn&& fn) {
  if (threads <= 1 || count < 2) {
    fn(std::int64_t{0}, count);
    return;
  }
  const int workers = static_cast<int>(std::min<std::int64_t>(threads, count));
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  const std::int64_t chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::int64_t begin = w * chunk;
    const std::int64_t end = std::min(count, begin + chunk);
    pool.emplace_back([&, w, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace coolwalk
