#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace kdarts {

// Runs fn(i) for i in [0, n). Tasks must write only to their own output
// slot; with that discipline the result is identical for any thread count,
// which keeps multi-threaded runs bit-reproducible.
template <typename Fn>
void parallel_for(std::uint64_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const auto workers =
      static_cast<unsigned>(std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), n));
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace kdarts
