#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace kdarts {

// C(n, k) in exact integer arithmetic; throws std::overflow_error when the
// result does not fit in 64 bits.
std::uint64_t binomial(int n, int k);

// Lexicographic enumeration of all k-subsets of {0, ..., n-1}. For k == 0
// the callback fires once with an empty span.
template <typename Fn>
void for_each_combination(int n, int k, Fn&& fn) {
  std::vector<int> c(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) c[static_cast<std::size_t>(i)] = i;
  while (true) {
    fn(std::span<const int>(c));
    int i = k - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++c[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
      c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  }
}

}  // namespace kdarts
