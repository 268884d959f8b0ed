#pragma once

#include <cmath>
#include <cstdint>

namespace kdarts {

// Streaming mean and variance (Welford). merge() combines two accumulators
// exactly as if their samples had been interleaved, so chunked reductions
// stay deterministic as long as the merge order is fixed.
struct RunningStat {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(const RunningStat& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(o.count);
    const double delta = o.mean - mean;
    const double n = na + nb;
    mean += delta * nb / n;
    m2 += o.m2 + delta * delta * na * nb / n;
    count += o.count;
  }

  // Sample variance, n-1 denominator; zero below two samples.
  double variance() const {
    return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
  }
  double stddev() const { return std::sqrt(variance()); }
  double std_error() const {
    return count > 0 ? stddev() / std::sqrt(static_cast<double>(count)) : 0.0;
  }
};

}  // namespace kdarts
