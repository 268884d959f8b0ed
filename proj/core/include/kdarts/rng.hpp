#pragma once

#include <cstdint>

namespace kdarts {

// Splittable counter-style generator. Each (seed, stream_id) pair names an
// independent, bit-reproducible sequence: the state walks by a per-stream odd
// increment and every output is a full 64-bit avalanche of the state, so the
// sequence is a pure function of (seed, stream_id, draw index). Forking by a
// child id derives further independent streams without sequence coupling.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : seed_(seed), stream_(stream_id) {
    state_ = avalanche(avalanche(seed + 0x9E3779B97F4A7C15ull) ^
                       avalanche(stream_id + 0x2545F4914F6CDD1Dull));
    gamma_ = avalanche(avalanche(stream_id) + seed) | 1ull;
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_; }

  std::uint64_t next_u64() noexcept {
    state_ += gamma_;
    return avalanche(state_);
  }

  // Uniform in [0, 1), 53 random bits.
  double next_double() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * next_double();
  }

  // Unbiased integer in [0, n), n > 0. Multiply-shift with rejection.
  std::uint64_t next_below(std::uint64_t n) noexcept {
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t t = (0 - n) % n;
      while (lo < t) {
        m = static_cast<unsigned __int128>(next_u64()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Independent child stream, fully determined by (seed, stream_id, child).
  RngStream fork(std::uint64_t child) const noexcept {
    return RngStream(seed_, avalanche(stream_ ^ (child + 0xD1B54A32D192ED03ull)));
  }

private:
  static std::uint64_t avalanche(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  std::uint64_t gamma_;
  std::uint64_t seed_;
  std::uint64_t stream_;
};

}  // namespace kdarts
