#pragma once

#include <cmath>
#include <cstdint>

namespace geosob::num {

/// Philox-4x32-10 counter-based generator. A (seed, stream) pair names an
/// independent stream; the n-th draw is a pure function of (seed, stream, n),
/// so identical configurations reproduce identical sample sequences
/// regardless of evaluation order or thread count.
class Philox {
 public:
  explicit Philox(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  /// 64 uniform random bits for draw index `n`.
  std::uint64_t bits_at(std::uint64_t n) const {
    std::uint32_t c0 = static_cast<std::uint32_t>(n);
    std::uint32_t c1 = static_cast<std::uint32_t>(n >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(stream_);
    std::uint32_t c3 = static_cast<std::uint32_t>(stream_ >> 32);
    std::uint32_t k0 = static_cast<std::uint32_t>(seed_);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed_ >> 32);
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = 0xD2511F53ULL * c0;
      const std::uint64_t p1 = 0xCD9E8D57ULL * c2;
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      const std::uint32_t n0 = hi1 ^ c1 ^ k0;
      const std::uint32_t n2 = hi0 ^ c3 ^ k1;
      c0 = n0;
      c1 = lo1;
      c2 = n2;
      c3 = lo0;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    return (static_cast<std::uint64_t>(c0) << 32) | c1;
  }

  /// Uniform double in [0,1) for draw index n.
  double uniform_at(std::uint64_t n) const {
    return static_cast<double>(bits_at(n) >> 11) * 0x1.0p-53;
  }

  // Sequential convenience interface.
  double uniform() { return uniform_at(next_++); }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Standard normal via Box-Muller (two draws per pair, cached).
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    const double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 6.283185307179586476925286766559 * u2;
    cached_ = rad * std::sin(ang);
    have_cached_ = true;
    return rad * std::cos(ang);
  }

  std::uint64_t cursor() const { return next_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t next_ = 0;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace geosob::num
