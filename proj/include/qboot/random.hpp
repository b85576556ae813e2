#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

namespace qboot {

/// SplitMix64 finalizer; used to spread seeds and derive child stream ids.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Seedable uniform stream. The same (seed, stream) pair replays the exact
/// same sequence; split() derives statistically independent sibling streams
/// from one seed. All nondeterminism in the library flows through this type.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// Child source with a stream id mixed from (stream, k). Independent of
  /// draws already made on the parent.
  RandomSource split(std::uint64_t k) const {
    return RandomSource(seed_, mix64(stream_ ^ mix64(k + 1)));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Consumes exactly one uniform variate.
  bool bernoulli(double p) { return uniform01() < p; }

  /// Poisson with unit rate, by CDF inversion on one uniform variate.
  int poisson_unit() {
    const double u = uniform01();
    int k = 0;
    while (u >= kPoissonUnitCdf[static_cast<std::size_t>(k)]) ++k;
    return k;
  }

  /// Standard normal via the Marsaglia polar method; the spare deviate is
  /// cached, so draws remain replayable per stream.
  double standard_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  // CDF of Poisson(1); the final 1.0 guarantees termination since u < 1.
  static constexpr std::array<double, 19> kPoissonUnitCdf = {
      0x1.78b56362cef38p-2,  // P(X <= 0) = e^{-1}
      0x1.78b56362cef38p-1, 0x1.d6e2bc3b82b06p-1, 0x1.f6472f2e6944bp-1,
      0x1.fe204beb22e9cp-1, 0x1.ffb21e77480acp-1, 0x1.fff516e3f8e59p-1,
      0x1.fffea81812296p-1, 0x1.ffffda3e9551ep-1, 0x1.fffffc42dcc82p-1,
      0x1.ffffffa9b0ba6p-1, 0x1.fffffff8db44cp-1, 0x1.ffffffff7425ap-1,
      0x1.fffffffff60f9p-1, 0x1.ffffffffff572p-1, 0x1.fffffffffff58p-1,
      0x1.ffffffffffff6p-1, 0x1.fffffffffffffp-1, 1.0};

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace qboot
