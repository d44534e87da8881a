#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace corecluster {

/// SplitMix64 finalizer. Used to turn structured keys (seed, iteration
/// index, pair index, ...) into well-separated engine seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// A seedable, splittable random stream.
///
/// `substream(key)` derives a child stream from the stream's *identity*, not
/// from its consumed state, so any worker can reconstruct the stream for a
/// logical task (bootstrap iteration i, pair q, restart r) without replaying
/// the draws that precede it. Monte Carlo results therefore depend only on
/// the master seed and the key path of each task — never on how tasks are
/// scheduled across threads.
///
/// Variates are produced from a std::mt19937_64 engine through fixed,
/// implementation-independent recipes (rejection sampling for bounded
/// integers, a 53-bit mantissa for uniforms, Box–Muller for normals), so a
/// given seed yields the same sequence on every platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed)
      : ident_(seed), engine_(splitmix64(seed ^ kEngineSalt)) {}

  /// Child stream identified by (this stream's identity, key).
  RngStream substream(std::uint64_t key) const {
    return RngStream(splitmix64(ident_ ^ splitmix64(key ^ kSubstreamSalt)));
  }

  std::uint64_t ident() const { return ident_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound); bound >= 1. Unbiased via rejection.
  std::uint64_t uniform_index(std::uint64_t bound) {
    // 2^64 mod bound, computed without 128-bit arithmetic.
    const std::uint64_t reject_below = (~bound + 1) % bound;
    std::uint64_t v = next_u64();
    while (v < reject_below) v = next_u64();
    return v % bound;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal deviate (Box–Muller; one fresh pair of uniforms per
  /// call so the stream position stays a pure function of the call count).
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    // log1p(-u1) = log(1 - u1) with 1 - u1 in (0, 1]; never log(0).
    return std::sqrt(-2.0 * std::log1p(-u1)) *
           std::cos(2.0 * 3.141592653589793238462643 * u2);
  }

 private:
  static constexpr std::uint64_t kEngineSalt = 0x8f5c2e1a94b7d360ULL;
  static constexpr std::uint64_t kSubstreamSalt = 0x5bf03635e4672b8dULL;

  std::uint64_t ident_;
  std::mt19937_64 engine_;
};

}  // namespace corecluster
