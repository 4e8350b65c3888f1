#pragma once

#include <cstdint>
#include <random>

namespace trajmatch {

// Deterministic random source. All sampling in the library goes through this
// wrapper instead of std::uniform_real_distribution so that draws are
// bit-stable across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(scramble(seed)) {}

  // Seed for episode `index` of a run rooted at `root`: root + index, passed
  // through a scrambler so nearby roots do not yield correlated streams.
  static Rng for_episode(std::uint64_t root, std::uint64_t index) {
    return Rng(root + index);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection sampling keeps the draw exactly uniform.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % n;
  }

 private:
  // splitmix64 finalizer; spreads sequential seeds across the state space.
  static std::uint64_t scramble(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace trajmatch
