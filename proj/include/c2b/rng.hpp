#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace c2b {

// SplitMix64 stream. Small, fast, and stable across standard libraries, so
// seeded results are reproducible independent of <random> internals.
// Streams are split by hashing extra keys into the seed, which keeps every
// consumer (weight init, shuffling, synthesis) on an independent sequence.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  // Derive an independent stream from this seed and one or more keys.
  static Rng split(uint64_t seed, uint64_t key) {
    return Rng(mix(seed ^ mix(key ^ 0x9e3779b97f4a7c15ull)));
  }
  static Rng split(uint64_t seed, uint64_t key1, uint64_t key2) {
    return Rng(mix(seed ^ mix(key1 ^ mix(key2 ^ 0xbf58476d1ce4e5b9ull))));
  }

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n).
  uint64_t next_below(uint64_t n) { return next_u64() % n; }

  // Standard normal via Box-Muller.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = next_double();
    } while (u1 <= 0.0);
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  uint64_t state_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace c2b
