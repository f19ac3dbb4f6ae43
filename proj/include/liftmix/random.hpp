#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace liftmix {

// All randomness in the project comes from this generator: a 64-bit Mersenne
// twister (std::mt19937_64, whose output sequence is fixed by the standard)
// seeded from (seed, stream name). Doubles and integers are derived from raw
// draws here instead of through <random> distributions, whose algorithms are
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::string_view stream = {})
      : engine_(mix(seed, stream)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] (inclusive), by rejection.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return lo + static_cast<std::int64_t>(engine_());
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return lo + static_cast<std::int64_t>(r % span);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  // FNV-1a over the stream name, folded into the seed with splitmix64.
  static std::uint64_t mix(std::uint64_t seed, std::string_view stream) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : stream) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    std::uint64_t z = seed ^ h;
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace liftmix
