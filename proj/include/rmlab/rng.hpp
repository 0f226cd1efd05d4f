#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rmlab {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective on 64 bits.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// FNV-1a over the bytes of a role tag.
constexpr std::uint64_t tag_hash(std::string_view tag) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Seed of the stream used by trial `trial` of an experiment with master seed
/// `master`, for the sampling role `tag`:
///
///   h(s, t, tag) = mix64(mix64(s ^ mix64(t)) ^ fnv1a(tag))
///
/// This formula is part of the reproducibility contract. Changing it changes
/// every raw record ever produced.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial,
                                    std::string_view tag) noexcept {
  return mix64(mix64(master ^ mix64(trial)) ^ tag_hash(tag));
}

/// Single random stream. The engine is std::mt19937_64 (bit-exact by the
/// standard); the real-valued conversions are done here rather than through
/// <random> distributions, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal by the Marsaglia polar method.
  double normal();

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rmlab
