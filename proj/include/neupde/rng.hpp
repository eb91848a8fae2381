#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "neupde/vec.hpp"

namespace neupde {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// xoshiro256++ engine.  Satisfies the UniformRandomBitGenerator
/// requirements so the standard distributions can run on top of it.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed = 1) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

/// Derives an independent stream seed from (master seed, purpose tag, index).
/// Streams are reproducible and do not depend on scheduling or worker count.
inline std::uint64_t stream_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t index) {
  std::uint64_t s = master ^ fnv1a64(tag);
  std::uint64_t a = splitmix64(s);
  s = a + (index + 1) * 0x9E3779B97F4A7C15ULL;
  return splitmix64(s);
}

/// Standard-normal noise source driving the path schemes.
class GaussNoise {
 public:
  explicit GaussNoise(std::uint64_t seed) : eng_(seed) {}

  Vec draw(std::size_t dim) {
    Vec z(dim);
    for (std::size_t i = 0; i < dim; ++i) z[i] = normal_(eng_);
    return z;
  }

 private:
  Xoshiro256 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Test hook: deterministic all-zero increments.
struct ZeroNoise {
  Vec draw(std::size_t dim) { return Vec(dim, 0.0); }
};

}  // namespace neupde
