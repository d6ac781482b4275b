#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

#include "wordstream/bigint.hpp"

namespace wordstream {

// Counter-based SplitMix64 stream. A stream is identified by a 64-bit key;
// split() derives independent child streams from a label or an index.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    ++counter_;
    return mix(key_ + counter_ * kGolden);
  }

  Rng split(std::string_view label) const;
  Rng split(std::uint64_t index) const;

  // Uniform in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);
  BigInt below(const BigInt& bound);
  // Uniform in [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi);
  BigInt between(const BigInt& lo, const BigInt& hi);
  double uniform01();
  bool coin() { return ((*this)() >> 63) != 0; }

  std::uint64_t key() const { return key_; }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  struct Raw {};
  Rng(Raw, std::uint64_t key) : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace wordstream
