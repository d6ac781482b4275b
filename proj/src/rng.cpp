#include "wordstream/rng.hpp"

#include "wordstream/errors.hpp"

namespace wordstream {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Rng Rng::split(std::string_view label) const {
  return Rng(Raw{}, mix(key_ ^ mix(fnv1a(label) + 0x3c6ef372fe94f82bULL)));
}

Rng Rng::split(std::uint64_t index) const {
  return Rng(Raw{}, mix(key_ + mix(index ^ 0xa54ff53a5f1d36f1ULL) * 0x2545f4914f6cdd1dULL));
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw Error("Rng::below: empty range");
  // Lemire-style rejection on the top of the range.
  std::uint64_t limit = max() - (max() % bound + 1) % bound;
  for (;;) {
    std::uint64_t x = (*this)();
    if (x <= limit) return x % bound;
  }
}

BigInt Rng::below(const BigInt& bound) {
  if (bound <= 0) throw Error("Rng::below: empty range");
  if (fits_u64(bound)) return BigInt(below(static_cast<std::uint64_t>(bound)));
  unsigned bits = bit_length(BigInt(bound - 1));
  unsigned words = (bits + 63) / 64;
  for (;;) {
    BigInt x = 0;
    for (unsigned i = 0; i < words; ++i) {
      x <<= 64;
      x += (*this)();
    }
    x >>= (words * 64 - bits);
    if (x < bound) return x;
  }
}

std::uint64_t Rng::between(std::uint64_t lo, std::uint64_t hi) {
  if (hi < lo) throw Error("Rng::between: empty range");
  if (lo == 0 && hi == max()) return (*this)();
  return lo + below(hi - lo + 1);
}

BigInt Rng::between(const BigInt& lo, const BigInt& hi) {
  if (hi < lo) throw Error("Rng::between: empty range");
  return lo + below(BigInt(hi - lo + 1));
}

double Rng::uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

}  // namespace wordstream
