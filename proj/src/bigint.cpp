#include "wordstream/bigint.hpp"

#include <cmath>

#include "wordstream/errors.hpp"

namespace wordstream {

unsigned bit_length(const BigInt& x) {
  if (x <= 0) return 0;
  return static_cast<unsigned>(boost::multiprecision::msb(x)) + 1;
}

BigInt mod_floor(const BigInt& a, const BigInt& m) {
  BigInt r = a % m;
  if (r < 0) r += m;
  return r;
}

BigInt pow_big(const BigInt& base, unsigned exp) { return boost::multiprecision::pow(base, exp); }

BigInt pow2(unsigned exp) {
  BigInt r = 1;
  r <<= exp;
  return r;
}

double log2_big(const BigInt& x) {
  unsigned bits = bit_length(x);
  if (bits <= 60) return std::log2(static_cast<double>(static_cast<std::uint64_t>(x)));
  unsigned shift = bits - 60;
  BigInt top = x >> shift;
  return std::log2(static_cast<double>(static_cast<std::uint64_t>(top))) + shift;
}

double to_double(const BigInt& x) { return x.convert_to<double>(); }

BigInt ceil_mul_ln(const BigInt& x, const BigInt& y) {
  if (x <= 0 || y <= 1) return 0;
  constexpr unsigned kFrac = 48;
  double ln_y = log2_big(y) * std::log(2.0);
  BigInt scaled = static_cast<std::uint64_t>(std::ceil(std::ldexp(ln_y, kFrac)));
  BigInt prod = x * scaled;
  BigInt q = prod >> kFrac;
  if ((q << kFrac) != prod) q += 1;
  return q;
}

unsigned ceil_log2(const BigInt& x) {
  if (x <= 1) return 0;
  return bit_length(BigInt(x - 1));
}

bool fits_u64(const BigInt& x) { return x >= 0 && bit_length(x) <= 64; }

std::uint64_t to_u64(const BigInt& x) {
  if (!fits_u64(x)) throw Error("integer does not fit in 64 bits");
  return static_cast<std::uint64_t>(x);
}

BigInt parse_bigint(const std::string& text) {
  if (text.empty()) throw FormatError("empty integer literal");
  std::size_t i = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  if (i == text.size()) throw FormatError("bad integer literal '" + text + "'");
  for (std::size_t j = i; j < text.size(); ++j)
    if (text[j] < '0' || text[j] > '9') throw FormatError("bad integer literal '" + text + "'");
  return BigInt(text);
}

}  // namespace wordstream
