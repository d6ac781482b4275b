#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/gmp.hpp>

namespace wordstream {

using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

// Number of bits needed to write x >= 0 (0 for x == 0).
unsigned bit_length(const BigInt& x);
inline unsigned bit_length(std::uint64_t x) { return x == 0 ? 0u : 64u - static_cast<unsigned>(__builtin_clzll(x)); }

// Representative of a mod m in [0, m).
BigInt mod_floor(const BigInt& a, const BigInt& m);

BigInt pow_big(const BigInt& base, unsigned exp);
BigInt pow2(unsigned exp);

// Ceiling of x * ln(y) for x >= 0, y >= 1, with a relative error far below one unit
// for the magnitudes used here.
BigInt ceil_mul_ln(const BigInt& x, const BigInt& y);

// ceil(log2(x)) for x >= 1.
unsigned ceil_log2(const BigInt& x);

double to_double(const BigInt& x);
double log2_big(const BigInt& x);

bool fits_u64(const BigInt& x);
std::uint64_t to_u64(const BigInt& x);

BigInt parse_bigint(const std::string& text);

}  // namespace wordstream
