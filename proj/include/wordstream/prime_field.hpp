#pragma once

#include <cstdint>
#include <vector>

#include "wordstream/bigint.hpp"
#include "wordstream/errors.hpp"
#include "wordstream/primes.hpp"

namespace wordstream {

// Z/pZ for p < 2^63. Products use 64-bit arithmetic when p < 2^31.
class PrimeField64 {
 public:
  using Elem = std::uint64_t;

  explicit PrimeField64(std::uint64_t p) : p_(p), small_(p < (1ULL << 31)) {
    if (p < 2 || p >= (1ULL << 63)) throw ConstructionError("PrimeField64: modulus out of range");
  }

  std::uint64_t modulus() const { return p_; }
  bool small() const { return small_; }

  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  bool is_zero(Elem a) const { return a == 0; }
  Elem add(Elem a, Elem b) const {
    Elem s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  Elem sub(Elem a, Elem b) const { return a >= b ? a - b : a + (p_ - b); }
  Elem neg(Elem a) const { return a == 0 ? 0 : p_ - a; }
  Elem mul(Elem a, Elem b) const { return small_ ? (a * b) % p_ : mulmod_u64(a, b, p_); }
  Elem pow(Elem a, const BigInt& e) const {
    if (e == 0) return 1;
    if (a == 0) return 0;
    return powmod_u64(a, static_cast<std::uint64_t>(e % (p_ - 1)), p_);
  }
  Elem inv(Elem a) const {
    if (a == 0) throw Error("PrimeField64: inverse of zero");
    return powmod_u64(a, p_ - 2, p_);
  }
  Elem from(const BigInt& v) const { return static_cast<std::uint64_t>(mod_floor(v, BigInt(p_))); }
  Elem from_u64(std::uint64_t v) const { return v % p_; }
  BigInt index(Elem a) const { return BigInt(a); }

 private:
  std::uint64_t p_;
  bool small_;
};

// Z/pZ for arbitrary primes.
class PrimeFieldBig {
 public:
  using Elem = BigInt;

  explicit PrimeFieldBig(BigInt p) : p_(std::move(p)) {
    if (p_ < 2) throw ConstructionError("PrimeFieldBig: modulus out of range");
  }

  const BigInt& modulus() const { return p_; }

  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  bool is_zero(const Elem& a) const { return a == 0; }
  Elem add(const Elem& a, const Elem& b) const {
    Elem s = a + b;
    if (s >= p_) s -= p_;
    return s;
  }
  Elem sub(const Elem& a, const Elem& b) const {
    Elem s = a - b;
    if (s < 0) s += p_;
    return s;
  }
  Elem neg(const Elem& a) const { return a == 0 ? Elem(0) : Elem(p_ - a); }
  Elem mul(const Elem& a, const Elem& b) const { return a * b % p_; }
  Elem pow(const Elem& a, const BigInt& e) const { return boost::multiprecision::powm(a, e, p_); }
  Elem inv(const Elem& a) const {
    if (a == 0) throw Error("PrimeFieldBig: inverse of zero");
    return boost::multiprecision::powm(a, BigInt(p_ - 2), p_);
  }
  Elem from(const BigInt& v) const { return mod_floor(v, p_); }
  Elem from_u64(std::uint64_t v) const { return BigInt(v) % p_; }
  BigInt index(const Elem& a) const { return a; }

 private:
  BigInt p_;
};

}  // namespace wordstream
