#pragma once

#include <cstdint>
#include <vector>

#include "wordstream/bigint.hpp"

namespace wordstream {

// Dense polynomials over F_p with little-endian coefficients.
namespace fp_poly {

using Poly = std::vector<std::uint64_t>;

void trim(Poly& a);
Poly add(const Poly& a, const Poly& b, std::uint64_t p);
Poly sub(const Poly& a, const Poly& b, std::uint64_t p);
Poly mul(const Poly& a, const Poly& b, std::uint64_t p);
Poly mod(Poly a, const Poly& m, std::uint64_t p);
Poly mulmod(const Poly& a, const Poly& b, const Poly& m, std::uint64_t p);
Poly powmod(const Poly& a, const BigInt& e, const Poly& m, std::uint64_t p);
Poly gcd(Poly a, Poly b, std::uint64_t p);
bool is_irreducible(const Poly& f, std::uint64_t p);
// Monic irreducible of degree e whose coefficient vector, read from the top
// coefficient down, is lexicographically smallest.
Poly lowest_irreducible(std::uint64_t p, unsigned e);

}  // namespace fp_poly

// F_{p^e} = F_p[x]/(f) with f = fp_poly::lowest_irreducible(p, e).
class ExtensionField {
 public:
  using Elem = std::vector<std::uint64_t>;

  ExtensionField(std::uint64_t p, unsigned e);

  std::uint64_t characteristic() const { return p_; }
  unsigned degree() const { return e_; }
  const fp_poly::Poly& modulus() const { return f_; }
  BigInt order() const;
  unsigned coefficient_bits() const { return bit_length(p_ - 1); }

  Elem zero() const { return Elem(e_, 0); }
  Elem one() const;
  bool is_zero(const Elem& a) const;
  Elem add(const Elem& a, const Elem& b) const;
  Elem sub(const Elem& a, const Elem& b) const;
  Elem neg(const Elem& a) const;
  Elem mul(const Elem& a, const Elem& b) const;
  Elem pow(const Elem& a, const BigInt& k) const;
  Elem inv(const Elem& a) const;
  Elem from(const BigInt& v) const;
  Elem from_u64(std::uint64_t v) const;
  // Base-p digits of i as coefficients; i < p^e.
  Elem from_index(const BigInt& i) const;
  BigInt index(const Elem& a) const;

 private:
  std::uint64_t p_;
  unsigned e_;
  fp_poly::Poly f_;
};

}  // namespace wordstream
