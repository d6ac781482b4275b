#include "wordstream/extension_field.hpp"

#include "wordstream/errors.hpp"
#include "wordstream/primes.hpp"

namespace wordstream {

namespace fp_poly {

namespace {

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p) { return powmod_u64(a, p - 2, p); }

std::vector<std::uint64_t> prime_factors(unsigned n) {
  std::vector<std::uint64_t> out;
  for (unsigned q = 2; q * q <= n; ++q) {
    if (n % q == 0) {
      out.push_back(q);
      while (n % q == 0) n /= q;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly add(const Poly& a, const Poly& b, std::uint64_t p) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    std::uint64_t x = i < a.size() ? a[i] : 0;
    std::uint64_t y = i < b.size() ? b[i] : 0;
    r[i] = (x + y) % p;
  }
  trim(r);
  return r;
}

Poly sub(const Poly& a, const Poly& b, std::uint64_t p) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    std::uint64_t x = i < a.size() ? a[i] : 0;
    std::uint64_t y = i < b.size() ? b[i] : 0;
    r[i] = (x + p - y) % p;
  }
  trim(r);
  return r;
}

Poly mul(const Poly& a, const Poly& b, std::uint64_t p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + mulmod_u64(a[i], b[j], p)) % p;
  }
  trim(r);
  return r;
}

Poly mod(Poly a, const Poly& m, std::uint64_t p) {
  trim(a);
  if (m.empty()) throw Error("fp_poly::mod: zero modulus");
  std::size_t dm = m.size() - 1;
  std::uint64_t lead_inv = inv_mod(m.back(), p);
  while (a.size() > dm) {
    std::uint64_t coef = mulmod_u64(a.back(), lead_inv, p);
    std::size_t shift = a.size() - 1 - dm;
    for (std::size_t j = 0; j <= dm; ++j)
      a[shift + j] = (a[shift + j] + p - mulmod_u64(coef, m[j], p)) % p;
    trim(a);
  }
  return a;
}

Poly mulmod(const Poly& a, const Poly& b, const Poly& m, std::uint64_t p) { return mod(mul(a, b, p), m, p); }

Poly powmod(const Poly& a, const BigInt& e, const Poly& m, std::uint64_t p) {
  Poly result = mod(Poly{1}, m, p);
  Poly base = mod(a, m, p);
  for (unsigned i = 0, bits = bit_length(e); i < bits; ++i) {
    if (boost::multiprecision::bit_test(e, i)) result = mulmod(result, base, m, p);
    if (i + 1 < bits) base = mulmod(base, base, m, p);
  }
  return result;
}

Poly gcd(Poly a, Poly b, std::uint64_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    std::uint64_t li = inv_mod(a.back(), p);
    for (auto& c : a) c = mulmod_u64(c, li, p);
  }
  return a;
}

bool is_irreducible(const Poly& f_in, std::uint64_t p) {
  Poly f = f_in;
  trim(f);
  if (f.size() < 2) return false;
  unsigned e = static_cast<unsigned>(f.size() - 1);
  if (e == 1) return true;
  const Poly x{0, 1};
  // Rabin: x^{p^e} = x mod f and gcd(x^{p^{e/q}} - x, f) = 1 for primes q | e.
  auto frobenius_power = [&](unsigned k) {
    Poly r = mod(x, f, p);
    for (unsigned i = 0; i < k; ++i) r = powmod(r, BigInt(p), f, p);
    return r;
  };
  if (sub(frobenius_power(e), mod(x, f, p), p).size() != 0) return false;
  for (std::uint64_t q : prime_factors(e)) {
    Poly h = sub(frobenius_power(static_cast<unsigned>(e / q)), mod(x, f, p), p);
    Poly g = gcd(f, h, p);
    if (g.size() != 1) return false;
  }
  return true;
}

Poly lowest_irreducible(std::uint64_t p, unsigned e) {
  if (e == 0) throw ConstructionError("lowest_irreducible: degree 0");
  BigInt limit = pow_big(BigInt(p), e);
  for (BigInt idx = 0; idx < limit; ++idx) {
    Poly f(e + 1, 0);
    BigInt v = idx;
    // Digit e-1 is the most significant, so idx order is lexicographic from the top coefficient.
    for (unsigned i = 0; i < e; ++i) {
      f[i] = static_cast<std::uint64_t>(v % p);
      v /= p;
    }
    f[e] = 1;
    if (is_irreducible(f, p)) return f;
  }
  throw ConstructionError("lowest_irreducible: none found");
}

}  // namespace fp_poly

ExtensionField::ExtensionField(std::uint64_t p, unsigned e) : p_(p), e_(e) {
  if (p < 2 || p >= (1ULL << 31) || !is_prime_u64(p)) throw ConstructionError("ExtensionField: characteristic must be a prime below 2^31");
  if (e == 0) throw ConstructionError("ExtensionField: degree must be positive");
  f_ = fp_poly::lowest_irreducible(p, e);
}

BigInt ExtensionField::order() const { return pow_big(BigInt(p_), e_); }

ExtensionField::Elem ExtensionField::one() const {
  Elem r(e_, 0);
  r[0] = 1;
  return r;
}

bool ExtensionField::is_zero(const Elem& a) const {
  for (auto c : a)
    if (c) return false;
  return true;
}

ExtensionField::Elem ExtensionField::add(const Elem& a, const Elem& b) const {
  Elem r(e_);
  for (unsigned i = 0; i < e_; ++i) {
    std::uint64_t s = a[i] + b[i];
    r[i] = s >= p_ ? s - p_ : s;
  }
  return r;
}

ExtensionField::Elem ExtensionField::sub(const Elem& a, const Elem& b) const {
  Elem r(e_);
  for (unsigned i = 0; i < e_; ++i) r[i] = a[i] >= b[i] ? a[i] - b[i] : a[i] + p_ - b[i];
  return r;
}

ExtensionField::Elem ExtensionField::neg(const Elem& a) const {
  Elem r(e_);
  for (unsigned i = 0; i < e_; ++i) r[i] = a[i] ? p_ - a[i] : 0;
  return r;
}

ExtensionField::Elem ExtensionField::mul(const Elem& a, const Elem& b) const {
  std::vector<std::uint64_t> prod(2 * e_ - 1, 0);
  for (unsigned i = 0; i < e_; ++i) {
    if (a[i] == 0) continue;
    for (unsigned j = 0; j < e_; ++j) prod[i + j] = (prod[i + j] + a[i] * b[j]) % p_;
  }
  // f is monic of degree e.
  for (std::size_t k = prod.size(); k-- > e_;) {
    std::uint64_t c = prod[k];
    if (c == 0) continue;
    prod[k] = 0;
    std::size_t shift = k - e_;
    for (unsigned j = 0; j < e_; ++j) prod[shift + j] = (prod[shift + j] + (p_ - c) * f_[j]) % p_;
  }
  prod.resize(e_);
  return prod;
}

ExtensionField::Elem ExtensionField::pow(const Elem& a, const BigInt& k) const {
  Elem result = one();
  Elem base = a;
  for (unsigned i = 0, bits = bit_length(k); i < bits; ++i) {
    if (boost::multiprecision::bit_test(k, i)) result = mul(result, base);
    if (i + 1 < bits) base = mul(base, base);
  }
  return result;
}

ExtensionField::Elem ExtensionField::inv(const Elem& a) const {
  if (is_zero(a)) throw Error("ExtensionField: inverse of zero");
  return pow(a, BigInt(order() - 2));
}

ExtensionField::Elem ExtensionField::from(const BigInt& v) const {
  Elem r = zero();
  r[0] = static_cast<std::uint64_t>(mod_floor(v, BigInt(p_)));
  return r;
}

ExtensionField::Elem ExtensionField::from_u64(std::uint64_t v) const {
  Elem r = zero();
  r[0] = v % p_;
  return r;
}

ExtensionField::Elem ExtensionField::from_index(const BigInt& i) const {
  if (i < 0 || i >= order()) throw Error("ExtensionField: index out of range");
  Elem r(e_);
  BigInt v = i;
  for (unsigned k = 0; k < e_; ++k) {
    r[k] = static_cast<std::uint64_t>(v % p_);
    v /= p_;
  }
  return r;
}

BigInt ExtensionField::index(const Elem& a) const {
  BigInt v = 0;
  for (unsigned k = e_; k-- > 0;) v = v * p_ + a[k];
  return v;
}

}  // namespace wordstream
