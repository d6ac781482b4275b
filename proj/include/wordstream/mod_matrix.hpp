#pragma once

#include <utility>
#include <vector>

#include "wordstream/bigint.hpp"
#include "wordstream/prime_field.hpp"

namespace wordstream {

// Square matrix over a runtime-parameterized ring. Eigen cannot carry a
// runtime modulus in its scalar type, so arithmetic goes through Field.
template <class Field>
class ModMatrix {
 public:
  using Elem = typename Field::Elem;

  ModMatrix() = default;
  ModMatrix(const Field& f, unsigned r) : r_(r), a_(static_cast<std::size_t>(r) * r, f.zero()) {}

  static ModMatrix identity(const Field& f, unsigned r) {
    ModMatrix m(f, r);
    for (unsigned i = 0; i < r; ++i) m(i, i) = f.one();
    return m;
  }

  unsigned dim() const { return r_; }
  Elem& operator()(unsigned i, unsigned j) { return a_[static_cast<std::size_t>(i) * r_ + j]; }
  const Elem& operator()(unsigned i, unsigned j) const { return a_[static_cast<std::size_t>(i) * r_ + j]; }
  const std::vector<Elem>& data() const { return a_; }
  bool operator==(const ModMatrix& o) const { return r_ == o.r_ && a_ == o.a_; }

 private:
  unsigned r_ = 0;
  std::vector<Elem> a_;
};

template <class Field>
void multiply_into(const Field& f, const ModMatrix<Field>& a, const ModMatrix<Field>& b, ModMatrix<Field>& out) {
  const unsigned r = a.dim();
  for (unsigned i = 0; i < r; ++i)
    for (unsigned j = 0; j < r; ++j) {
      auto s = f.zero();
      for (unsigned k = 0; k < r; ++k) s = f.add(s, f.mul(a(i, k), b(k, j)));
      out(i, j) = std::move(s);
    }
}

inline void multiply_into(const PrimeField64& f, const ModMatrix<PrimeField64>& a, const ModMatrix<PrimeField64>& b,
                          ModMatrix<PrimeField64>& out) {
  const unsigned r = a.dim();
  const std::uint64_t p = f.modulus();
  if (f.small()) {
    // Products are below 2^62; reduce every 3 terms.
    for (unsigned i = 0; i < r; ++i)
      for (unsigned j = 0; j < r; ++j) {
        std::uint64_t s = 0;
        for (unsigned k = 0; k < r; ++k) {
          s += a(i, k) * b(k, j);
          if (k % 3 == 2) s %= p;
        }
        out(i, j) = s % p;
      }
    return;
  }
  for (unsigned i = 0; i < r; ++i)
    for (unsigned j = 0; j < r; ++j) {
      unsigned __int128 s = 0;
      for (unsigned k = 0; k < r; ++k) {
        s += static_cast<unsigned __int128>(a(i, k)) * b(k, j);
        if (k % 3 == 2) s %= p;
      }
      out(i, j) = static_cast<std::uint64_t>(s % p);
    }
}

template <class Field>
ModMatrix<Field> multiply(const Field& f, const ModMatrix<Field>& a, const ModMatrix<Field>& b) {
  ModMatrix<Field> out(f, a.dim());
  multiply_into(f, a, b, out);
  return out;
}

template <class Field>
ModMatrix<Field> power(const Field& f, const ModMatrix<Field>& m, const BigInt& k) {
  ModMatrix<Field> result = ModMatrix<Field>::identity(f, m.dim());
  ModMatrix<Field> base = m;
  for (unsigned i = 0, bits = bit_length(k); i < bits; ++i) {
    if (boost::multiprecision::bit_test(k, i)) result = multiply(f, result, base);
    if (i + 1 < bits) base = multiply(f, base, base);
  }
  return result;
}

template <class Field>
ModMatrix<Field> scaled(const Field& f, const ModMatrix<Field>& m, const typename Field::Elem& s) {
  ModMatrix<Field> out(f, m.dim());
  for (unsigned i = 0; i < m.dim(); ++i)
    for (unsigned j = 0; j < m.dim(); ++j) out(i, j) = f.mul(m(i, j), s);
  return out;
}

}  // namespace wordstream
