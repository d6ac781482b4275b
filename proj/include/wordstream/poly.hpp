#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wordstream/bigint.hpp"

namespace wordstream {

// Sparse multivariate polynomial with rational coefficients. Exponent vectors
// carry no trailing zeros, so std::vector ordering is the lex monomial order.
class Poly {
 public:
  using Monomial = std::vector<std::uint32_t>;

  Poly() = default;
  Poly(int c) : Poly(Rational(c)) {}
  Poly(const Rational& c);
  static Poly variable(unsigned index);
  static Poly term(Rational coef, Monomial exps);

  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_value() const;
  unsigned total_degree() const;
  unsigned num_vars() const;
  bool has_integer_coefficients() const;

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  // q with num = q * den, if it exists.
  static std::optional<Poly> divide_exact(const Poly& num, const Poly& den);

  // Evaluate at integer point; coefficients must be integral.
  BigInt evaluate(const std::vector<BigInt>& point) const;

  // Sparse text form: "coef:e1,e2+coef:e1,e2"; "0" for zero.
  std::string to_string() const;
  static Poly parse(const std::string& text, unsigned vars);

 private:
  void add_term(const Monomial& m, const Rational& c);
  std::map<Monomial, Rational> terms_;
};

}  // namespace wordstream

namespace Eigen {

template <>
struct NumTraits<wordstream::Poly> : GenericNumTraits<wordstream::Poly> {
  using Real = wordstream::Poly;
  using NonInteger = wordstream::Poly;
  using Nested = wordstream::Poly;
  using Literal = wordstream::Poly;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 20,
    AddCost = 50,
    MulCost = 100
  };
};

}  // namespace Eigen
