#include "wordstream/poly.hpp"

#include <cctype>
#include <sstream>

#include "wordstream/errors.hpp"

namespace wordstream {

namespace {

void trim(Poly::Monomial& m) {
  while (!m.empty() && m.back() == 0) m.pop_back();
}

bool divides(const Poly::Monomial& a, const Poly::Monomial& b) {
  if (a.size() > b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

Poly::Monomial quotient(const Poly::Monomial& b, const Poly::Monomial& a) {
  Poly::Monomial r = b;
  for (std::size_t i = 0; i < a.size(); ++i) r[i] -= a[i];
  trim(r);
  return r;
}

Poly::Monomial product(const Poly::Monomial& a, const Poly::Monomial& b) {
  Poly::Monomial r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return r;
}

}  // namespace

Poly::Poly(const Rational& c) {
  if (c != 0) terms_.emplace(Monomial{}, c);
}

Poly Poly::variable(unsigned index) {
  Monomial m(index + 1, 0);
  m[index] = 1;
  return term(1, m);
}

Poly Poly::term(Rational coef, Monomial exps) {
  trim(exps);
  Poly p;
  if (coef != 0) p.terms_.emplace(std::move(exps), std::move(coef));
  return p;
}

bool Poly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }

Rational Poly::constant_value() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? Rational(0) : it->second;
}

unsigned Poly::total_degree() const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_) {
    unsigned s = 0;
    for (auto e : m) s += e;
    d = std::max(d, s);
  }
  return d;
}

unsigned Poly::num_vars() const {
  std::size_t v = 0;
  for (const auto& [m, c] : terms_) v = std::max(v, m.size());
  return static_cast<unsigned>(v);
}

bool Poly::has_integer_coefficients() const {
  for (const auto& [m, c] : terms_)
    if (boost::multiprecision::denominator(c) != 1) return false;
  return true;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly r;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) r.add_term(product(ma, mb), ca * cb);
  return r;
}

Poly& Poly::operator*=(const Poly& o) { return *this = *this * o; }

std::optional<Poly> Poly::divide_exact(const Poly& num, const Poly& den) {
  if (den.is_zero()) throw Error("Poly::divide_exact: division by zero");
  Poly q;
  Poly rem = num;
  const auto& [lead_m, lead_c] = *den.terms_.rbegin();
  while (!rem.is_zero()) {
    const auto& [rm, rc] = *rem.terms_.rbegin();
    if (!divides(lead_m, rm)) return std::nullopt;
    Poly t = term(rc / lead_c, quotient(rm, lead_m));
    q += t;
    rem -= t * den;
  }
  return q;
}

BigInt Poly::evaluate(const std::vector<BigInt>& point) const {
  BigInt total = 0;
  for (const auto& [m, c] : terms_) {
    if (boost::multiprecision::denominator(c) != 1) throw Error("Poly::evaluate: non-integral coefficient");
    BigInt t = boost::multiprecision::numerator(c);
    if (m.size() > point.size()) throw Error("Poly::evaluate: too few coordinates");
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i]) t *= pow_big(point[i], m[i]);
    total += t;
  }
  return total;
}

std::string Poly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    if (!first) out << '+';
    first = false;
    out << it->second;
    if (!it->first.empty()) {
      out << ':';
      for (std::size_t i = 0; i < it->first.size(); ++i) out << (i ? "," : "") << it->first[i];
    }
  }
  return out.str();
}

Poly Poly::parse(const std::string& text_in, unsigned vars) {
  std::string text;
  for (char ch : text_in)
    if (!std::isspace(static_cast<unsigned char>(ch))) text += ch;
  if (text.empty()) throw FormatError("empty polynomial");
  Poly result;
  // Split on '+' that is not a sign directly after ':' , ',' or start.
  std::vector<std::string> parts;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    if (ch == '+' && !cur.empty()) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (cur.empty()) throw FormatError("dangling '+' in polynomial '" + text + "'");
  parts.push_back(cur);
  for (const auto& part : parts) {
    auto colon = part.find(':');
    std::string coef_text = part.substr(0, colon);
    Rational coef;
    try {
      auto slash = coef_text.find('/');
      if (slash == std::string::npos) {
        coef = Rational(parse_bigint(coef_text));
      } else {
        BigInt num = parse_bigint(coef_text.substr(0, slash));
        BigInt den = parse_bigint(coef_text.substr(slash + 1));
        if (den == 0) throw FormatError("zero denominator");
        coef = Rational(num, den);
      }
    } catch (const FormatError&) {
      throw FormatError("bad coefficient '" + coef_text + "' in polynomial '" + text + "'");
    }
    Monomial m;
    if (colon != std::string::npos) {
      std::string exps = part.substr(colon + 1);
      std::stringstream ss(exps);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        BigInt e;
        try {
          e = parse_bigint(tok);
        } catch (const FormatError&) {
          throw FormatError("bad exponent '" + tok + "' in polynomial '" + text + "'");
        }
        if (e < 0 || e > 100000) throw FormatError("exponent out of range in polynomial '" + text + "'");
        m.push_back(static_cast<std::uint32_t>(e));
      }
      if (m.size() != vars)
        throw FormatError("monomial '" + part + "' has " + std::to_string(m.size()) + " exponents, expected " +
                          std::to_string(vars));
    }
    result += term(coef, m);
  }
  return result;
}

}  // namespace wordstream
