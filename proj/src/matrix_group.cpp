#include "wordstream/matrix_group.hpp"

#include <sstream>

#include "wordstream/primes.hpp"

namespace wordstream {

namespace {

PolyMatrix identity_poly(unsigned r, const Poly& diag) {
  PolyMatrix m(r, r);
  for (unsigned i = 0; i < r; ++i)
    for (unsigned j = 0; j < r; ++j) m(i, j) = i == j ? diag : Poly(0);
  return m;
}

PolyMatrix multiply(const PolyMatrix& a, const PolyMatrix& b) {
  PolyMatrix c(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      Poly s;
      for (Eigen::Index k = 0; k < a.cols(); ++k)
        if (!a(i, k).is_zero() && !b(k, j).is_zero()) s += a(i, k) * b(k, j);
      c(i, j) = std::move(s);
    }
  return c;
}

PolyMatrix minor_matrix(const PolyMatrix& m, Eigen::Index row, Eigen::Index col) {
  PolyMatrix r(m.rows() - 1, m.cols() - 1);
  for (Eigen::Index i = 0, ri = 0; i < m.rows(); ++i) {
    if (i == row) continue;
    for (Eigen::Index j = 0, rj = 0; j < m.cols(); ++j) {
      if (j == col) continue;
      r(ri, rj++) = m(i, j);
    }
    ++ri;
  }
  return r;
}

std::string poly_matrix_key(const PolyMatrix& m) {
  std::string k;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) append_field(k, m(i, j).to_string());
  return k;
}

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p) { return powmod_u64(a % p, p - 2, p); }

}  // namespace

Poly determinant(const PolyMatrix& m) {
  if (m.rows() != m.cols()) throw Error("determinant: matrix not square");
  if (m.rows() == 0) return Poly(1);
  if (m.rows() == 1) return m(0, 0);
  Poly det;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (m(0, j).is_zero()) continue;
    Poly term = m(0, j) * determinant(minor_matrix(m, 0, j));
    if (j % 2)
      det -= term;
    else
      det += term;
  }
  return det;
}

PolyMatrix adjugate(const PolyMatrix& m) {
  const Eigen::Index r = m.rows();
  PolyMatrix adj(r, r);
  if (r == 1) {
    adj(0, 0) = Poly(1);
    return adj;
  }
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < r; ++j) {
      Poly c = determinant(minor_matrix(m, i, j));
      adj(j, i) = (i + j) % 2 ? -c : c;
    }
  return adj;
}

std::optional<RationalMatrix> inverse_exact(const RationalMatrix& m_in) {
  const Eigen::Index r = m_in.rows();
  RationalMatrix a = m_in;
  RationalMatrix inv = RationalMatrix::Identity(r, r);
  for (Eigen::Index col = 0; col < r; ++col) {
    Eigen::Index piv = col;
    while (piv < r && a(piv, col) == 0) ++piv;
    if (piv == r) return std::nullopt;
    a.row(col).swap(a.row(piv));
    inv.row(col).swap(inv.row(piv));
    Rational s = a(col, col);
    a.row(col) /= s;
    inv.row(col) /= s;
    for (Eigen::Index i = 0; i < r; ++i) {
      if (i == col || a(i, col) == 0) continue;
      Rational f = a(i, col);
      a.row(i) -= f * a.row(col);
      inv.row(i) -= f * inv.row(col);
    }
  }
  return inv;
}

Poly reduce_coefficients(const Poly& p, std::uint64_t modulus) {
  Poly out;
  for (const auto& [m, c] : p.terms()) {
    if (boost::multiprecision::denominator(c) != 1) throw ConstructionError("non-integral coefficient in characteristic p");
    BigInt v = mod_floor(boost::multiprecision::numerator(c), BigInt(modulus));
    if (v != 0) out += Poly::term(Rational(v), m);
  }
  return out;
}

PolyMatrix reduce_coefficients(const PolyMatrix& m, std::uint64_t modulus) {
  PolyMatrix r(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) r(i, j) = reduce_coefficients(m(i, j), modulus);
  return r;
}

PolyMatrix to_poly(const RationalMatrix& m) {
  PolyMatrix r(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) r(i, j) = Poly(m(i, j));
  return r;
}

IntMatrix int_matrix(std::initializer_list<std::initializer_list<long>> rows) {
  IntMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (long v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

RationalMatrix rational_matrix(std::initializer_list<std::initializer_list<long>> rows) {
  RationalMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (long v : row) m(i, j++) = Rational(v);
    ++i;
  }
  return m;
}

// ---- MatrixGenerators ----

unsigned MatrixGenerators::degree() const {
  unsigned d = denominator.total_degree();
  for (const auto* list : {&forward, &backward})
    for (const auto& m : *list)
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) d = std::max(d, m(i, j).total_degree());
  return d;
}

void MatrixGenerators::validate() const {
  if (!alphabet || alphabet->size() == 0) throw ConstructionError("matrix generators: empty alphabet");
  if (dim == 0) throw ConstructionError("matrix generators: dimension must be positive");
  if (forward.size() != alphabet->size() || backward.size() != alphabet->size())
    throw ConstructionError("matrix generators: one matrix pair per generator required");
  if (denominator.is_zero()) throw ConstructionError("matrix generators: zero denominator");
  if (characteristic && (!is_prime_u64(*characteristic) || *characteristic >= (1ULL << 31)))
    throw ConstructionError("matrix generators: characteristic must be a prime below 2^31");
  auto check_poly = [&](const Poly& p) {
    if (!p.has_integer_coefficients()) throw ConstructionError("matrix generators: scaled entries must have integer coefficients");
    if (p.num_vars() > vars) throw ConstructionError("matrix generators: entry uses more variables than declared");
  };
  check_poly(denominator);
  Poly t2 = denominator * denominator;
  if (characteristic) t2 = reduce_coefficients(t2, *characteristic);
  for (std::size_t a = 0; a < forward.size(); ++a) {
    for (const auto* m : {&forward[a], &backward[a]}) {
      if (m->rows() != dim || m->cols() != dim)
        throw ConstructionError("matrix generators: generator '" + alphabet->name(static_cast<std::uint32_t>(a)) + "' has wrong shape");
      for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) check_poly((*m)(i, j));
    }
    PolyMatrix prod = multiply(forward[a], backward[a]);
    if (characteristic) prod = reduce_coefficients(prod, *characteristic);
    PolyMatrix want = identity_poly(dim, t2);
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = 0; j < dim; ++j)
        if (prod(i, j) != want(i, j))
          throw ConstructionError("matrix generators: generator '" + alphabet->name(static_cast<std::uint32_t>(a)) +
                                  "' is not invertible with the given inverse");
  }
}

MatrixGenerators MatrixGenerators::from_rational(std::vector<std::string> names, const std::vector<RationalMatrix>& mats) {
  if (mats.empty()) throw ConstructionError("matrix generators: no matrices");
  MatrixGenerators g;
  g.alphabet = std::make_shared<Alphabet>(std::move(names));
  if (g.alphabet->size() != mats.size()) throw ConstructionError("matrix generators: names and matrices differ in count");
  g.dim = static_cast<unsigned>(mats[0].rows());
  std::vector<RationalMatrix> invs;
  BigInt lcm = 1;
  for (std::size_t a = 0; a < mats.size(); ++a) {
    if (mats[a].rows() != g.dim || mats[a].cols() != g.dim) throw ConstructionError("matrix generators: inconsistent shapes");
    auto inv = inverse_exact(mats[a]);
    if (!inv) throw ConstructionError("matrix generators: generator '" + g.alphabet->name(static_cast<std::uint32_t>(a)) + "' is singular");
    invs.push_back(*inv);
    for (const RationalMatrix* m : std::initializer_list<const RationalMatrix*>{&mats[a], &invs.back()})
      for (Eigen::Index i = 0; i < g.dim; ++i)
        for (Eigen::Index j = 0; j < g.dim; ++j) lcm = boost::multiprecision::lcm(lcm, boost::multiprecision::denominator((*m)(i, j)));
  }
  g.denominator = Poly(Rational(lcm));
  for (std::size_t a = 0; a < mats.size(); ++a) {
    g.forward.push_back(to_poly(RationalMatrix(mats[a] * Rational(lcm))));
    g.backward.push_back(to_poly(RationalMatrix(invs[a] * Rational(lcm))));
  }
  g.validate();
  return g;
}

MatrixGenerators MatrixGenerators::from_scaled(std::vector<std::string> names, unsigned dim, unsigned vars, Poly t,
                                               std::vector<PolyMatrix> forward,
                                               std::vector<std::optional<PolyMatrix>> backward,
                                               std::optional<std::uint64_t> characteristic) {
  MatrixGenerators g;
  g.alphabet = std::make_shared<Alphabet>(std::move(names));
  g.dim = dim;
  g.vars = vars;
  g.characteristic = characteristic;
  g.denominator = characteristic ? reduce_coefficients(t, *characteristic) : t;
  if (forward.size() != g.alphabet->size() || backward.size() != forward.size())
    throw ConstructionError("matrix generators: names and matrices differ in count");
  Poly t2 = g.denominator * g.denominator;
  for (std::size_t a = 0; a < forward.size(); ++a) {
    PolyMatrix f = characteristic ? reduce_coefficients(forward[a], *characteristic) : forward[a];
    if (f.rows() != dim || f.cols() != dim)
      throw ConstructionError("matrix generators: generator '" + g.alphabet->name(static_cast<std::uint32_t>(a)) + "' has wrong shape");
    PolyMatrix b;
    if (backward[a]) {
      b = characteristic ? reduce_coefficients(*backward[a], *characteristic) : *backward[a];
    } else {
      // t M^{-1} = t^2 adj(tM) / det(tM).
      Poly det = determinant(f);
      if (characteristic) det = reduce_coefficients(det, *characteristic);
      if (det.is_zero())
        throw ConstructionError("matrix generators: generator '" + g.alphabet->name(static_cast<std::uint32_t>(a)) + "' is singular");
      PolyMatrix adj = adjugate(f);
      b.resize(dim, dim);
      for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) {
          Poly num = t2 * adj(i, j);
          if (characteristic) {
            if (!det.is_constant())
              throw ConstructionError("matrix generators: inverse of '" + g.alphabet->name(static_cast<std::uint32_t>(a)) +
                                      "' must be given explicitly");
            auto c = static_cast<std::uint64_t>(boost::multiprecision::numerator(det.constant_value()));
            b(i, j) = reduce_coefficients(num * Poly(Rational(BigInt(inv_mod(c, *characteristic)))), *characteristic);
          } else {
            auto q = Poly::divide_exact(num, det);
            if (!q || !q->has_integer_coefficients())
              throw ConstructionError("matrix generators: inverse of '" + g.alphabet->name(static_cast<std::uint32_t>(a)) +
                                      "' is not exact; give it explicitly");
            b(i, j) = *q;
          }
        }
    }
    g.forward.push_back(std::move(f));
    g.backward.push_back(std::move(b));
  }
  g.validate();
  return g;
}

MatrixGenerators sanov_free(unsigned rank) {
  if (rank == 0) throw ConstructionError("free group rank must be positive");
  RationalMatrix a = rational_matrix({{1, 2}, {0, 1}});
  RationalMatrix b = rational_matrix({{1, 0}, {2, 1}});
  std::vector<RationalMatrix> mats;
  if (rank <= 2) {
    mats.push_back(a);
    if (rank == 2) mats.push_back(b);
  } else {
    // a^i b a^-i, i < rank, freely generate a free subgroup.
    RationalMatrix ai = RationalMatrix::Identity(2, 2);
    RationalMatrix ainv = *inverse_exact(a);
    RationalMatrix ai_inv = RationalMatrix::Identity(2, 2);
    for (unsigned i = 0; i < rank; ++i) {
      mats.push_back(ai * b * ai_inv);
      ai = ai * a;
      ai_inv = ainv * ai_inv;
    }
  }
  return MatrixGenerators::from_rational(default_names(rank), mats);
}

MatrixGenerators sl2_standard() {
  return MatrixGenerators::from_rational({"S", "T"}, {rational_matrix({{0, -1}, {1, 0}}), rational_matrix({{1, 1}, {0, 1}})});
}

MatrixGenerators dihedral_matrices() {
  return MatrixGenerators::from_rational({"r", "s"}, {rational_matrix({{1, 1}, {0, 1}}), rational_matrix({{-1, 0}, {0, 1}})});
}

MatrixGenerators abelian_diagonal(unsigned rank) {
  static const long primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  if (rank == 0 || rank > 16) throw ConstructionError("abelian_diagonal: rank must be in [1, 16]");
  std::vector<RationalMatrix> mats;
  std::vector<std::string> names;
  for (unsigned i = 0; i < rank; ++i) {
    RationalMatrix m(1, 1);
    m(0, 0) = Rational(primes[i]);
    mats.push_back(m);
    names.push_back(rank == 1 ? std::string("a") : "a" + std::to_string(i + 1));
  }
  return MatrixGenerators::from_rational(names, mats);
}

// ---- MatrixGroup ----

MatrixGroup::MatrixGroup(MatrixGenerators gens) : ExactGroup(gens.alphabet), gens_(std::move(gens)) {
  if (gens_.characteristic) throw ConstructionError("matrix oracle supports characteristic 0 only");
  gens_.validate();
}

std::string MatrixGroup::kind() const { return "matrix(" + std::to_string(gens_.dim) + ")"; }

void MatrixGroup::normalize(PolyMatrix& m, unsigned& k) const {
  if (gens_.denominator.is_constant()) {
    if (k == 0) return;
    Rational s = 1;
    Rational t = gens_.denominator.constant_value();
    for (unsigned i = 0; i < k; ++i) s *= t;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = m(i, j) * Poly(Rational(1) / s);
    k = 0;
    return;
  }
  while (k > 0) {
    PolyMatrix q(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        auto d = Poly::divide_exact(m(i, j), gens_.denominator);
        if (!d) return;
        q(i, j) = std::move(*d);
      }
    m = std::move(q);
    --k;
  }
}

Element MatrixGroup::identity() const {
  return box(Value{identity_poly(gens_.dim, Poly(1)), identity_poly(gens_.dim, Poly(1)), 0, 0});
}

Element MatrixGroup::generator(std::uint32_t gen) const {
  Value v{gens_.forward[gen], gens_.backward[gen], 1, 1};
  normalize(v.m, v.k);
  normalize(v.minv, v.kinv);
  return box(std::move(v));
}

Element MatrixGroup::mul(const Element& x, const Element& y) const {
  const Value& a = value(x);
  const Value& b = value(y);
  Value r{multiply(a.m, b.m), multiply(b.minv, a.minv), a.k + b.k, a.kinv + b.kinv};
  normalize(r.m, r.k);
  normalize(r.minv, r.kinv);
  return box(std::move(r));
}

Element MatrixGroup::inv(const Element& x) const {
  const Value& a = value(x);
  return box(Value{a.minv, a.m, a.kinv, a.k});
}

CanonicalKey MatrixGroup::key(const Element& x) const {
  const Value& a = value(x);
  std::string k;
  append_u32(k, a.k);
  k += poly_matrix_key(a.m);
  return k;
}

bool MatrixGroup::is_identity(const Element& x) const {
  const Value& a = value(x);
  if (a.k != 0) return false;
  for (Eigen::Index i = 0; i < a.m.rows(); ++i)
    for (Eigen::Index j = 0; j < a.m.cols(); ++j)
      if (a.m(i, j) != (i == j ? Poly(1) : Poly(0))) return false;
  return true;
}

std::string MatrixGroup::format(const Element& x) const {
  const Value& a = value(x);
  std::ostringstream out;
  out << '[';
  for (Eigen::Index i = 0; i < a.m.rows(); ++i) {
    out << (i ? ", [" : "[");
    for (Eigen::Index j = 0; j < a.m.cols(); ++j) out << (j ? ", " : "") << a.m(i, j).to_string();
    out << ']';
  }
  out << ']';
  if (a.k) out << " / t^" << a.k;
  return out.str();
}

std::vector<Word> MatrixGroup::relators() const { return relators_; }

// ---- UnitriangularGroup ----

IntMatrix unitriangular_inverse(const IntMatrix& m) {
  const Eigen::Index d = m.rows();
  // M = I + N with N nilpotent: M^-1 = sum (-N)^k.
  IntMatrix n = m - IntMatrix::Identity(d, d);
  IntMatrix term = IntMatrix::Identity(d, d);
  IntMatrix inv = IntMatrix::Identity(d, d);
  IntMatrix neg = -n;
  for (Eigen::Index k = 1; k < d; ++k) {
    term = term * neg;
    inv += term;
  }
  return inv;
}

UnitriangularGroup::UnitriangularGroup(std::vector<std::string> names, std::vector<IntMatrix> gens)
    : ExactGroup(std::make_shared<Alphabet>(std::move(names))), gens_(std::move(gens)) {
  if (gens_.empty() || gens_.size() != alphabet().size()) throw ConstructionError("UT: one matrix per generator required");
  dim_ = static_cast<unsigned>(gens_[0].rows());
  if (dim_ < 2) throw ConstructionError("UT: dimension must be at least 2");
  for (std::size_t a = 0; a < gens_.size(); ++a) {
    const auto& m = gens_[a];
    if (m.rows() != dim_ || m.cols() != dim_) throw ConstructionError("UT: inconsistent matrix shapes");
    for (unsigned i = 0; i < dim_; ++i)
      for (unsigned j = 0; j <= i; ++j)
        if (m(i, j) != (i == j ? 1 : 0))
          throw ConstructionError("UT: generator '" + alphabet().name(static_cast<std::uint32_t>(a)) + "' is not upper unitriangular");
  }
}

std::shared_ptr<UnitriangularGroup> UnitriangularGroup::heisenberg() {
  auto g = std::make_shared<UnitriangularGroup>(
      std::vector<std::string>{"x", "y", "z"},
      std::vector<IntMatrix>{int_matrix({{1, 1, 0}, {0, 1, 0}, {0, 0, 1}}), int_matrix({{1, 0, 0}, {0, 1, 1}, {0, 0, 1}}),
                             int_matrix({{1, 0, 1}, {0, 1, 0}, {0, 0, 1}})});
  Letter x{0, false}, y{1, false}, z{2, false};
  g->set_relators({{x, y, x.inverse(), y.inverse(), z.inverse()},
                   {x, z, x.inverse(), z.inverse()},
                   {y, z, y.inverse(), z.inverse()}});
  return g;
}

std::string UnitriangularGroup::kind() const { return "UT(" + std::to_string(dim_) + ")"; }

Element UnitriangularGroup::identity() const { return box(Pair{IntMatrix::Identity(dim_, dim_), IntMatrix::Identity(dim_, dim_)}); }

Element UnitriangularGroup::generator(std::uint32_t gen) const {
  return box(Pair{gens_[gen], unitriangular_inverse(gens_[gen])});
}

Element UnitriangularGroup::mul(const Element& x, const Element& y) const {
  const auto& a = unbox<Pair>(x);
  const auto& b = unbox<Pair>(y);
  return box(Pair{IntMatrix(a.first * b.first), IntMatrix(b.second * a.second)});
}

Element UnitriangularGroup::inv(const Element& x) const {
  const auto& a = unbox<Pair>(x);
  return box(Pair{a.second, a.first});
}

CanonicalKey UnitriangularGroup::key(const Element& x) const {
  const auto& m = matrix(x);
  std::string k;
  for (unsigned i = 0; i < dim_; ++i)
    for (unsigned j = i + 1; j < dim_; ++j) append_field(k, m(i, j).str());
  return k;
}

bool UnitriangularGroup::is_identity(const Element& x) const {
  const auto& m = matrix(x);
  for (unsigned i = 0; i < dim_; ++i)
    for (unsigned j = i + 1; j < dim_; ++j)
      if (m(i, j) != 0) return false;
  return true;
}

std::string UnitriangularGroup::format(const Element& x) const {
  const auto& m = matrix(x);
  std::ostringstream out;
  out << '[';
  for (unsigned i = 0; i < dim_; ++i) {
    out << (i ? ", [" : "[");
    for (unsigned j = 0; j < dim_; ++j) out << (j ? ", " : "") << m(i, j);
    out << ']';
  }
  out << ']';
  return out.str();
}

std::vector<Word> UnitriangularGroup::relators() const { return relators_; }

}  // namespace wordstream
