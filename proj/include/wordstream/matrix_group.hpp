#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wordstream/exact_group.hpp"
#include "wordstream/poly.hpp"

namespace wordstream {

using PolyMatrix = Eigen::Matrix<Poly, Eigen::Dynamic, Eigen::Dynamic>;
using RationalMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using IntMatrix = Eigen::Matrix<BigInt, Eigen::Dynamic, Eigen::Dynamic>;

Poly determinant(const PolyMatrix& m);
PolyMatrix adjugate(const PolyMatrix& m);
std::optional<RationalMatrix> inverse_exact(const RationalMatrix& m);
Poly reduce_coefficients(const Poly& p, std::uint64_t modulus);
PolyMatrix reduce_coefficients(const PolyMatrix& m, std::uint64_t modulus);
PolyMatrix to_poly(const RationalMatrix& m);
IntMatrix int_matrix(std::initializer_list<std::initializer_list<long>> rows);
RationalMatrix rational_matrix(std::initializer_list<std::initializer_list<long>> rows);

// Generators M_a of a linear group, stored scaled as t*M_a and t*M_a^{-1} with
// entries in Z[x_1..x_m] (or F_p[x_1..x_m] when characteristic is set).
struct MatrixGenerators {
  AlphabetPtr alphabet;
  unsigned dim = 0;
  unsigned vars = 0;
  Poly denominator = Poly(1);
  std::vector<PolyMatrix> forward;
  std::vector<PolyMatrix> backward;
  std::optional<std::uint64_t> characteristic;

  // Max total degree of t and of all scaled entries.
  unsigned degree() const;
  // Throws ConstructionError unless forward[a] * backward[a] = t^2 * I.
  void validate() const;

  static MatrixGenerators from_rational(std::vector<std::string> names, const std::vector<RationalMatrix>& mats);
  // Missing backward matrices are derived when the inverse is exact.
  static MatrixGenerators from_scaled(std::vector<std::string> names, unsigned dim, unsigned vars, Poly t,
                                      std::vector<PolyMatrix> forward,
                                      std::vector<std::optional<PolyMatrix>> backward,
                                      std::optional<std::uint64_t> characteristic = std::nullopt);
};

MatrixGenerators sanov_free(unsigned rank);
MatrixGenerators sl2_standard();
MatrixGenerators dihedral_matrices();
MatrixGenerators abelian_diagonal(unsigned rank);

// Exact oracle over Q(x_1..x_m): elements P / t^k with k minimal.
class MatrixGroup final : public ExactGroup {
 public:
  explicit MatrixGroup(MatrixGenerators gens);
  std::string kind() const override;
  Element identity() const override;
  Element generator(std::uint32_t gen) const override;
  Element mul(const Element& x, const Element& y) const override;
  Element inv(const Element& x) const override;
  CanonicalKey key(const Element& x) const override;
  bool is_identity(const Element& x) const override;
  using ExactGroup::is_identity;
  std::string format(const Element& x) const override;
  std::vector<Word> relators() const override;
  const MatrixGenerators& generators() const { return gens_; }

  struct Value {
    PolyMatrix m;
    PolyMatrix minv;
    unsigned k = 0;
    unsigned kinv = 0;
  };
  const Value& value(const Element& x) const { return unbox<Value>(x); }

 private:
  void normalize(PolyMatrix& m, unsigned& k) const;
  MatrixGenerators gens_;
  std::vector<Word> relators_;
};

// Upper unitriangular integer matrices.
class UnitriangularGroup final : public ExactGroup {
 public:
  UnitriangularGroup(std::vector<std::string> names, std::vector<IntMatrix> gens);
  static std::shared_ptr<UnitriangularGroup> heisenberg();
  std::string kind() const override;
  Element identity() const override;
  Element generator(std::uint32_t gen) const override;
  Element mul(const Element& x, const Element& y) const override;
  Element inv(const Element& x) const override;
  CanonicalKey key(const Element& x) const override;
  bool is_identity(const Element& x) const override;
  using ExactGroup::is_identity;
  std::string format(const Element& x) const override;
  std::vector<Word> relators() const override;
  unsigned dim() const { return dim_; }
  const std::vector<IntMatrix>& matrices() const { return gens_; }
  const IntMatrix& matrix(const Element& x) const { return unbox<Pair>(x).first; }
  void set_relators(std::vector<Word> r) { relators_ = std::move(r); }

 private:
  using Pair = std::pair<IntMatrix, IntMatrix>;
  unsigned dim_;
  std::vector<IntMatrix> gens_;
  std::vector<Word> relators_;
};

IntMatrix unitriangular_inverse(const IntMatrix& m);

}  // namespace wordstream
