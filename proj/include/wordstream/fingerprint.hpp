#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wordstream/automaton.hpp"
#include "wordstream/matrix_group.hpp"

namespace wordstream {

// Read-only view of a matrix fingerprint's sampled parameters and state.
struct FingerprintInfo {
  BigInt modulus;
  unsigned extension_degree = 1;
  std::vector<BigInt> point;
  std::vector<BigInt> matrix;
  bool degenerate = false;
};

class FingerprintInspect {
 public:
  virtual ~FingerprintInspect() = default;
  virtual FingerprintInfo inspect() const = 0;
};

double inverse_power(const BigInt& n, unsigned c);

struct LinearParams {
  BigInt prime_lo;     // N
  BigInt point_range;  // |S|
  unsigned entry_bits = 0;
  unsigned point_bits = 0;
  unsigned bits = 0;
};

struct NilpotentParams {
  BigInt prime_lo;
  unsigned entry_bits = 0;
  unsigned bits = 0;
};

struct PrimeCharParams {
  unsigned extension_degree = 1;
  BigInt point_range;
  unsigned entry_bits = 0;
  unsigned point_bits = 0;
  unsigned bits = 0;
};

LinearParams linear_params(const MatrixGenerators& gens, unsigned c, const BigInt& n);
NilpotentParams nilpotent_params(unsigned dim, unsigned c, const BigInt& n);
PrimeCharParams prime_char_params(const MatrixGenerators& gens, unsigned c, const BigInt& n);

// Matrix fingerprint over Z/p at a random point (characteristic 0), or over
// F_{p^e} when the generators carry a characteristic.
class LinearFingerprintRecipe final : public Recipe {
 public:
  LinearFingerprintRecipe(MatrixGenerators gens, unsigned c);
  const AlphabetPtr& alphabet() const override { return gens_.alphabet; }
  AutomatonPtr build(const BigInt& n, Rng rng) const override;
  unsigned space_bits(const BigInt& n) const override;
  double epsilon(const BigInt& n) const override;
  std::string describe() const override;
  const MatrixGenerators& generators() const { return gens_; }
  unsigned c() const { return c_; }

 private:
  MatrixGenerators gens_;
  unsigned c_;
};

// Unitriangular integer matrices modulo a small random prime.
class NilpotentFingerprintRecipe final : public Recipe {
 public:
  NilpotentFingerprintRecipe(AlphabetPtr alphabet, std::vector<IntMatrix> gens, unsigned c);
  const AlphabetPtr& alphabet() const override { return alphabet_; }
  AutomatonPtr build(const BigInt& n, Rng rng) const override;
  unsigned space_bits(const BigInt& n) const override;
  double epsilon(const BigInt& n) const override;
  std::string describe() const override;
  unsigned dim() const { return dim_; }

 private:
  AlphabetPtr alphabet_;
  std::vector<IntMatrix> forward_;
  std::vector<IntMatrix> backward_;
  unsigned dim_;
  unsigned c_;
};

AutomatonPtr build_linear_fingerprint(const MatrixGenerators& gens, unsigned c, const BigInt& n, std::uint64_t seed);
AutomatonPtr build_nilpotent_fingerprint(AlphabetPtr alphabet, std::vector<IntMatrix> gens, unsigned c, const BigInt& n,
                                         std::uint64_t seed);
AutomatonPtr prime_char_fingerprint(const MatrixGenerators& gens, unsigned c, const BigInt& n, std::uint64_t seed);

}  // namespace wordstream
