#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wordstream/automaton.hpp"
#include "wordstream/exact_group.hpp"
#include "wordstream/extension_field.hpp"

namespace wordstream {

// ---- change of generators ----

class ChangeGeneratorsRecipe final : public Recipe {
 public:
  ChangeGeneratorsRecipe(RecipePtr inner, AlphabetPtr alphabet, std::vector<Word> images);
  const AlphabetPtr& alphabet() const override { return alphabet_; }
  AutomatonPtr build(const BigInt& n, Rng rng) const override;
  unsigned space_bits(const BigInt& n) const override;
  double epsilon(const BigInt& n) const override;
  std::string describe() const override;
  unsigned stretch() const { return c_; }

 private:
  RecipePtr inner_;
  AlphabetPtr alphabet_;
  std::vector<Word> images_;
  unsigned c_;
};

// inverse_images, when given, must be the reversed inverses of images.
RecipePtr change_generators(RecipePtr inner, AlphabetPtr alphabet, std::vector<Word> images,
                            std::optional<std::vector<Word>> inverse_images = std::nullopt);

// ---- direct product ----

class DirectProductRecipe final : public Recipe {
 public:
  DirectProductRecipe(RecipePtr left, RecipePtr right);
  const AlphabetPtr& alphabet() const override { return layout_.alphabet; }
  AutomatonPtr build(const BigInt& n, Rng rng) const override;
  unsigned space_bits(const BigInt& n) const override;
  double epsilon(const BigInt& n) const override;
  std::string describe() const override;
  const CombinedAlphabet& layout() const { return layout_; }

 private:
  RecipePtr left_, right_;
  CombinedAlphabet layout_;
};

RecipePtr direct_product(RecipePtr left, RecipePtr right);

// ---- finite extension ----

// H with finite-index subgroup G = <Sigma>, coset representatives h_1 = 1, h_2..h_k.
// Coset indices are 0-based; coset letters name h_2..h_k.
struct ExtensionData {
  AlphabetPtr base_alphabet;
  std::vector<std::string> coset_names;
  // conj[a][i] = g(a, i) with h_i a = g(a, i) h_i.
  std::vector<std::vector<Word>> conj;
  // h_i h_j = mult[i][j] h_{alpha[i][j]}.
  std::vector<std::vector<std::uint32_t>> alpha;
  std::vector<std::vector<Word>> mult;

  std::uint32_t cosets() const { return static_cast<std::uint32_t>(coset_names.size() + 1); }
  // Sigma followed by the coset letters.
  AlphabetPtr alphabet() const;
  void validate() const;
  // Checks every table relation in an exact oracle over alphabet().
  void verify(const ExactGroup& big) const;
};

class FiniteExtensionRecipe final : public Recipe {
 public:
  FiniteExtensionRecipe(RecipePtr inner, ExtensionData ext);
  const AlphabetPtr& alphabet() const override { return alphabet_; }
  AutomatonPtr build(const BigInt& n, Rng rng) const override;
  unsigned space_bits(const BigInt& n) const override;
  double epsilon(const BigInt& n) const override;
  std::string describe() const override;
  unsigned stretch() const { return c_; }

  struct Move {
    Word feed;
    std::uint32_t target;
  };
  // Transition for reading letter code a in coset i.
  const Move& move(std::uint32_t coset, std::uint32_t code) const { return moves_[coset * alphabet_->letter_count() + code]; }

 private:
  RecipePtr inner_;
  ExtensionData ext_;
  AlphabetPtr alphabet_;
  std::vector<Move> moves_;
  unsigned c_;
};

RecipePtr finite_extension(RecipePtr inner, ExtensionData ext);

// Exact oracle for H from an oracle of G and the extension tables. Elements are
// pairs (x, i) standing for x h_i; the base group must provide word_of.
class ExtensionGroup final : public ExactGroup {
 public:
  ExtensionGroup(GroupPtr base, ExtensionData ext);
  std::string kind() const override;
  Element identity() const override;
  Element generator(std::uint32_t gen) const override;
  Element mul(const Element& x, const Element& y) const override;
  Element inv(const Element& x) const override;
  CanonicalKey key(const Element& x) const override;
  std::string format(const Element& x) const override;
  std::vector<Word> relators() const override;
  // Throws ConstructionError unless base relators survive every conjugation
  // map and coset multiplication is associative.
  void check_consistency() const;
  const ExtensionData& data() const { return ext_; }

  struct Value {
    Element x;
    std::uint32_t coset = 0;
  };

 private:
  Word conjugate(const Word& w, std::uint32_t coset) const;
  Word base_word(const Element& x) const;
  GroupPtr base_;
  ExtensionData ext_;
};

// ---- free product ----

class FreeProductRecipe final : public Recipe {
 public:
  FreeProductRecipe(RecipePtr left, RecipePtr right, unsigned c_f2);
  const AlphabetPtr& alphabet() const override { return layout_.alphabet; }
  AutomatonPtr build(const BigInt& n, Rng rng) const override;
  unsigned space_bits(const BigInt& n) const override;
  double epsilon(const BigInt& n) const override;
  std::string describe() const override;
  const CombinedAlphabet& layout() const { return layout_; }
  // m = n (2 |P_n| |Q_n| + 1).
  BigInt f2_bound(const BigInt& n) const;
  const RecipePtr& f2() const { return f2_; }
  const RecipePtr& left() const { return left_; }
  const RecipePtr& right() const { return right_; }

 private:
  RecipePtr left_, right_, f2_;
  CombinedAlphabet layout_;
};

class FreeProductMachine final : public StreamAutomaton {
 public:
  FreeProductMachine(const FreeProductRecipe& recipe, const BigInt& n, Rng rng);
  const StreamAutomaton& left() const { return *left_; }
  const StreamAutomaton& right() const { return *right_; }
  const StreamAutomaton& f2() const { return *f2_; }
  std::uint64_t emissions() const { return emissions_; }
  // f(p, q) = index(p) |Q| + index(q) + 1.
  BigInt pairing(const BigInt& p, const BigInt& q) const { return p * q_size_ + q + 1; }

 protected:
  void do_step(Letter a) override;
  BigInt pack() const override;
  void do_reset() override;

 private:
  void emit(bool inverse_b);
  CombinedAlphabet layout_;
  AutomatonPtr left_, right_, f2_;
  BigInt q_size_;
  int phase_ = -1;
  std::uint64_t emissions_ = 0;
};

RecipePtr free_product(RecipePtr left, RecipePtr right, unsigned c_f2 = 1);

// ---- wreath products with abelian lamps ----

struct LampFactor {
  enum class Kind { integer, prime, prime_power };
  Kind kind = Kind::integer;
  std::uint64_t p = 0;
  unsigned k = 1;
  std::string name = "a";

  static LampFactor integer(std::string name = "a") { return {Kind::integer, 0, 1, std::move(name)}; }
  static LampFactor cyclic(std::uint64_t p, unsigned k, std::string name = "a");
  std::uint64_t modulus() const;
};

struct WreathOptions {
  unsigned d = 2;            // error exponent of the lamp fingerprint
  double eps_prime = 0.05;   // Z_{p^k} lamps
};

// Read-only view of a wreath machine's lamp registers.
class WreathInspect {
 public:
  virtual ~WreathInspect() = default;
  virtual std::size_t factors() const = 0;
  virtual const StreamAutomaton& inner(std::size_t factor) const = 0;
  // Integer lamps: (p, z). Field lamps: (p^e, index of z). Ring lamps: (p^k, 0).
  virtual std::pair<BigInt, BigInt> lamp(std::size_t factor) const = 0;
  virtual std::vector<std::vector<std::uint64_t>> ring_registers(std::size_t factor) const = 0;
};

class WreathAbelianRecipe final : public Recipe {
 public:
  WreathAbelianRecipe(RecipePtr inner, std::vector<LampFactor> lamps, WreathOptions opts = {});
  const AlphabetPtr& alphabet() const override { return layout_.alphabet; }
  AutomatonPtr build(const BigInt& n, Rng rng) const override;
  unsigned space_bits(const BigInt& n) const override;
  double epsilon(const BigInt& n) const override;
  std::string describe() const override;
  const CombinedAlphabet& layout() const { return layout_; }
  const std::vector<LampFactor>& lamps() const { return lamps_; }
  const WreathOptions& options() const { return opts_; }
  const RecipePtr& inner() const { return inner_; }

  // Per-factor register width and error for bound n.
  unsigned lamp_bits(std::size_t factor, const BigInt& n) const;
  double lamp_epsilon(std::size_t factor, const BigInt& n) const;

 private:
  RecipePtr inner_;
  std::vector<LampFactor> lamps_;
  WreathOptions opts_;
  CombinedAlphabet layout_;
};

RecipePtr wreath_Z(RecipePtr inner, unsigned d = 2, std::string lamp_name = "a");
RecipePtr wreath_Zp(RecipePtr inner, std::uint64_t p, unsigned d = 2, std::string lamp_name = "a");
RecipePtr wreath_Zpk(RecipePtr inner, std::uint64_t p, unsigned k, double eps_prime = 0.05, std::string lamp_name = "a");
RecipePtr wreath_abelian(RecipePtr inner, std::vector<LampFactor> lamps, WreathOptions opts = {});

// Parameters of the Z_{p^k} lamp: polynomial degree d and count t.
struct RingLampParams {
  unsigned degree;
  unsigned count;
};
RingLampParams ring_lamp_params(const BigInt& inner_states, double eps_prime);
// Smallest e with p^e >= bound.
unsigned min_extension_degree(std::uint64_t p, const BigInt& bound);

// ---- wreath product with a finite top group ----

class WreathFiniteRecipe final : public Recipe {
 public:
  WreathFiniteRecipe(RecipePtr lamp, std::shared_ptr<const FiniteGroup> top);
  const AlphabetPtr& alphabet() const override { return layout_.alphabet; }
  AutomatonPtr build(const BigInt& n, Rng rng) const override;
  unsigned space_bits(const BigInt& n) const override;
  double epsilon(const BigInt& n) const override;
  std::string describe() const override;
  const CombinedAlphabet& layout() const { return layout_; }

 private:
  RecipePtr lamp_;
  std::shared_ptr<const FiniteGroup> top_;
  CombinedAlphabet layout_;
};

RecipePtr wreath_finite(RecipePtr lamp, std::shared_ptr<const FiniteGroup> top);

// Monic polynomial arithmetic over Z/mZ, little-endian coefficients.
namespace zm_poly {
using Poly = std::vector<std::uint64_t>;
// a * b mod s, s monic of degree deg(s) >= 1; inputs of degree < deg(s).
Poly mulmod(const Poly& a, const Poly& b, const Poly& s, std::uint64_t m);
Poly x_power(const BigInt& q, const Poly& s, std::uint64_t m);
// True when s divides f (s monic).
bool divides(const Poly& s, Poly f, std::uint64_t m);
}  // namespace zm_poly

}  // namespace wordstream
