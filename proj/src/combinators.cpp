#include "wordstream/combinators.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "wordstream/errors.hpp"
#include "wordstream/fingerprint.hpp"
#include "wordstream/matrix_group.hpp"
#include "wordstream/primes.hpp"

namespace wordstream {

namespace {

unsigned max_length(const std::vector<Word>& words) {
  std::size_t c = 1;
  for (const auto& w : words) c = std::max(c, w.size());
  return static_cast<unsigned>(c);
}

}  // namespace

// ---------------------------------------------------------------- change of generators

namespace {

class ChangeGeneratorsMachine final : public StreamAutomaton {
 public:
  ChangeGeneratorsMachine(AlphabetPtr alphabet, const BigInt& n, AutomatonPtr inner, const std::vector<Word>* images)
      : StreamAutomaton(std::move(alphabet), n, inner->bits(), inner->epsilon_bound()),
        inner_(std::move(inner)),
        images_(images) {
    record_initial();
  }

 protected:
  void do_step(Letter a) override { inner_->feed((*images_)[a.code()]); }
  BigInt pack() const override { return inner_->state_index(); }
  void do_reset() override { inner_->reset(); }

 private:
  AutomatonPtr inner_;
  const std::vector<Word>* images_;
};

}  // namespace

ChangeGeneratorsRecipe::ChangeGeneratorsRecipe(RecipePtr inner, AlphabetPtr alphabet, std::vector<Word> images)
    : inner_(std::move(inner)), alphabet_(std::move(alphabet)) {
  if (!inner_ || !alphabet_) throw ConstructionError("change_generators: missing recipe or alphabet");
  if (images.size() != alphabet_->size())
    throw ConstructionError("change_generators: expected " + std::to_string(alphabet_->size()) + " images, got " +
                            std::to_string(images.size()));
  images_.resize(alphabet_->letter_count());
  for (std::size_t g = 0; g < images.size(); ++g) {
    inner_->alphabet()->check(images[g]);
    images_[2 * g] = images[g];
    images_[2 * g + 1] = inverse(images[g]);
  }
  c_ = max_length(images_);
}

AutomatonPtr ChangeGeneratorsRecipe::build(const BigInt& n, Rng rng) const {
  if (n < 1) throw ConstructionError("length bound n must be at least 1");
  return std::make_unique<ChangeGeneratorsMachine>(alphabet_, n, inner_->build(n * c_, rng), &images_);
}

unsigned ChangeGeneratorsRecipe::space_bits(const BigInt& n) const { return inner_->space_bits(n * c_); }
double ChangeGeneratorsRecipe::epsilon(const BigInt& n) const { return inner_->epsilon(n * c_); }
std::string ChangeGeneratorsRecipe::describe() const {
  return "change-generators(c=" + std::to_string(c_) + "," + inner_->describe() + ")";
}

RecipePtr change_generators(RecipePtr inner, AlphabetPtr alphabet, std::vector<Word> images,
                            std::optional<std::vector<Word>> inverse_images) {
  if (inverse_images) {
    if (inverse_images->size() != images.size())
      throw ConstructionError("change_generators: inverse image count differs from image count");
    for (std::size_t g = 0; g < images.size(); ++g)
      if ((*inverse_images)[g] != inverse(images[g]))
        throw ConstructionError("change_generators: image of " + alphabet->name(static_cast<std::uint32_t>(g)) +
                                "- is not the inverse of the image of " + alphabet->name(static_cast<std::uint32_t>(g)));
  }
  return std::make_shared<ChangeGeneratorsRecipe>(std::move(inner), std::move(alphabet), std::move(images));
}

// ---------------------------------------------------------------- direct product

namespace {

class DirectProductMachine final : public StreamAutomaton {
 public:
  DirectProductMachine(const CombinedAlphabet& layout, const BigInt& n, AutomatonPtr left, AutomatonPtr right, double eps)
      : StreamAutomaton(layout.alphabet, n, left->bits() + right->bits(), eps),
        layout_(layout),
        left_(std::move(left)),
        right_(std::move(right)) {
    record_initial();
  }

 protected:
  void do_step(Letter a) override {
    std::size_t part = layout_.part_of(a.gen);
    (part == 0 ? left_ : right_)->step(layout_.to_part(a, part));
  }
  void do_step_power(Letter a, const BigInt& k) override {
    std::size_t part = layout_.part_of(a.gen);
    (part == 0 ? left_ : right_)->step_power(layout_.to_part(a, part), k);
  }
  BigInt pack() const override {
    StatePacker p;
    p.put(left_->state_index(), left_->bits());
    p.put(right_->state_index(), right_->bits());
    return p.value();
  }
  void do_reset() override {
    left_->reset();
    right_->reset();
  }

 private:
  const CombinedAlphabet& layout_;
  AutomatonPtr left_, right_;
};

}  // namespace

DirectProductRecipe::DirectProductRecipe(RecipePtr left, RecipePtr right)
    : left_(std::move(left)), right_(std::move(right)) {
  if (!left_ || !right_) throw ConstructionError("direct_product: missing factor");
  layout_ = combine_alphabets({left_->alphabet(), right_->alphabet()});
}

AutomatonPtr DirectProductRecipe::build(const BigInt& n, Rng rng) const {
  if (n < 1) throw ConstructionError("length bound n must be at least 1");
  return std::make_unique<DirectProductMachine>(layout_, n, left_->build(n, rng.split("left")),
                                                right_->build(n, rng.split("right")), epsilon(n));
}

unsigned DirectProductRecipe::space_bits(const BigInt& n) const { return left_->space_bits(n) + right_->space_bits(n); }
double DirectProductRecipe::epsilon(const BigInt& n) const {
  return std::min(1.0, left_->epsilon(n) + right_->epsilon(n));
}
std::string DirectProductRecipe::describe() const {
  return "direct-product(" + left_->describe() + "," + right_->describe() + ")";
}

RecipePtr direct_product(RecipePtr left, RecipePtr right) {
  return std::make_shared<DirectProductRecipe>(std::move(left), std::move(right));
}

// ---------------------------------------------------------------- finite extension

AlphabetPtr ExtensionData::alphabet() const {
  std::vector<std::string> names = base_alphabet->names();
  for (const auto& c : coset_names) {
    if (base_alphabet->find(c)) throw ConstructionError("extension: coset letter " + c + " collides with a base letter");
    names.push_back(c);
  }
  return std::make_shared<Alphabet>(std::move(names));
}

void ExtensionData::validate() const {
  if (!base_alphabet) throw ConstructionError("extension: missing base alphabet");
  const std::uint32_t k = cosets();
  if (conj.size() != base_alphabet->size()) throw ConstructionError("extension: conj table needs one row per base generator");
  for (const auto& row : conj) {
    if (row.size() != k) throw ConstructionError("extension: conj row needs one word per coset");
    for (const auto& w : row) base_alphabet->check(w);
  }
  if (alpha.size() != k || mult.size() != k) throw ConstructionError("extension: coset tables need k rows");
  for (std::uint32_t i = 0; i < k; ++i) {
    if (alpha[i].size() != k || mult[i].size() != k) throw ConstructionError("extension: coset tables need k columns");
    for (std::uint32_t j = 0; j < k; ++j) {
      if (alpha[i][j] >= k) throw ConstructionError("extension: alpha entry out of range");
      base_alphabet->check(mult[i][j]);
    }
    if (alpha[0][i] != i || alpha[i][0] != i) throw ConstructionError("extension: alpha(1,i) and alpha(i,1) must equal i");
    if (!mult[0][i].empty() || !mult[i][0].empty()) throw ConstructionError("extension: g(1,i) and g(i,1) must be empty");
  }
  for (std::uint32_t a = 0; a < base_alphabet->size(); ++a)
    if (!conj[a][0].empty() && conj[a][0] != Word{Letter{a, false}})
      throw ConstructionError("extension: g(a,1) must be the letter a");
}

void ExtensionData::verify(const ExactGroup& big) const {
  validate();
  const auto alpha_big = alphabet();
  if (!(big.alphabet() == *alpha_big)) throw ConstructionError("extension: oracle alphabet does not match Sigma plus coset letters");
  const std::uint32_t base = static_cast<std::uint32_t>(base_alphabet->size());
  auto h = [&](std::uint32_t i) { return i == 0 ? big.identity() : big.generator(base + i - 1); };
  for (std::uint32_t a = 0; a < base; ++a)
    for (std::uint32_t i = 0; i < cosets(); ++i) {
      auto lhs = big.mul(h(i), big.generator(a));
      auto rhs = big.mul(big.evaluate(conj[a][i]), h(i));
      if (!big.equal(lhs, rhs))
        throw ConstructionError("extension: h_" + std::to_string(i + 1) + " " + base_alphabet->name(a) +
                                " differs from g(a,i) h_i in the oracle");
    }
  for (std::uint32_t i = 0; i < cosets(); ++i)
    for (std::uint32_t j = 0; j < cosets(); ++j) {
      auto lhs = big.mul(h(i), h(j));
      auto rhs = big.mul(big.evaluate(mult[i][j]), h(alpha[i][j]));
      if (!big.equal(lhs, rhs))
        throw ConstructionError("extension: h_" + std::to_string(i + 1) + " h_" + std::to_string(j + 1) +
                                " differs from g(i,j) h_alpha(i,j) in the oracle");
    }
}

namespace {

class FiniteExtensionMachine final : public StreamAutomaton {
 public:
  FiniteExtensionMachine(const FiniteExtensionRecipe& recipe, const BigInt& n, AutomatonPtr inner, unsigned coset_bits,
                         double eps)
      : StreamAutomaton(recipe.alphabet(), n, coset_bits + inner->bits(), eps),
        recipe_(recipe),
        inner_(std::move(inner)),
        coset_bits_(coset_bits) {
    record_initial();
  }

 protected:
  void do_step(Letter a) override {
    const auto& mv = recipe_.move(coset_, a.code());
    inner_->feed(mv.feed);
    coset_ = mv.target;
  }
  BigInt pack() const override {
    StatePacker p;
    p.put(std::uint64_t{coset_}, coset_bits_);
    p.put(inner_->state_index(), inner_->bits());
    return p.value();
  }
  void do_reset() override {
    inner_->reset();
    coset_ = 0;
  }

 private:
  const FiniteExtensionRecipe& recipe_;
  AutomatonPtr inner_;
  unsigned coset_bits_;
  std::uint32_t coset_ = 0;
};

}  // namespace

FiniteExtensionRecipe::FiniteExtensionRecipe(RecipePtr inner, ExtensionData ext)
    : inner_(std::move(inner)), ext_(std::move(ext)) {
  if (!inner_) throw ConstructionError("finite_extension: missing inner recipe");
  ext_.validate();
  if (!(*inner_->alphabet() == *ext_.base_alphabet))
    throw ConstructionError("finite_extension: inner alphabet differs from the extension's base alphabet");
  alphabet_ = ext_.alphabet();
  const std::uint32_t k = ext_.cosets();
  const std::uint32_t base = static_cast<std::uint32_t>(ext_.base_alphabet->size());
  const std::size_t letters = alphabet_->letter_count();
  // phi_m(b) = g(b, m): rewriting g h_m as h_m-free prefix.
  auto conj_through = [&](const Word& w, std::uint32_t m) {
    Word out;
    for (Letter b : w) {
      const Word& img = ext_.conj[b.gen][m];
      Word piece = b.inverted ? inverse(img) : img;
      out.insert(out.end(), piece.begin(), piece.end());
    }
    return out;
  };
  moves_.resize(static_cast<std::size_t>(k) * letters);
  std::vector<Word> fed;
  for (std::uint32_t i = 0; i < k; ++i) {
    for (std::uint32_t code = 0; code < letters; ++code) {
      Letter a = Letter::from_code(code);
      Move mv;
      if (a.gen < base) {
        const Word& g = ext_.conj[a.gen][i];
        mv = {a.inverted ? inverse(g) : g, i};
      } else {
        std::uint32_t j = a.gen - base + 1;
        if (!a.inverted) {
          mv = {ext_.mult[i][j], ext_.alpha[i][j]};
        } else {
          // h_j^{-1} = h_{j'} g(j,j')^{-1} with alpha(j,j') = 1.
          std::uint32_t jp = k;
          for (std::uint32_t t = 0; t < k; ++t)
            if (ext_.alpha[j][t] == 0) {
              jp = t;
              break;
            }
          if (jp == k) throw ConstructionError("extension: coset " + std::to_string(j + 1) + " has no inverse in the alpha table");
          std::uint32_t m = ext_.alpha[i][jp];
          Word w = ext_.mult[i][jp];
          Word tail = conj_through(inverse(ext_.mult[j][jp]), m);
          w.insert(w.end(), tail.begin(), tail.end());
          mv = {std::move(w), m};
        }
      }
      fed.push_back(mv.feed);
      moves_[static_cast<std::size_t>(i) * letters + code] = std::move(mv);
    }
  }
  c_ = max_length(fed);
}

AutomatonPtr FiniteExtensionRecipe::build(const BigInt& n, Rng rng) const {
  if (n < 1) throw ConstructionError("length bound n must be at least 1");
  unsigned cb = ceil_log2(BigInt(ext_.cosets()));
  return std::make_unique<FiniteExtensionMachine>(*this, n, inner_->build(n * c_, rng), cb, epsilon(n));
}

unsigned FiniteExtensionRecipe::space_bits(const BigInt& n) const {
  return ceil_log2(BigInt(ext_.cosets())) + inner_->space_bits(n * c_);
}
double FiniteExtensionRecipe::epsilon(const BigInt& n) const { return inner_->epsilon(n * c_); }
std::string FiniteExtensionRecipe::describe() const {
  return "finite-extension(k=" + std::to_string(ext_.cosets()) + ",c=" + std::to_string(c_) + "," + inner_->describe() + ")";
}

RecipePtr finite_extension(RecipePtr inner, ExtensionData ext) {
  return std::make_shared<FiniteExtensionRecipe>(std::move(inner), std::move(ext));
}

ExtensionGroup::ExtensionGroup(GroupPtr base, ExtensionData ext)
    : ExactGroup(ext.alphabet()), base_(std::move(base)), ext_(std::move(ext)) {
  ext_.validate();
  if (!(base_->alphabet() == *ext_.base_alphabet)) throw ConstructionError("extension: base oracle alphabet mismatch");
}

std::string ExtensionGroup::kind() const { return "extension(" + base_->kind() + ",k=" + std::to_string(ext_.cosets()) + ")"; }

Word ExtensionGroup::conjugate(const Word& w, std::uint32_t coset) const {
  Word out;
  for (Letter b : w) {
    const Word& img = ext_.conj[b.gen][coset];
    Word piece = b.inverted ? inverse(img) : img;
    out.insert(out.end(), piece.begin(), piece.end());
  }
  return out;
}

Word ExtensionGroup::base_word(const Element& x) const {
  auto w = base_->word_of(x);
  if (!w) throw ConstructionError("extension oracle: base group " + base_->kind() + " cannot write elements as words");
  return *w;
}

Element ExtensionGroup::identity() const { return box(Value{base_->identity(), 0}); }

Element ExtensionGroup::generator(std::uint32_t gen) const {
  const auto base = static_cast<std::uint32_t>(ext_.base_alphabet->size());
  if (gen < base) return box(Value{base_->generator(gen), 0});
  return box(Value{base_->identity(), gen - base + 1});
}

Element ExtensionGroup::mul(const Element& a, const Element& b) const {
  const auto& x = unbox<Value>(a);
  const auto& y = unbox<Value>(b);
  // x h_i y h_j = x phi_i(y) g(i,j) h_alpha(i,j)
  Element z = base_->mul(x.x, base_->evaluate(conjugate(base_word(y.x), x.coset)));
  z = base_->mul(z, base_->evaluate(ext_.mult[x.coset][y.coset]));
  return box(Value{z, ext_.alpha[x.coset][y.coset]});
}

Element ExtensionGroup::inv(const Element& a) const {
  const auto& x = unbox<Value>(a);
  std::uint32_t jp = ext_.cosets();
  for (std::uint32_t t = 0; t < ext_.cosets(); ++t)
    if (ext_.alpha[x.coset][t] == 0) {
      jp = t;
      break;
    }
  if (jp == ext_.cosets()) throw ConstructionError("extension oracle: coset without inverse");
  // (x h_i)^-1 = h_j' g(i,j')^-1 x^-1 = phi_j'(g(i,j')^-1 x^-1) h_j'
  Word w = concat(inverse(ext_.mult[x.coset][jp]), base_word(base_->inv(x.x)));
  return box(Value{base_->evaluate(conjugate(w, jp)), jp});
}

CanonicalKey ExtensionGroup::key(const Element& a) const {
  const auto& x = unbox<Value>(a);
  CanonicalKey k;
  append_u32(k, x.coset);
  append_field(k, base_->key(x.x));
  return k;
}

std::string ExtensionGroup::format(const Element& a) const {
  const auto& x = unbox<Value>(a);
  std::string s = base_->format(x.x);
  if (x.coset > 0) s += " * " + ext_.coset_names[x.coset - 1];
  return s;
}

std::vector<Word> ExtensionGroup::relators() const {
  const auto base = static_cast<std::uint32_t>(ext_.base_alphabet->size());
  auto h = [&](std::uint32_t i) { return i == 0 ? Word{} : Word{Letter{base + i - 1, false}}; };
  std::vector<Word> out = base_->relators();
  for (std::uint32_t a = 0; a < base; ++a)
    for (std::uint32_t i = 1; i < ext_.cosets(); ++i)
      out.push_back(concat(concat(h(i), Word{Letter{a, false}}), inverse(concat(ext_.conj[a][i], h(i)))));
  for (std::uint32_t i = 1; i < ext_.cosets(); ++i)
    for (std::uint32_t j = 1; j < ext_.cosets(); ++j)
      out.push_back(concat(concat(h(i), h(j)), inverse(concat(ext_.mult[i][j], h(ext_.alpha[i][j])))));
  return out;
}

void ExtensionGroup::check_consistency() const {
  for (const auto& r : base_->relators())
    for (std::uint32_t i = 0; i < ext_.cosets(); ++i)
      if (!base_->is_identity(base_->evaluate(conjugate(r, i))))
        throw ConstructionError("extension: conjugation by h_" + std::to_string(i + 1) + " does not preserve a base relator");
  const auto base = static_cast<std::uint32_t>(ext_.base_alphabet->size());
  for (std::uint32_t a = 0; a < base; ++a)
    for (std::uint32_t i = 0; i < ext_.cosets(); ++i)
      if (!base_->is_identity(base_->evaluate(conjugate(Word{Letter{a, false}, Letter{a, true}}, i))))
        throw ConstructionError("extension: conjugation map is not invertible on letters");
  // h_i h_j a = g(i,j) h_alpha a, so phi_i(phi_j(a)) g(i,j) = g(i,j) phi_alpha(a).
  for (std::uint32_t a = 0; a < base; ++a)
    for (std::uint32_t i = 0; i < ext_.cosets(); ++i)
      for (std::uint32_t j = 0; j < ext_.cosets(); ++j) {
        const Word a_word{Letter{a, false}};
        Word lhs = concat(conjugate(conjugate(a_word, j), i), ext_.mult[i][j]);
        Word rhs = concat(ext_.mult[i][j], conjugate(a_word, ext_.alpha[i][j]));
        if (!base_->equal(base_->evaluate(lhs), base_->evaluate(rhs)))
          throw ConstructionError("extension: conjugation maps disagree with coset multiplication at h_" +
                                  std::to_string(i + 1) + " h_" + std::to_string(j + 1));
      }
  std::vector<Element> h;
  for (std::uint32_t i = 0; i < ext_.cosets(); ++i) h.push_back(box(Value{base_->identity(), i}));
  for (std::uint32_t i = 0; i < ext_.cosets(); ++i)
    for (std::uint32_t j = 0; j < ext_.cosets(); ++j)
      for (std::uint32_t l = 0; l < ext_.cosets(); ++l)
        if (!equal(mul(mul(h[i], h[j]), h[l]), mul(h[i], mul(h[j], h[l]))))
          throw ConstructionError("extension: coset multiplication is not associative");
}

// ---------------------------------------------------------------- free product

FreeProductRecipe::FreeProductRecipe(RecipePtr left, RecipePtr right, unsigned c_f2)
    : left_(std::move(left)), right_(std::move(right)) {
  if (!left_ || !right_) throw ConstructionError("free_product: missing factor");
  layout_ = combine_alphabets({left_->alphabet(), right_->alphabet()});
  f2_ = std::make_shared<LinearFingerprintRecipe>(sanov_free(2), c_f2);
}

BigInt FreeProductRecipe::f2_bound(const BigInt& n) const {
  BigInt pq = pow2(left_->space_bits(n) + right_->space_bits(n));
  return n * (2 * pq + 1);
}

AutomatonPtr FreeProductRecipe::build(const BigInt& n, Rng rng) const {
  if (n < 1) throw ConstructionError("length bound n must be at least 1");
  return std::make_unique<FreeProductMachine>(*this, n, rng);
}

unsigned FreeProductRecipe::space_bits(const BigInt& n) const {
  return left_->space_bits(n) + right_->space_bits(n) + f2_->space_bits(f2_bound(n));
}

double FreeProductRecipe::epsilon(const BigInt& n) const {
  double e = std::max({left_->epsilon(n), right_->epsilon(n), f2_->epsilon(f2_bound(n))});
  double nn = to_double(n);
  return std::min(1.0, (4.0 * nn * nn + 1.0) * e);
}

std::string FreeProductRecipe::describe() const {
  return "free-product(" + left_->describe() + "," + right_->describe() + ")";
}

FreeProductMachine::FreeProductMachine(const FreeProductRecipe& recipe, const BigInt& n, Rng rng)
    : StreamAutomaton(recipe.alphabet(), n, recipe.space_bits(n), recipe.epsilon(n)), layout_(recipe.layout()) {
  left_ = recipe.left()->build(n, rng.split("left"));
  right_ = recipe.right()->build(n, rng.split("right"));
  f2_ = recipe.f2()->build(recipe.f2_bound(n), rng.split("f2"));
  q_size_ = pow2(right_->bits());
  record_initial();
}

void FreeProductMachine::emit(bool inverse_b) {
  if (left_->at_initial() || right_->at_initial()) return;
  BigInt f = pairing(left_->state_index(), right_->state_index());
  f2_->step_power(Letter{0, true}, f);
  f2_->step(Letter{1, inverse_b});
  f2_->step_power(Letter{0, false}, f);
  ++emissions_;
}

void FreeProductMachine::do_step(Letter a) {
  const int part = static_cast<int>(layout_.part_of(a.gen));
  // A completed Gamma-block emits a b-block, a completed Sigma-block a b^{-1}-block.
  if (phase_ >= 0 && phase_ != part) emit(phase_ == 0);
  phase_ = part;
  (part == 0 ? left_ : right_)->step(layout_.to_part(a, static_cast<std::size_t>(part)));
}

BigInt FreeProductMachine::pack() const {
  StatePacker p;
  p.put(left_->state_index(), left_->bits());
  p.put(right_->state_index(), right_->bits());
  p.put(f2_->state_index(), f2_->bits());
  return p.value();
}

void FreeProductMachine::do_reset() {
  left_->reset();
  right_->reset();
  f2_->reset();
  phase_ = -1;
  emissions_ = 0;
}

RecipePtr free_product(RecipePtr left, RecipePtr right, unsigned c_f2) {
  return std::make_shared<FreeProductRecipe>(std::move(left), std::move(right), c_f2);
}

// ---------------------------------------------------------------- Z/mZ polynomials

namespace zm_poly {

Poly mulmod(const Poly& a, const Poly& b, const Poly& s, std::uint64_t m) {
  const std::size_t d = s.size() - 1;
  Poly prod(2 * d, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) prod[i + j] = (prod[i + j] + mulmod_u64(a[i], b[j], m)) % m;
  }
  // Reduce with x^d = -(s_0 + ... + s_{d-1} x^{d-1}).
  for (std::size_t k = prod.size(); k-- > d;) {
    std::uint64_t top = prod[k];
    if (top == 0) continue;
    prod[k] = 0;
    for (std::size_t j = 0; j < d; ++j) {
      std::uint64_t t = mulmod_u64(top, s[j], m);
      std::uint64_t& dst = prod[k - d + j];
      dst = dst >= t ? dst - t : dst + m - t;
    }
  }
  prod.resize(d);
  return prod;
}

Poly x_power(const BigInt& q, const Poly& s, std::uint64_t m) {
  const std::size_t d = s.size() - 1;
  Poly result(d, 0);
  result[0] = 1 % m;
  Poly x(d, 0);
  if (d == 1) {
    x[0] = (m - s[0] % m) % m;
  } else {
    x[1] = 1 % m;
  }
  for (unsigned bit = bit_length(q); bit-- > 0;) {
    result = mulmod(result, result, s, m);
    if (boost::multiprecision::bit_test(q, bit)) result = mulmod(result, x, s, m);
  }
  return result;
}

bool divides(const Poly& s, Poly f, std::uint64_t m) {
  const std::size_t d = s.size() - 1;
  for (std::size_t k = f.size(); k-- > d;) {
    std::uint64_t top = f[k] % m;
    if (top == 0) continue;
    f[k] = 0;
    for (std::size_t j = 0; j < d; ++j) {
      std::uint64_t t = mulmod_u64(top, s[j], m);
      std::uint64_t& dst = f[k - d + j];
      dst = dst % m >= t ? dst % m - t : dst % m + m - t;
    }
  }
  for (std::size_t j = 0; j < std::min(d, f.size()); ++j)
    if (f[j] % m != 0) return false;
  return true;
}

}  // namespace zm_poly

// ---------------------------------------------------------------- wreath products, abelian lamps

LampFactor LampFactor::cyclic(std::uint64_t p, unsigned k, std::string name) {
  if (!is_prime_u64(p)) throw ConstructionError("lamp factor Z_" + std::to_string(p) + ": modulus base must be prime");
  if (k == 0) throw ConstructionError("lamp factor exponent must be positive");
  return {k == 1 ? Kind::prime : Kind::prime_power, p, k, std::move(name)};
}

std::uint64_t LampFactor::modulus() const {
  if (kind == Kind::integer) return 0;
  BigInt m = pow_big(BigInt(p), k);
  if (m >= pow2(62)) throw ConstructionError("lamp modulus p^k must stay below 2^62");
  return static_cast<std::uint64_t>(m);
}

unsigned min_extension_degree(std::uint64_t p, const BigInt& bound) {
  unsigned e = 1;
  BigInt pe = p;
  while (pe < bound) {
    pe *= p;
    ++e;
  }
  return e;
}

RingLampParams ring_lamp_params(const BigInt& inner_states, double eps_prime) {
  if (!(eps_prime > 0.0 && eps_prime < 1.0)) throw ConstructionError("eps_prime must lie in (0, 1)");
  BigInt arg = 4 * (inner_states - 1);
  unsigned d = arg <= 1 ? 1u : std::max(1u, ceil_log2(arg));
  auto t = static_cast<unsigned>(std::ceil(4.0 * d * std::log(1.0 / eps_prime) - 1e-9));
  return {d, std::max(1u, t)};
}

namespace {

BigInt integer_lamp_prime_lo(const BigInt& q_size, const BigInt& n, unsigned d) {
  return std::max(BigInt(64), BigInt(q_size * pow_big(n, d + 1)));
}

struct LampState {
  LampFactor::Kind kind;
  AutomatonPtr inner;
  unsigned inner_bits = 0;
  // integer
  BigInt prime, radix, z;
  unsigned z_bits = 0;
  // prime field
  std::unique_ptr<ExtensionField> field;
  ExtensionField::Elem fz, fr;
  // prime power ring
  std::uint64_t modulus = 0;
  std::vector<zm_poly::Poly> s, acc;
  std::vector<std::unordered_map<std::uint64_t, zm_poly::Poly>> cache;
};

class WreathAbelianMachine final : public StreamAutomaton, public WreathInspect {
 public:
  WreathAbelianMachine(const WreathAbelianRecipe& recipe, const BigInt& n, Rng rng)
      : StreamAutomaton(recipe.alphabet(), n, recipe.space_bits(n), recipe.epsilon(n)), layout_(recipe.layout()) {
    const auto& lamps = recipe.lamps();
    for (std::size_t i = 0; i < lamps.size(); ++i) {
      Rng fr = rng.split(i);
      LampState st;
      st.kind = lamps[i].kind;
      st.inner = recipe.inner()->build(n, fr.split("inner"));
      st.inner_bits = st.inner->bits();
      BigInt q_size = pow2(st.inner_bits);
      Rng lr = fr.split("lamp");
      switch (st.kind) {
        case LampFactor::Kind::integer: {
          BigInt lo = integer_lamp_prime_lo(q_size, n, recipe.options().d);
          st.prime = sample_prime(lo, 2 * lo, lr);
          st.radix = n + 1;
          st.z = 0;
          st.z_bits = bit_length(BigInt(2 * lo - 1));
          break;
        }
        case LampFactor::Kind::prime: {
          unsigned e = min_extension_degree(lamps[i].p, q_size * pow_big(n, recipe.options().d));
          st.field = std::make_unique<ExtensionField>(lamps[i].p, e);
          st.fz = st.field->zero();
          st.fr = st.field->from_index(lr.below(st.field->order()));
          st.z_bits = bit_length(BigInt(st.field->order() - 1));
          break;
        }
        case LampFactor::Kind::prime_power: {
          st.modulus = lamps[i].modulus();
          auto rp = ring_lamp_params(q_size, recipe.options().eps_prime);
          st.z_bits = bit_length(st.modulus - 1);
          for (unsigned j = 0; j < rp.count; ++j) {
            zm_poly::Poly s(rp.degree + 1, 0);
            for (unsigned c = 0; c < rp.degree; ++c) s[c] = lr.below(st.modulus);
            s[rp.degree] = 1;
            st.s.push_back(std::move(s));
            st.acc.emplace_back(rp.degree, 0);
          }
          st.cache.resize(rp.count);
          break;
        }
      }
      factors_.push_back(std::move(st));
    }
    record_initial();
  }

  std::size_t factors() const override { return factors_.size(); }
  const StreamAutomaton& inner(std::size_t f) const override { return *factors_.at(f).inner; }
  std::pair<BigInt, BigInt> lamp(std::size_t f) const override {
    const auto& st = factors_.at(f);
    switch (st.kind) {
      case LampFactor::Kind::integer:
        return {st.prime, st.z};
      case LampFactor::Kind::prime:
        return {st.field->order(), st.field->index(st.fz)};
      default:
        return {BigInt(st.modulus), BigInt(0)};
    }
  }
  std::vector<std::vector<std::uint64_t>> ring_registers(std::size_t f) const override { return factors_.at(f).acc; }

 protected:
  void do_step(Letter a) override {
    std::size_t part = layout_.part_of(a.gen);
    if (part == 0) {
      lamp_step(factors_[a.gen], a.inverted);
      return;
    }
    Letter b = layout_.to_part(a, 1);
    for (auto& st : factors_) st.inner->step(b);
  }

  BigInt pack() const override {
    StatePacker p;
    for (const auto& st : factors_) {
      p.put(st.inner->state_index(), st.inner_bits);
      switch (st.kind) {
        case LampFactor::Kind::integer:
          p.put(st.z, st.z_bits);
          break;
        case LampFactor::Kind::prime:
          p.put(st.field->index(st.fz), st.z_bits);
          p.put(st.field->index(st.fr), st.z_bits);
          break;
        case LampFactor::Kind::prime_power:
          for (const auto& r : st.acc)
            for (auto c : r) p.put(c, st.z_bits);
          for (const auto& s : st.s)
            for (std::size_t c = 0; c + 1 < s.size(); ++c) p.put(s[c], st.z_bits);
          break;
      }
    }
    return p.value();
  }

  void do_reset() override {
    for (auto& st : factors_) {
      st.inner->reset();
      st.z = 0;
      if (st.field) st.fz = st.field->zero();
      for (auto& r : st.acc) std::fill(r.begin(), r.end(), 0);
    }
  }

 private:
  static void lamp_step(LampState& st, bool negative) {
    BigInt q = st.inner->state_index();
    switch (st.kind) {
      case LampFactor::Kind::integer: {
        BigInt term = boost::multiprecision::powm(st.radix, q, st.prime);
        st.z = mod_floor(negative ? BigInt(st.z - term) : BigInt(st.z + term), st.prime);
        break;
      }
      case LampFactor::Kind::prime: {
        auto term = st.field->pow(st.fr, q);
        st.fz = negative ? st.field->sub(st.fz, term) : st.field->add(st.fz, term);
        break;
      }
      case LampFactor::Kind::prime_power: {
        const std::uint64_t m = st.modulus;
        const bool small = fits_u64(q);
        for (std::size_t i = 0; i < st.s.size(); ++i) {
          const zm_poly::Poly* term;
          zm_poly::Poly fresh;
          if (small) {
            auto key = static_cast<std::uint64_t>(q);
            auto it = st.cache[i].find(key);
            if (it == st.cache[i].end()) it = st.cache[i].emplace(key, zm_poly::x_power(q, st.s[i], m)).first;
            term = &it->second;
          } else {
            fresh = zm_poly::x_power(q, st.s[i], m);
            term = &fresh;
          }
          auto& r = st.acc[i];
          for (std::size_t c = 0; c < r.size(); ++c) {
            std::uint64_t t = (*term)[c];
            r[c] = negative ? (r[c] >= t ? r[c] - t : r[c] + m - t) : (r[c] + t) % m;
          }
        }
        break;
      }
    }
  }

  const CombinedAlphabet& layout_;
  std::vector<LampState> factors_;
};

}  // namespace

WreathAbelianRecipe::WreathAbelianRecipe(RecipePtr inner, std::vector<LampFactor> lamps, WreathOptions opts)
    : inner_(std::move(inner)), lamps_(std::move(lamps)), opts_(opts) {
  if (!inner_) throw ConstructionError("wreath: missing inner recipe");
  if (lamps_.empty()) throw ConstructionError("wreath: lamp group needs at least one factor");
  if (opts_.d == 0) throw ConstructionError("wreath: exponent d must be positive");
  std::vector<std::string> names;
  for (const auto& l : lamps_) {
    if (l.kind == LampFactor::Kind::prime && l.p >= (1ULL << 31))
      throw ConstructionError("wreath: Z_p lamps need p < 2^31");
    if (l.kind == LampFactor::Kind::prime_power) {
      if (l.k < 2) throw ConstructionError("wreath: Z_{p^k} lamps need k >= 2");
      (void)l.modulus();
      ring_lamp_params(2, opts_.eps_prime);
    }
    names.push_back(l.name);
  }
  layout_ = combine_alphabets({std::make_shared<Alphabet>(std::move(names)), inner_->alphabet()});
}

AutomatonPtr WreathAbelianRecipe::build(const BigInt& n, Rng rng) const {
  if (n < 1) throw ConstructionError("length bound n must be at least 1");
  return std::make_unique<WreathAbelianMachine>(*this, n, rng);
}

unsigned WreathAbelianRecipe::lamp_bits(std::size_t f, const BigInt& n) const {
  const auto& l = lamps_.at(f);
  unsigned ib = inner_->space_bits(n);
  BigInt q_size = pow2(ib);
  switch (l.kind) {
    case LampFactor::Kind::integer:
      return bit_length(BigInt(2 * integer_lamp_prime_lo(q_size, n, opts_.d) - 1));
    case LampFactor::Kind::prime: {
      unsigned e = min_extension_degree(l.p, q_size * pow_big(n, opts_.d));
      return 2 * bit_length(BigInt(pow_big(BigInt(l.p), e) - 1));
    }
    case LampFactor::Kind::prime_power: {
      auto rp = ring_lamp_params(q_size, opts_.eps_prime);
      return 2 * rp.count * rp.degree * bit_length(l.modulus() - 1);
    }
  }
  return 0;
}

double WreathAbelianRecipe::lamp_epsilon(std::size_t f, const BigInt& n) const {
  const auto& l = lamps_.at(f);
  double eps = inner_->epsilon(n);
  double nn = to_double(n);
  if (l.kind == LampFactor::Kind::prime_power) return 2.0 * eps * nn * nn + opts_.eps_prime;
  return 2.0 * eps * nn * nn + std::max(eps, inverse_power(n, opts_.d));
}

unsigned WreathAbelianRecipe::space_bits(const BigInt& n) const {
  unsigned total = 0;
  unsigned ib = inner_->space_bits(n);
  for (std::size_t f = 0; f < lamps_.size(); ++f) total += ib + lamp_bits(f, n);
  return total;
}

double WreathAbelianRecipe::epsilon(const BigInt& n) const {
  double e = 0.0;
  for (std::size_t f = 0; f < lamps_.size(); ++f) e += lamp_epsilon(f, n);
  return std::min(1.0, e);
}

std::string WreathAbelianRecipe::describe() const {
  std::string s = "wreath(";
  for (std::size_t i = 0; i < lamps_.size(); ++i) {
    const auto& l = lamps_[i];
    if (i) s += "x";
    s += l.kind == LampFactor::Kind::integer ? "Z" : "Z" + std::to_string(l.modulus());
  }
  return s + "," + inner_->describe() + ")";
}

RecipePtr wreath_abelian(RecipePtr inner, std::vector<LampFactor> lamps, WreathOptions opts) {
  return std::make_shared<WreathAbelianRecipe>(std::move(inner), std::move(lamps), opts);
}

RecipePtr wreath_Z(RecipePtr inner, unsigned d, std::string lamp_name) {
  WreathOptions o;
  o.d = d;
  return wreath_abelian(std::move(inner), {LampFactor::integer(std::move(lamp_name))}, o);
}

RecipePtr wreath_Zp(RecipePtr inner, std::uint64_t p, unsigned d, std::string lamp_name) {
  WreathOptions o;
  o.d = d;
  return wreath_abelian(std::move(inner), {LampFactor::cyclic(p, 1, std::move(lamp_name))}, o);
}

RecipePtr wreath_Zpk(RecipePtr inner, std::uint64_t p, unsigned k, double eps_prime, std::string lamp_name) {
  if (k < 2) throw ConstructionError("wreath_Zpk: k must be at least 2");
  WreathOptions o;
  o.eps_prime = eps_prime;
  return wreath_abelian(std::move(inner), {LampFactor::cyclic(p, k, std::move(lamp_name))}, o);
}

// ---------------------------------------------------------------- wreath product, finite top group

namespace {

class WreathFiniteMachine final : public StreamAutomaton {
 public:
  WreathFiniteMachine(const WreathFiniteRecipe& recipe, const RecipePtr& lamp, const FiniteGroup& top, const BigInt& n,
                      Rng rng)
      : StreamAutomaton(recipe.alphabet(), n, recipe.space_bits(n), recipe.epsilon(n)),
        layout_(recipe.layout()),
        top_(top),
        cursor_bits_(ceil_log2(BigInt(top.size()))) {
    for (std::uint32_t g = 0; g < top.size(); ++g) copies_.push_back(lamp->build(n, rng.split(g)));
    record_initial();
  }

 protected:
  void do_step(Letter a) override {
    std::size_t part = layout_.part_of(a.gen);
    Letter b = layout_.to_part(a, part);
    if (part == 0) {
      copies_[cursor_]->step(b);
      return;
    }
    std::uint32_t g = top_.generator_index(b.gen);
    cursor_ = top_.mul_index(cursor_, b.inverted ? top_.inv_index(g) : g);
  }
  BigInt pack() const override {
    StatePacker p;
    p.put(std::uint64_t{cursor_}, cursor_bits_);
    for (const auto& c : copies_) p.put(c->state_index(), c->bits());
    return p.value();
  }
  void do_reset() override {
    for (auto& c : copies_) c->reset();
    cursor_ = 0;
  }

 private:
  const CombinedAlphabet& layout_;
  const FiniteGroup& top_;
  unsigned cursor_bits_;
  std::vector<AutomatonPtr> copies_;
  std::uint32_t cursor_ = 0;
};

}  // namespace

WreathFiniteRecipe::WreathFiniteRecipe(RecipePtr lamp, std::shared_ptr<const FiniteGroup> top)
    : lamp_(std::move(lamp)), top_(std::move(top)) {
  if (!lamp_ || !top_) throw ConstructionError("wreath_finite: missing lamp recipe or top group");
  layout_ = combine_alphabets({lamp_->alphabet(), top_->alphabet_ptr()});
}

AutomatonPtr WreathFiniteRecipe::build(const BigInt& n, Rng rng) const {
  if (n < 1) throw ConstructionError("length bound n must be at least 1");
  return std::make_unique<WreathFiniteMachine>(*this, lamp_, *top_, n, rng);
}

unsigned WreathFiniteRecipe::space_bits(const BigInt& n) const {
  return ceil_log2(BigInt(top_->size())) + top_->size() * lamp_->space_bits(n);
}

double WreathFiniteRecipe::epsilon(const BigInt& n) const { return std::min(1.0, top_->size() * lamp_->epsilon(n)); }

std::string WreathFiniteRecipe::describe() const {
  return "wreath-finite(" + lamp_->describe() + ",|G|=" + std::to_string(top_->size()) + ")";
}

RecipePtr wreath_finite(RecipePtr lamp, std::shared_ptr<const FiniteGroup> top) {
  return std::make_shared<WreathFiniteRecipe>(std::move(lamp), std::move(top));
}

}  // namespace wordstream
