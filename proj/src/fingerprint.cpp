#include "wordstream/fingerprint.hpp"

#include <cmath>

#include "wordstream/extension_field.hpp"
#include "wordstream/mod_matrix.hpp"
#include "wordstream/primes.hpp"

namespace wordstream {

namespace {

template <class Field>
class MatrixMachine final : public StreamAutomaton, public FingerprintInspect {
 public:
  using Mat = ModMatrix<Field>;

  struct Setup {
    AlphabetPtr alphabet;
    BigInt n;
    unsigned bits;
    double epsilon;
    bool strict_upper;
    unsigned entry_bits;
    unsigned point_bits;
    Field field;
    std::vector<Mat> letters;  // indexed by Letter::code()
    Mat initial;
    bool degenerate;
    std::vector<BigInt> point;
    BigInt modulus;
    unsigned extension_degree;
  };

  explicit MatrixMachine(Setup s)
      : StreamAutomaton(s.alphabet, s.n, s.bits, s.epsilon),
        s_(std::move(s)),
        b_(s_.initial),
        tmp_(s_.initial),
        cache_(s_.letters.size()) {
    record_initial();
    if (StatePacker probe = layout(); probe.width() != bits()) throw Error("fingerprint: layout width mismatch");
  }

  FingerprintInfo inspect() const override {
    FingerprintInfo info;
    info.modulus = s_.modulus;
    info.extension_degree = s_.extension_degree;
    info.point = s_.point;
    info.degenerate = s_.degenerate;
    for (const auto& e : b_.data()) info.matrix.push_back(s_.field.index(e));
    return info;
  }

 protected:
  void do_step(Letter a) override {
    if (s_.degenerate) return;
    multiply_into(s_.field, b_, s_.letters[a.code()], tmp_);
    std::swap(b_, tmp_);
  }

  void do_step_power(Letter a, const BigInt& k) override {
    if (s_.degenerate) return;
    auto& pows = cache_[a.code()];
    if (pows.empty()) pows.push_back(s_.letters[a.code()]);
    const unsigned bits = bit_length(k);
    while (pows.size() < bits) pows.push_back(multiply(s_.field, pows.back(), pows.back()));
    for (unsigned i = 0; i < bits; ++i) {
      if (!boost::multiprecision::bit_test(k, i)) continue;
      multiply_into(s_.field, b_, pows[i], tmp_);
      std::swap(b_, tmp_);
    }
  }

  BigInt pack() const override { return layout().value(); }

  void do_reset() override { b_ = s_.initial; }

 private:
  StatePacker layout() const {
    StatePacker sp;
    const unsigned r = b_.dim();
    if (!s_.strict_upper) sp.put(std::uint64_t{s_.degenerate ? 1u : 0u}, 1);
    for (unsigned i = 0; i < r; ++i)
      for (unsigned j = s_.strict_upper ? i + 1 : 0; j < r; ++j) sp.put(s_.field.index(b_(i, j)), s_.entry_bits);
    if (!s_.strict_upper)
      for (const auto& v : s_.point) sp.put(v, s_.point_bits);
    return sp;
  }

  Setup s_;
  Mat b_;
  Mat tmp_;
  std::vector<std::vector<Mat>> cache_;
};

unsigned checked_c(unsigned c) {
  if (c < 1) throw ConstructionError("error exponent c must be at least 1");
  return c;
}

template <class Field>
ModMatrix<Field> evaluate_matrix(const Field& f, const PolyMatrix& m, const std::vector<BigInt>& point) {
  ModMatrix<Field> out(f, static_cast<unsigned>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out(static_cast<unsigned>(i), static_cast<unsigned>(j)) = f.from(m(i, j).evaluate(point));
  return out;
}

template <class Field>
AutomatonPtr build_char0(const MatrixGenerators& g, unsigned c, const LinearParams& lp, const BigInt& n, Rng rng,
                         const BigInt& p, double eps) {
  Field f(static_cast<typename std::conditional<std::is_same_v<Field, PrimeField64>, std::uint64_t, BigInt>::type>(p));
  (void)c;
  Rng srng = rng.split("point");
  std::vector<BigInt> point;
  for (unsigned i = 0; i < g.vars; ++i) point.push_back(srng.between(BigInt(1), lp.point_range));
  auto t = f.from(g.denominator.evaluate(point));
  bool degenerate = f.is_zero(t);
  std::vector<ModMatrix<Field>> letters;
  for (std::size_t a = 0; a < g.forward.size(); ++a) {
    for (const PolyMatrix* m : {&g.forward[a], &g.backward[a]}) {
      auto mm = evaluate_matrix(f, *m, point);
      letters.push_back(degenerate ? mm : scaled(f, mm, f.inv(t)));
    }
  }
  auto initial = scaled(f, ModMatrix<Field>::identity(f, g.dim), f.pow(t, BigInt(n + 1)));
  typename MatrixMachine<Field>::Setup s{g.alphabet, n,     lp.bits, eps,    false, lp.entry_bits, lp.point_bits, f,
                                         letters,    initial, degenerate, point, p,    1};
  return std::make_unique<MatrixMachine<Field>>(std::move(s));
}

ExtensionField::Elem evaluate_in(const ExtensionField& f, const Poly& poly, const std::vector<ExtensionField::Elem>& point) {
  auto total = f.zero();
  for (const auto& [m, c] : poly.terms()) {
    auto term = f.from(boost::multiprecision::numerator(c));
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i]) term = f.mul(term, f.pow(point[i], BigInt(m[i])));
    total = f.add(total, term);
  }
  return total;
}

}  // namespace

double inverse_power(const BigInt& n, unsigned c) { return std::exp2(-static_cast<double>(c) * log2_big(n)); }

LinearParams linear_params(const MatrixGenerators& gens, unsigned c, const BigInt& n) {
  LinearParams lp;
  BigInt nc1 = pow_big(n, c + 1);
  lp.prime_lo = std::max(BigInt(64), ceil_mul_ln(nc1, BigInt(n + 2)));
  lp.point_range = std::max(BigInt(1), BigInt(2 * gens.degree() * pow_big(BigInt(n + 1), c + 1)));
  lp.entry_bits = bit_length(BigInt(2 * lp.prime_lo - 1));
  lp.point_bits = bit_length(lp.point_range);
  lp.bits = 1 + gens.dim * gens.dim * lp.entry_bits + gens.vars * lp.point_bits;
  return lp;
}

NilpotentParams nilpotent_params(unsigned dim, unsigned c, const BigInt& n) {
  if (n < 4) throw ConstructionError("nilpotent fingerprint requires n >= 4");
  NilpotentParams np;
  double l = log2_big(n);
  double v = std::pow(l, c + 1) * std::log2(l);
  np.prime_lo = std::max(BigInt(64), BigInt(static_cast<std::uint64_t>(std::ceil(v - 1e-9))));
  np.entry_bits = bit_length(BigInt(2 * np.prime_lo - 1));
  np.bits = np.entry_bits * dim * (dim - 1) / 2;
  return np;
}

PrimeCharParams prime_char_params(const MatrixGenerators& gens, unsigned c, const BigInt& n) {
  if (!gens.characteristic) throw ConstructionError("prime_char_params: generators have characteristic 0");
  PrimeCharParams pp;
  const std::uint64_t p = *gens.characteristic;
  pp.point_range = std::max(BigInt(1), BigInt(2 * gens.degree() * pow_big(BigInt(n + 1), c + 1)));
  BigInt q = p;
  pp.extension_degree = 1;
  while (q < pp.point_range) {
    q *= p;
    ++pp.extension_degree;
  }
  pp.entry_bits = bit_length(BigInt(q - 1));
  pp.point_bits = bit_length(pp.point_range);
  pp.bits = 1 + gens.dim * gens.dim * pp.entry_bits + gens.vars * pp.point_bits;
  return pp;
}

// ---- LinearFingerprintRecipe ----

LinearFingerprintRecipe::LinearFingerprintRecipe(MatrixGenerators gens, unsigned c) : gens_(std::move(gens)), c_(checked_c(c)) {
  gens_.validate();
}

unsigned LinearFingerprintRecipe::space_bits(const BigInt& n) const {
  return gens_.characteristic ? prime_char_params(gens_, c_, n).bits : linear_params(gens_, c_, n).bits;
}

double LinearFingerprintRecipe::epsilon(const BigInt& n) const {
  if (gens_.characteristic && gens_.vars == 0) return 0.0;
  return inverse_power(n, c_);
}

std::string LinearFingerprintRecipe::describe() const {
  std::string s = gens_.characteristic ? "linear-fingerprint[char " + std::to_string(*gens_.characteristic) + "]" : "linear-fingerprint";
  return s + "(dim=" + std::to_string(gens_.dim) + ",vars=" + std::to_string(gens_.vars) + ",c=" + std::to_string(c_) + ")";
}

AutomatonPtr LinearFingerprintRecipe::build(const BigInt& n, Rng rng) const {
  if (n < 1) throw ConstructionError("length bound n must be at least 1");
  if (gens_.characteristic) {
    const auto pp = prime_char_params(gens_, c_, n);
    ExtensionField f(*gens_.characteristic, pp.extension_degree);
    Rng srng = rng.split("point");
    std::vector<ExtensionField::Elem> point;
    std::vector<BigInt> point_index;
    for (unsigned i = 0; i < gens_.vars; ++i) {
      point_index.push_back(srng.below(pp.point_range));
      point.push_back(f.from_index(point_index.back()));
    }
    auto t = evaluate_in(f, gens_.denominator, point);
    bool degenerate = f.is_zero(t);
    std::vector<ModMatrix<ExtensionField>> letters;
    for (std::size_t a = 0; a < gens_.forward.size(); ++a)
      for (const PolyMatrix* m : {&gens_.forward[a], &gens_.backward[a]}) {
        ModMatrix<ExtensionField> mm(f, gens_.dim);
        for (unsigned i = 0; i < gens_.dim; ++i)
          for (unsigned j = 0; j < gens_.dim; ++j) mm(i, j) = evaluate_in(f, (*m)(i, j), point);
        letters.push_back(degenerate ? mm : scaled(f, mm, f.inv(t)));
      }
    auto initial = scaled(f, ModMatrix<ExtensionField>::identity(f, gens_.dim), f.pow(t, BigInt(n + 1)));
    MatrixMachine<ExtensionField>::Setup s{gens_.alphabet, n,       pp.bits,    epsilon(n), false,
                                           pp.entry_bits,  pp.point_bits, f,    letters,    initial,
                                           degenerate,     point_index,   BigInt(*gens_.characteristic), pp.extension_degree};
    return std::make_unique<MatrixMachine<ExtensionField>>(std::move(s));
  }
  const auto lp = linear_params(gens_, c_, n);
  Rng prng = rng.split("prime");
  BigInt p = sample_prime(lp.prime_lo, BigInt(2 * lp.prime_lo), prng);
  if (BigInt(2 * lp.prime_lo) < (BigInt(1) << 63))
    return build_char0<PrimeField64>(gens_, c_, lp, n, rng, p, epsilon(n));
  return build_char0<PrimeFieldBig>(gens_, c_, lp, n, rng, p, epsilon(n));
}

// ---- NilpotentFingerprintRecipe ----

NilpotentFingerprintRecipe::NilpotentFingerprintRecipe(AlphabetPtr alphabet, std::vector<IntMatrix> gens, unsigned c)
    : alphabet_(std::move(alphabet)), forward_(std::move(gens)), c_(checked_c(c)) {
  if (forward_.empty() || forward_.size() != alphabet_->size())
    throw ConstructionError("nilpotent fingerprint: one matrix per generator required");
  dim_ = static_cast<unsigned>(forward_[0].rows());
  if (dim_ < 2) throw ConstructionError("nilpotent fingerprint: dimension must be at least 2");
  for (std::size_t a = 0; a < forward_.size(); ++a) {
    const auto& m = forward_[a];
    if (m.rows() != dim_ || m.cols() != dim_) throw ConstructionError("nilpotent fingerprint: inconsistent shapes");
    for (unsigned i = 0; i < dim_; ++i)
      for (unsigned j = 0; j <= i; ++j)
        if (m(i, j) != (i == j ? 1 : 0))
          throw ConstructionError("nilpotent fingerprint: generator '" + alphabet_->name(static_cast<std::uint32_t>(a)) +
                                  "' is not upper unitriangular");
    backward_.push_back(unitriangular_inverse(m));
  }
}

unsigned NilpotentFingerprintRecipe::space_bits(const BigInt& n) const { return nilpotent_params(dim_, c_, n).bits; }

double NilpotentFingerprintRecipe::epsilon(const BigInt& n) const {
  return std::pow(log2_big(n), -static_cast<double>(c_));
}

std::string NilpotentFingerprintRecipe::describe() const {
  return "nilpotent-fingerprint(dim=" + std::to_string(dim_) + ",c=" + std::to_string(c_) + ")";
}

AutomatonPtr NilpotentFingerprintRecipe::build(const BigInt& n, Rng rng) const {
  const auto np = nilpotent_params(dim_, c_, n);
  Rng prng = rng.split("prime");
  BigInt p = sample_prime(np.prime_lo, BigInt(2 * np.prime_lo), prng);
  if (bit_length(p) > 62) throw ConstructionError("nilpotent fingerprint: bound too large");
  PrimeField64 f(static_cast<std::uint64_t>(p));
  std::vector<ModMatrix<PrimeField64>> letters;
  for (std::size_t a = 0; a < forward_.size(); ++a)
    for (const IntMatrix* m : {&forward_[a], &backward_[a]}) {
      ModMatrix<PrimeField64> mm(f, dim_);
      for (unsigned i = 0; i < dim_; ++i)
        for (unsigned j = 0; j < dim_; ++j) mm(i, j) = f.from((*m)(i, j));
      letters.push_back(mm);
    }
  MatrixMachine<PrimeField64>::Setup s{alphabet_, n,     np.bits, epsilon(n), true, np.entry_bits, 0, f, letters,
                                       ModMatrix<PrimeField64>::identity(f, dim_), false, {}, p, 1};
  return std::make_unique<MatrixMachine<PrimeField64>>(std::move(s));
}

AutomatonPtr build_linear_fingerprint(const MatrixGenerators& gens, unsigned c, const BigInt& n, std::uint64_t seed) {
  if (gens.characteristic) throw ConstructionError("build_linear_fingerprint: use prime_char_fingerprint for characteristic p");
  return LinearFingerprintRecipe(gens, c).build(n, Rng(seed));
}

AutomatonPtr build_nilpotent_fingerprint(AlphabetPtr alphabet, std::vector<IntMatrix> gens, unsigned c, const BigInt& n,
                                         std::uint64_t seed) {
  return NilpotentFingerprintRecipe(std::move(alphabet), std::move(gens), c).build(n, Rng(seed));
}

AutomatonPtr prime_char_fingerprint(const MatrixGenerators& gens, unsigned c, const BigInt& n, std::uint64_t seed) {
  if (!gens.characteristic) throw ConstructionError("prime_char_fingerprint: generators have characteristic 0");
  return LinearFingerprintRecipe(gens, c).build(n, Rng(seed));
}

}  // namespace wordstream
