#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "support.hpp"
#include "wordstream/automaton.hpp"
#include "wordstream/errors.hpp"
#include "wordstream/fingerprint.hpp"
#include "wordstream/primes.hpp"
#include "wordstream/rng.hpp"

using namespace wordstream;
using testing::RefMatrix;

namespace {

RecipePtr z_recipe(unsigned c = 1) { return std::make_shared<LinearFingerprintRecipe>(abelian_diagonal(1), c); }
RecipePtr sl2_recipe(unsigned c = 1) { return std::make_shared<LinearFingerprintRecipe>(sl2_standard(), c); }
RecipePtr f2_recipe(unsigned c = 1) { return std::make_shared<LinearFingerprintRecipe>(sanov_free(2), c); }

FingerprintInfo info_of(const StreamAutomaton& m) { return dynamic_cast<const FingerprintInspect&>(m).inspect(); }

}  // namespace

TEST_CASE("letters and words") {
  Alphabet ab({"a", "b"});
  Letter a = ab.letter("a");
  CHECK(a.inverse().inverse() == a);
  CHECK(ab.parse_letter("b-") == Letter{1, true});
  Word w = ab.parse_word("a b b- a-");
  CHECK(w.size() == 4);
  CHECK(free_reduce(w).empty());
  CHECK(ab.format(inverse(ab.parse_word("a b"))) == "b- a-");
  CHECK(power(ab.parse_word("a b"), 3).size() == 6);
  CHECK_THROWS_AS(ab.parse_letter("c"), AlphabetError);
  CHECK_THROWS_AS(ab.check(Letter{5, false}), AlphabetError);
}

TEST_CASE("combined alphabets prefix colliding names") {
  auto a = std::make_shared<const Alphabet>(std::vector<std::string>{"a"});
  auto b = std::make_shared<const Alphabet>(std::vector<std::string>{"a", "b"});
  auto comb = combine_alphabets({a, b});
  CHECK(comb.alphabet->size() == 3);
  CHECK(comb.part_of(0) == 0);
  CHECK(comb.part_of(2) == 1);
  CHECK(comb.to_part(Letter{2, true}, 1) == Letter{1, true});
  std::set<std::string> names(comb.alphabet->names().begin(), comb.alphabet->names().end());
  CHECK(names.size() == 3);
}

TEST_CASE("integer helpers agree with direct computation") {
  for (std::uint64_t x : {0ull, 1ull, 2ull, 3ull, 255ull, 256ull, 1ull << 40}) {
    unsigned expect = 0;
    for (std::uint64_t y = x; y; y >>= 1) ++expect;
    CHECK(bit_length(BigInt(x)) == expect);
    CHECK(bit_length(x) == expect);
  }
  CHECK(ceil_log2(BigInt(1)) == 0);
  CHECK(ceil_log2(BigInt(11)) == 4);
  CHECK(ceil_log2(BigInt(16)) == 4);
  CHECK(ceil_log2(BigInt(17)) == 5);
  for (long x : {1L, 7L, 100L, 4096L, 10000L}) {
    for (long y : {1L, 2L, 12L, 66L, 102L}) {
      long double ref = std::ceil(static_cast<long double>(x) * std::log(static_cast<long double>(y)));
      CHECK(ceil_mul_ln(BigInt(x), BigInt(y)) == BigInt(static_cast<long long>(ref)));
    }
  }
  CHECK(mod_floor(BigInt(-7), BigInt(5)) == 3);
  CHECK(pow2(70) == pow_big(BigInt(2), 70));
}

TEST_CASE("rng is reproducible and splits into distinct streams") {
  Rng a(42), b(42), c(43);
  std::vector<std::uint64_t> va, vb, vc;
  for (int i = 0; i < 16; ++i) {
    va.push_back(a());
    vb.push_back(b());
    vc.push_back(c());
  }
  CHECK(va == vb);
  CHECK(va != vc);
  Rng root(1);
  CHECK(root.split("x").key() == root.split("x").key());
  CHECK(root.split("x").key() != root.split("y").key());
  CHECK(root.split(0).key() != root.split(1).key());
}

TEST_CASE("rng bounded draws stay in range and are roughly uniform") {
  Rng r(9);
  std::map<std::uint64_t, int> counts;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) {
    std::uint64_t v = r.below(6);
    REQUIRE(v < 6);
    ++counts[v];
  }
  double chi2 = 0;
  for (auto& [k, c] : counts) chi2 += std::pow(c - draws / 6.0, 2) / (draws / 6.0);
  CHECK(chi2 < 25.0);  // 5 degrees of freedom, far tail
  for (int i = 0; i < 1000; ++i) {
    auto v = r.between(BigInt(10), BigInt(12));
    CHECK(v >= 10);
    CHECK(v <= 12);
  }
  BigInt big = pow2(100);
  for (int i = 0; i < 100; ++i) CHECK(r.below(big) < big);
}

TEST_CASE("64-bit primality matches a sieve") {
  const std::uint64_t limit = 20000;
  std::vector<bool> sieve(limit, true);
  sieve[0] = sieve[1] = false;
  for (std::uint64_t i = 2; i * i < limit; ++i)
    if (sieve[i])
      for (std::uint64_t j = i * i; j < limit; j += i) sieve[j] = false;
  for (std::uint64_t i = 0; i < limit; ++i) REQUIRE(is_prime_u64(i) == sieve[i]);
  for (std::uint64_t carmichael : {561ull, 1105ull, 41041ull, 825265ull, 3215031751ull}) CHECK_FALSE(is_prime_u64(carmichael));
  CHECK(is_prime_u64((1ull << 61) - 1));
  CHECK_FALSE(is_prime_u64(((1ull << 31) - 1) * ((1ull << 31) - 1)));
}

TEST_CASE("big primality") {
  Rng r(3);
  BigInt m127 = pow2(127) - 1;
  CHECK(is_probable_prime(m127, r));
  CHECK_FALSE(is_probable_prime(m127 * 3, r));
  BigInt p61 = pow2(61) - 1;
  CHECK_FALSE(is_probable_prime(p61 * p61, r));
}

TEST_CASE("sample_prime") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng r(s);
    BigInt p = sample_prime(2, 3, r);
    CHECK((p == 2 || p == 3));
    BigInt q = sample_prime(1000000, 2000000, r);
    CHECK(q >= 1000000);
    CHECK(q <= 2000000);
    CHECK(testing::trial_division_prime(to_u64(q)));
  }
  Rng r(1);
  CHECK_THROWS_AS(sample_prime(24, 28, r), ConstructionError);
}

TEST_CASE("sample_prime spreads over the primes of the range") {
  std::set<BigInt> seen;
  for (std::uint64_t s = 0; s < 400; ++s) {
    Rng r(s);
    seen.insert(sample_prime(100, 200, r));
  }
  // 21 primes lie in [100, 200].
  CHECK(seen.size() == 21);
}

TEST_CASE("length budget and state packer") {
  LengthBudget b(BigInt(5));
  b.consume(3);
  b.consume(BigInt(2));
  CHECK(b.used() == 5);
  CHECK_THROWS_AS(b.consume(1), OverflowError);
  b.reset();
  CHECK(b.used() == 0);
  LengthBudget huge(pow2(80));
  huge.consume(pow2(79));
  huge.consume(pow2(79));
  CHECK_THROWS_AS(huge.consume(1), OverflowError);

  StatePacker sp;
  sp.put(std::uint64_t{1}, 1);
  sp.put(std::uint64_t{5}, 3);
  sp.put(BigInt(2), 4);
  CHECK(sp.width() == 8);
  CHECK(sp.value() == BigInt(1 + (5 << 1) + (2 << 4)));
}

TEST_CASE("init: Z fingerprint at n = 10") {
  auto m = init(*z_recipe(), 10, 7);
  // N = max(64, ceil(100 ln 12)) = 249; residues below 2N need 9 bits, plus the degenerate flag.
  CHECK(m->bits() == 10);
  CHECK(m->at_initial());
  CHECK(m->state_index() < pow2(m->bits()));
}

TEST_CASE("init with a singular generator matrix fails") {
  RationalMatrix singular = rational_matrix({{1, 1}, {1, 1}});
  CHECK_THROWS_AS(MatrixGenerators::from_rational({"a"}, {singular}), ConstructionError);
}

TEST_CASE("identical arguments give identical machines") {
  auto recipe = f2_recipe();
  Rng words(5);
  for (int trial = 0; trial < 50; ++trial) {
    auto m1 = init(*recipe, 40, 11);
    auto m2 = init(*recipe, 40, 11);
    std::size_t len = words.below(41);
    for (std::size_t i = 0; i < len; ++i) {
      Letter a = Letter::from_code(static_cast<std::uint32_t>(words.below(4)));
      m1->step(a);
      m2->step(a);
      REQUIRE(m1->state_index() == m2->state_index());
    }
  }
}

TEST_CASE("step: exact cancellation and overflow") {
  auto m = init(*z_recipe(), 3, 1);
  Letter a{0, false};
  CHECK_THROWS_AS(m->step(Letter{3, false}), AlphabetError);
  m->step(a);
  CHECK_FALSE(m->at_initial());
  m->step(a.inverse());
  CHECK(m->at_initial());
  m->step(a);
  CHECK_THROWS_AS(m->step(a), OverflowError);
}

TEST_CASE("step on S in SL2 fingerprint matches the reference product mod p") {
  auto m = init(*sl2_recipe(), 20, 4);
  m->step(Letter{0, false});
  auto info = info_of(*m);
  RefMatrix expect = RefMatrix::of({{0, -1}, {1, 0}}).mod(info.modulus);
  CHECK(info.matrix == expect.a);
  RefMatrix prod = RefMatrix::identity(2);
  RefMatrix S = RefMatrix::of({{0, -1}, {1, 0}}), T = RefMatrix::of({{1, 1}, {0, 1}});
  m->reset();
  Rng r(8);
  for (int i = 0; i < 20; ++i) {
    bool s = r.coin();
    m->step(Letter{s ? 0u : 1u, false});
    prod = prod.times(s ? S : T);
  }
  CHECK(info_of(*m).matrix == prod.mod(info.modulus).a);
}

TEST_CASE("step_power equals repeated steps for k <= 64") {
  auto recipe = sl2_recipe();
  for (std::uint32_t code = 0; code < 4; ++code) {
    for (unsigned k = 0; k <= 64; ++k) {
      auto a = init(*recipe, 200, 3);
      auto b = init(*recipe, 200, 3);
      a->step(Letter{1, false});
      b->step(Letter{1, false});
      a->step_power(Letter::from_code(code), k);
      for (unsigned i = 0; i < k; ++i) b->step(Letter::from_code(code));
      REQUIRE(a->state_index() == b->state_index());
      REQUIRE(a->letters_read() == b->letters_read());
    }
  }
}

TEST_CASE("step_power by 2^40 in the F2 fingerprint") {
  auto recipe = f2_recipe();
  BigInt n = pow2(41);
  auto once = init(*recipe, n, 12);
  auto halves = init(*recipe, n, 12);
  once->step_power(Letter{0, false}, pow2(40));
  halves->step_power(Letter{0, false}, pow2(39));
  halves->step_power(Letter{0, false}, pow2(39));
  CHECK(once->state_index() == halves->state_index());
  // a^k = [[1, 2k], [0, 1]].
  auto info = info_of(*once);
  RefMatrix expect = RefMatrix::identity(2);
  expect.at(0, 1) = 2 * pow2(40);
  CHECK(info.matrix == expect.mod(info.modulus).a);
  CHECK(once->letters_read() == pow2(40));
  CHECK_THROWS_AS(once->step_power(Letter{0, false}, pow2(41)), OverflowError);
}

TEST_CASE("state index encodes state injectively") {
  auto m = init(*z_recipe(), 50, 2);
  std::set<BigInt> seen;
  for (int i = 0; i < 25; ++i) {
    BigInt idx = m->state_index();
    CHECK(idx < pow2(m->bits()));
    CHECK(seen.insert(idx).second);
    m->step(Letter{0, false});
  }
  m->reset();
  CHECK(m->at_initial());
  CHECK(m->letters_read() == 0);
}

TEST_CASE("decide_identity") {
  auto f2 = f2_recipe();
  Alphabet ab({"a", "b"});
  CHECK(decide_identity(*f2, 10, 1, {}).accept);
  auto r = decide_identity(*f2, 10, 1, ab.parse_word("a a- b b-"));
  CHECK(r.accept);
  CHECK(r.letters_read == 4);
  CHECK(r.bits_used == space_bits(*f2, 10));
  CHECK_FALSE(decide_identity(*f2, 10, 1, ab.parse_word("a b a- b-")).accept);
  Alphabet st({"S", "T"});
  CHECK(decide_identity(*sl2_recipe(), 10, 1, st.parse_word("S S S S")).accept);
  CHECK_THROWS_AS(decide_identity(*f2, 3, 1, ab.parse_word("a a a a")), OverflowError);
}

TEST_CASE("space_bits counts the packed fields") {
  // N = ceil(10^4 ln 102) = 46250, residues below 2N need 17 bits, plus one flag bit.
  CHECK(space_bits(*z_recipe(), 100) == 18);
  auto m = init(*z_recipe(), 100, 0);
  CHECK(m->bits() == 18);
}
