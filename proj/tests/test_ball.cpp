#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "wordstream/ball.hpp"
#include "wordstream/errors.hpp"
#include "wordstream/grigorchuk.hpp"
#include "wordstream/matrix_group.hpp"

using namespace wordstream;

namespace {

std::vector<GroupPtr> test_groups() {
  return {std::make_shared<FreeAbelianGroup>(1u), std::make_shared<FreeAbelianGroup>(2u), std::make_shared<FreeGroup>(2u),
          UnitriangularGroup::heisenberg(), std::make_shared<MatrixGroup>(dihedral_matrices())};
}

std::uint64_t pow3(unsigned r) {
  std::uint64_t v = 1;
  while (r--) v *= 3;
  return v;
}

}  // namespace

TEST_CASE("growth of small groups matches closed forms") {
  auto z = compute_growth(FreeAbelianGroup(1u), 10);
  auto z2 = compute_growth(FreeAbelianGroup(2u), 8);
  auto f2 = compute_growth(FreeGroup(2u), 7);
  auto dinf = compute_growth(MatrixGroup(dihedral_matrices()), 8);
  for (unsigned r = 0; r <= 10; ++r) CHECK(z.at(r) == 2 * r + 1);
  for (unsigned r = 0; r <= 8; ++r) CHECK(z2.at(r) == 2 * r * r + 2 * r + 1);
  for (unsigned r = 0; r <= 7; ++r) CHECK(f2.at(r) == 2 * pow3(r) - 1);
  // Elements r^k and r^k s, with word lengths |k| and |k| + 1 or so: 4r for r >= 1.
  CHECK(dinf.at(0) == 1);
  for (unsigned r = 1; r <= 8; ++r) CHECK(dinf.at(r) == 4 * r);
  CHECK(z.at(5) == 11);
  CHECK(z2.at(2) == 13);
  CHECK(compute_growth(GrigorchukGroup(), 1).at(1) == 5);
}

TEST_CASE("ball and growth computations agree") {
  for (const auto& g : test_groups()) {
    CAPTURE(g->kind());
    auto ball = compute_ball(*g, 4);
    auto growth = compute_growth(*g, 4);
    CHECK(ball.growth.gamma == growth.gamma);
    CHECK(ball.elements.size() == growth.at(4));
    CHECK(g->is_identity(ball.elements[0]));
    for (unsigned r = 0; r < 4; ++r) CHECK(growth.at(r) < growth.at(r + 1));
    for (unsigned r = 0; r <= 2; ++r)
      for (unsigned s = 0; s <= 2; ++s) CHECK(growth.at(r + s) <= growth.at(r) * growth.at(s));
  }
}

TEST_CASE("Z ball automaton at n = 4") {
  FreeAbelianGroup z(1u);
  auto dfa = build_ball_automaton(z, 4);
  CHECK(dfa.state_count() == 5);
  const auto& al = z.alphabet();
  CHECK(dfa_decide(dfa, al.parse_word("a a a- a-")));
  CHECK_FALSE(dfa_decide(dfa, al.parse_word("a a a a-")));
  CHECK(dfa_decide(dfa, Word{}));
  CHECK(dfa.spurious_target().has_value());
  CHECK_FALSE(dfa.sink().has_value());
  CHECK_THROWS_AS(dfa_decide(dfa, al.parse_word("a a a- a- a")), OverflowError);
}

TEST_CASE("ball automaton at n = 10 for Z has 11 states and 4 bits") {
  auto dfa = build_ball_automaton(FreeAbelianGroup(1u), 10);
  CHECK(dfa.state_count() == 11);
  CHECK(dfa.bits() == 4);
}

TEST_CASE("odd n adds a failure sink") {
  auto dfa = build_ball_automaton(FreeGroup(2u), 5);
  CHECK(dfa.state_count() == 2 * pow3(2) - 1 + 1);
  REQUIRE(dfa.sink().has_value());
  for (Letter a : dfa.alphabet().letters()) CHECK(dfa.next(*dfa.sink(), a) == *dfa.sink());
}

TEST_CASE("ball automata decide exactly for short words") {
  for (const auto& g : test_groups()) {
    for (unsigned n : {5u, 6u}) {
      CAPTURE(g->kind());
      CAPTURE(n);
      auto dfa = build_ball_automaton(*g, n);
      auto growth = compute_growth(*g, n / 2);
      CHECK(dfa.state_count() == ball_state_formula(growth, n));
      CHECK(dfa.state_count() == growth.at(n / 2) + (n % 2));
      std::size_t mismatches = 0;
      testing::for_each_word(g->alphabet().size(), n, [&](const Word& w) {
        mismatches += dfa_decide(dfa, w) != g->is_identity(g->evaluate(w));
      });
      CHECK(mismatches == 0);
    }
  }
}

TEST_CASE("relations in ball automata") {
  auto h = UnitriangularGroup::heisenberg();
  CHECK(dfa_decide(build_ball_automaton(*h, 8), h->alphabet().parse_word("x y x- y- z-")));
  MatrixGroup d(dihedral_matrices());
  CHECK(dfa_decide(build_ball_automaton(d, 6), d.alphabet().parse_word("s r s r")));
}

TEST_CASE("finite groups saturate without spurious edges") {
  CyclicGroup c(5);
  auto dfa = build_ball_automaton(c, 8);
  CHECK(dfa.state_count() == 5);
  CHECK_FALSE(dfa.spurious_target().has_value());
  CHECK(dfa.spurious_edges() == 0);
  std::size_t mismatches = 0;
  testing::for_each_word(1, 8, [&](const Word& w) { mismatches += dfa_decide(dfa, w) != c.is_identity(c.evaluate(w)); });
  CHECK(mismatches == 0);
  auto growth = compute_growth(c, 6);
  CHECK(growth.at(6) == 5);
  CHECK(growth.at(100) == 5);
}

TEST_CASE("memory cap") {
  CHECK_THROWS_AS(compute_ball(FreeGroup(2u), 10, 1000), ResourceError);
  CHECK_THROWS_AS(compute_growth(FreeGroup(2u), 10, 1000), ResourceError);
  CHECK_THROWS_AS(build_ball_automaton(FreeGroup(2u), 20, 1000), ResourceError);
}

TEST_CASE("growth CSV export") {
  auto csv = compute_growth(FreeAbelianGroup(1u), 2).to_csv();
  CHECK(csv.rfind("radius,gamma,log2_gamma\n", 0) == 0);
  CHECK(csv.find("\n2,5,") != std::string::npos);
}

TEST_CASE("exact ball streaming machine") {
  auto h = UnitriangularGroup::heisenberg();
  ExactBallRecipe rec(h);
  CHECK(rec.epsilon(10) == 0.0);
  CHECK(rec.space_bits(6) == ceil_log2(BigInt(compute_growth(*h, 6).at(6))));
  auto m = init(rec, 6, 0);
  std::size_t mismatches = 0;
  testing::for_each_word(3, 4, [&](const Word& w) {
    m->reset();
    mismatches += decide_identity(*m, w).accept != h->is_identity(h->evaluate(w));
  });
  CHECK(mismatches == 0);
}
