#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "wordstream/automaton.hpp"
#include "wordstream/exact_group.hpp"

namespace wordstream {

inline constexpr std::size_t kDefaultBallCap = 10'000'000;

struct GrowthTable {
  // gamma[r] = |B(r)|.
  std::vector<std::uint64_t> gamma;
  // gamma(r), constant past the last entry of a saturated table.
  std::uint64_t at(unsigned r) const;
  std::string to_csv() const;
};

struct Ball {
  GrowthTable growth;
  std::vector<Element> elements;  // BFS order, identity first
  std::vector<unsigned> distance;
  std::unordered_map<CanonicalKey, std::uint32_t> index;
  // elements.size() x letter_count; -1 where the neighbor lies outside the ball.
  std::vector<std::int64_t> edges;
  bool saturated = false;  // the ball is the whole group
};

Ball compute_ball(const ExactGroup& g, unsigned radius, std::size_t cap = kDefaultBallCap, bool with_edges = false);
// Growth only; keeps two BFS layers in memory.
GrowthTable compute_growth(const ExactGroup& g, unsigned radius, std::size_t cap = kDefaultBallCap);

// DFA on B(floor(n/2)) deciding the word problem for words of length <= n.
class BallAutomaton {
 public:
  std::size_t state_count() const { return state_count_; }
  unsigned bits() const;
  unsigned n() const { return n_; }
  std::uint32_t initial() const { return 0; }
  std::uint32_t next(std::uint32_t state, Letter a) const { return delta_[state * letters_ + a.code()]; }
  std::optional<std::uint32_t> sink() const { return sink_; }
  std::optional<std::uint32_t> spurious_target() const { return spurious_target_; }
  std::size_t spurious_edges() const { return spurious_edges_; }
  const Alphabet& alphabet() const { return *alphabet_; }

 private:
  friend BallAutomaton build_ball_automaton(const ExactGroup& g, unsigned n, std::size_t cap);
  AlphabetPtr alphabet_;
  unsigned n_ = 0;
  std::size_t letters_ = 0;
  std::size_t state_count_ = 0;
  std::vector<std::uint32_t> delta_;
  std::optional<std::uint32_t> sink_;
  std::optional<std::uint32_t> spurious_target_;
  std::size_t spurious_edges_ = 0;
};

BallAutomaton build_ball_automaton(const ExactGroup& g, unsigned n, std::size_t cap = kDefaultBallCap);
bool dfa_decide(const BallAutomaton& dfa, const Word& w);
// S(n) from the growth function: gamma(n/2) for even n, gamma(floor(n/2)) + 1 for odd n.
std::uint64_t ball_state_formula(const GrowthTable& growth, unsigned n);

// Exact streaming machine: the state is the current element of B(n). Error 0.
class ExactBallRecipe final : public Recipe {
 public:
  ExactBallRecipe(GroupPtr group, std::size_t cap = kDefaultBallCap);
  const AlphabetPtr& alphabet() const override { return group_->alphabet_ptr(); }
  AutomatonPtr build(const BigInt& n, Rng rng) const override;
  unsigned space_bits(const BigInt& n) const override;
  double epsilon(const BigInt&) const override { return 0.0; }
  std::string describe() const override;
  const GroupPtr& group() const { return group_; }

 private:
  std::shared_ptr<const Ball> ball_for(const BigInt& n) const;
  GroupPtr group_;
  std::size_t cap_;
  mutable std::mutex mutex_;
  mutable std::map<unsigned, std::shared_ptr<const Ball>> cache_;
};

}  // namespace wordstream
