#include "wordstream/ball.hpp"

#include <cmath>
#include <sstream>
#include <unordered_set>

namespace wordstream {

std::uint64_t GrowthTable::at(unsigned r) const {
  if (gamma.empty()) throw Error("empty growth table");
  return r < gamma.size() ? gamma[r] : gamma.back();
}

std::string GrowthTable::to_csv() const {
  std::ostringstream out;
  out << "radius,gamma,log2_gamma\n";
  out.precision(10);
  for (std::size_t r = 0; r < gamma.size(); ++r)
    out << r << ',' << gamma[r] << ',' << std::log2(static_cast<double>(gamma[r])) << '\n';
  return out.str();
}

Ball compute_ball(const ExactGroup& g, unsigned radius, std::size_t cap, bool with_edges) {
  Ball ball;
  const auto letters = g.alphabet().letters();
  const std::size_t L = letters.size();
  Element e = g.identity();
  ball.index.emplace(g.key(e), 0);
  ball.elements.push_back(e);
  ball.distance.push_back(0);
  ball.growth.gamma.push_back(1);
  std::size_t layer_begin = 0;
  for (unsigned r = 0; r < radius; ++r) {
    std::size_t layer_end = ball.elements.size();
    if (layer_begin == layer_end) break;
    for (std::size_t i = layer_begin; i < layer_end; ++i) {
      for (Letter a : letters) {
        Element y = g.mul(ball.elements[i], g.letter(a));
        CanonicalKey k = g.key(y);
        if (ball.index.count(k)) continue;
        if (ball.elements.size() >= cap) throw ResourceError("ball exceeds the memory cap of " + std::to_string(cap) + " elements");
        ball.index.emplace(std::move(k), static_cast<std::uint32_t>(ball.elements.size()));
        ball.elements.push_back(std::move(y));
        ball.distance.push_back(r + 1);
      }
    }
    layer_begin = layer_end;
    ball.growth.gamma.push_back(ball.elements.size());
  }
  // Saturated when the outer layer has no new neighbors.
  ball.saturated = false;
  if (with_edges) {
    ball.edges.assign(ball.elements.size() * L, -1);
    bool closed = true;
    for (std::size_t i = 0; i < ball.elements.size(); ++i)
      for (std::size_t c = 0; c < L; ++c) {
        Element y = g.mul(ball.elements[i], g.letter(letters[c]));
        auto it = ball.index.find(g.key(y));
        if (it != ball.index.end())
          ball.edges[i * L + c] = it->second;
        else
          closed = false;
      }
    ball.saturated = closed;
  } else if (ball.growth.gamma.size() >= 2 && ball.growth.gamma.back() == ball.growth.gamma[ball.growth.gamma.size() - 2]) {
    ball.saturated = true;
  }
  if (radius <= (1u << 20))
    while (ball.growth.gamma.size() < static_cast<std::size_t>(radius) + 1) ball.growth.gamma.push_back(ball.elements.size());
  return ball;
}

GrowthTable compute_growth(const ExactGroup& g, unsigned radius, std::size_t cap) {
  GrowthTable t;
  const auto letters = g.alphabet().letters();
  std::unordered_set<CanonicalKey> prev, cur;
  std::vector<Element> frontier{g.identity()};
  cur.insert(g.key(frontier[0]));
  std::uint64_t total = 1;
  t.gamma.push_back(1);
  for (unsigned r = 0; r < radius; ++r) {
    std::unordered_set<CanonicalKey> next;
    std::vector<Element> next_frontier;
    for (const auto& x : frontier)
      for (Letter a : letters) {
        Element y = g.mul(x, g.letter(a));
        CanonicalKey k = g.key(y);
        if (prev.count(k) || cur.count(k) || next.count(k)) continue;
        next.insert(std::move(k));
        next_frontier.push_back(std::move(y));
        if (prev.size() + cur.size() + next.size() > cap)
          throw ResourceError("growth computation exceeds the memory cap of " + std::to_string(cap) + " elements");
      }
    total += next_frontier.size();
    t.gamma.push_back(total);
    prev = std::move(cur);
    cur = std::move(next);
    frontier = std::move(next_frontier);
  }
  return t;
}

unsigned BallAutomaton::bits() const { return ceil_log2(BigInt(state_count_)); }

BallAutomaton build_ball_automaton(const ExactGroup& g, unsigned n, std::size_t cap) {
  if (n < 1) throw ConstructionError("ball automaton requires n >= 1");
  const unsigned radius = n / 2;
  Ball ball = compute_ball(g, radius, cap, true);
  BallAutomaton dfa;
  dfa.alphabet_ = g.alphabet_ptr();
  dfa.n_ = n;
  dfa.letters_ = g.alphabet().letter_count();
  const std::size_t size = ball.elements.size();
  dfa.state_count_ = size + (n % 2 ? 1 : 0);
  dfa.delta_.assign(dfa.state_count_ * dfa.letters_, 0);
  if (n % 2 == 0) {
    for (std::size_t i = 0; i < size; ++i)
      if (ball.distance[i] == radius) {
        dfa.spurious_target_ = static_cast<std::uint32_t>(i);
        break;
      }
  } else {
    dfa.sink_ = static_cast<std::uint32_t>(size);
  }
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t c = 0; c < dfa.letters_; ++c) {
      std::int64_t t = ball.edges[i * dfa.letters_ + c];
      if (t >= 0) {
        dfa.delta_[i * dfa.letters_ + c] = static_cast<std::uint32_t>(t);
      } else {
        ++dfa.spurious_edges_;
        // A missing edge implies an element at distance radius, so the target exists.
        dfa.delta_[i * dfa.letters_ + c] = n % 2 ? *dfa.sink_ : *dfa.spurious_target_;
      }
    }
  if (dfa.sink_)
    for (std::size_t c = 0; c < dfa.letters_; ++c) dfa.delta_[*dfa.sink_ * dfa.letters_ + c] = *dfa.sink_;
  return dfa;
}

bool dfa_decide(const BallAutomaton& dfa, const Word& w) {
  if (w.size() > dfa.n()) throw OverflowError("word longer than the automaton bound n");
  dfa.alphabet().check(w);
  std::uint32_t s = dfa.initial();
  for (Letter a : w) s = dfa.next(s, a);
  return s == dfa.initial();
}

std::uint64_t ball_state_formula(const GrowthTable& growth, unsigned n) {
  return growth.at(n / 2) + (n % 2 ? 1 : 0);
}

// ---- ExactBallRecipe ----

namespace {

class ExactBallMachine final : public StreamAutomaton {
 public:
  ExactBallMachine(AlphabetPtr alphabet, const BigInt& n, std::shared_ptr<const Ball> ball)
      : StreamAutomaton(std::move(alphabet), n, ceil_log2(BigInt(ball->elements.size())), 0.0),
        ball_(std::move(ball)),
        letters_(this->alphabet().letter_count()) {
    record_initial();
  }

 protected:
  void do_step(Letter a) override {
    std::int64_t t = ball_->edges[state_ * letters_ + a.code()];
    if (t < 0) throw Error("exact ball machine left its ball");
    state_ = static_cast<std::uint32_t>(t);
  }
  BigInt pack() const override { return BigInt(state_); }
  void do_reset() override { state_ = 0; }

 private:
  std::shared_ptr<const Ball> ball_;
  std::size_t letters_;
  std::uint32_t state_ = 0;
};

}  // namespace

ExactBallRecipe::ExactBallRecipe(GroupPtr group, std::size_t cap) : group_(std::move(group)), cap_(cap) {}

std::shared_ptr<const Ball> ExactBallRecipe::ball_for(const BigInt& n) const {
  // Words of length <= n stay in B(n); the ball stops growing once it is the whole group.
  unsigned radius = fits_u64(n) && n < (1u << 30) ? static_cast<unsigned>(n) : (1u << 30);
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cache_.find(radius);
  if (it != cache_.end()) return it->second;
  auto ball = std::make_shared<Ball>(compute_ball(*group_, radius, cap_, true));
  cache_.emplace(radius, ball);
  return ball;
}

AutomatonPtr ExactBallRecipe::build(const BigInt& n, Rng) const {
  if (n < 1) throw ConstructionError("length bound n must be at least 1");
  return std::make_unique<ExactBallMachine>(group_->alphabet_ptr(), n, ball_for(n));
}

unsigned ExactBallRecipe::space_bits(const BigInt& n) const { return ceil_log2(BigInt(ball_for(n)->elements.size())); }

std::string ExactBallRecipe::describe() const { return "exact-ball(" + group_->kind() + ")"; }

}  // namespace wordstream
