#include "wordstream/automaton.hpp"

#include "wordstream/errors.hpp"

namespace wordstream {

namespace {
constexpr std::uint64_t kSmallLimit = 1ULL << 62;
}

LengthBudget::LengthBudget(const BigInt& bound) : bound_(bound), small_(bound <= kSmallLimit) {
  if (bound < 1) throw ConstructionError("length bound n must be at least 1");
  if (small_) bound_small_ = static_cast<std::uint64_t>(bound);
}

void LengthBudget::consume(std::uint64_t k) {
  if (small_) {
    if (k > bound_small_ - used_small_) throw OverflowError("stream longer than the bound n = " + bound_.str());
    used_small_ += k;
  } else {
    consume(BigInt(k));
  }
}

void LengthBudget::consume(const BigInt& k) {
  if (k < 0) throw Error("negative letter count");
  if (small_) {
    if (k > bound_small_ - used_small_) throw OverflowError("stream longer than the bound n = " + bound_.str());
    used_small_ += static_cast<std::uint64_t>(k);
    return;
  }
  if (used_big_ + k > bound_) throw OverflowError("stream longer than the bound n = " + bound_.str());
  used_big_ += k;
}

void LengthBudget::reset() {
  used_small_ = 0;
  used_big_ = 0;
}

BigInt LengthBudget::used() const { return small_ ? BigInt(used_small_) : used_big_; }

void StatePacker::put(const BigInt& value, unsigned width) {
  if (value < 0 || bit_length(value) > width) throw Error("StatePacker: field does not fit its width");
  if (value != 0) acc_ |= value << offset_;
  offset_ += width;
}

void StatePacker::put(std::uint64_t value, unsigned width) {
  if (bit_length(value) > width) throw Error("StatePacker: field does not fit its width");
  if (value != 0) acc_ |= BigInt(value) << offset_;
  offset_ += width;
}

StreamAutomaton::StreamAutomaton(AlphabetPtr alphabet, const BigInt& n, unsigned bits, double epsilon)
    : alphabet_(std::move(alphabet)), budget_(n), bits_(bits), epsilon_(epsilon) {}

void StreamAutomaton::record_initial() { initial_ = pack(); }

void StreamAutomaton::step(Letter a) {
  alphabet_->check(a);
  budget_.consume(std::uint64_t{1});
  do_step(a);
}

void StreamAutomaton::step_power(Letter a, const BigInt& k) {
  alphabet_->check(a);
  budget_.consume(k);
  if (k == 0) return;
  do_step_power(a, k);
}

void StreamAutomaton::do_step_power(Letter a, const BigInt& k) {
  for (BigInt i = 0; i < k; ++i) do_step(a);
}

void StreamAutomaton::feed(const Word& w) {
  for (Letter a : w) step(a);
}

void StreamAutomaton::reset() {
  budget_.reset();
  do_reset();
}

AutomatonPtr init(const Recipe& recipe, const BigInt& n, std::uint64_t seed) {
  if (n < 1) throw ConstructionError("length bound n must be at least 1");
  return recipe.build(n, Rng(seed));
}

DecisionResult decide_identity(StreamAutomaton& machine, const Word& w) {
  machine.feed(w);
  return {machine.at_initial(), machine.bits(), machine.letters_read()};
}

DecisionResult decide_identity(const Recipe& recipe, const BigInt& n, std::uint64_t seed, const Word& w) {
  if (BigInt(w.size()) > n) throw OverflowError("word longer than the bound n");
  auto m = init(recipe, n, seed);
  return decide_identity(*m, w);
}

unsigned space_bits(const Recipe& recipe, const BigInt& n) {
  if (n < 1) throw ConstructionError("length bound n must be at least 1");
  return recipe.space_bits(n);
}

}  // namespace wordstream
