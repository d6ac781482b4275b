#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "wordstream/alphabet.hpp"
#include "wordstream/bigint.hpp"
#include "wordstream/rng.hpp"

namespace wordstream {

// Counts letters against the length bound n.
class LengthBudget {
 public:
  explicit LengthBudget(const BigInt& bound);
  void consume(std::uint64_t k);
  void consume(const BigInt& k);
  void reset();
  const BigInt& bound() const { return bound_; }
  BigInt used() const;

 private:
  BigInt bound_;
  bool small_;
  std::uint64_t bound_small_ = 0;
  std::uint64_t used_small_ = 0;
  BigInt used_big_ = 0;
};

// Appends fixed-width fields into one little-endian integer.
class StatePacker {
 public:
  void put(const BigInt& value, unsigned width);
  void put(std::uint64_t value, unsigned width);
  const BigInt& value() const { return acc_; }
  unsigned width() const { return offset_; }

 private:
  BigInt acc_ = 0;
  unsigned offset_ = 0;
};

// Semi-randomized streaming machine: all randomness is drawn in the
// constructor, transitions are deterministic.
class StreamAutomaton {
 public:
  virtual ~StreamAutomaton() = default;
  StreamAutomaton(const StreamAutomaton&) = delete;
  StreamAutomaton& operator=(const StreamAutomaton&) = delete;

  const Alphabet& alphabet() const { return *alphabet_; }
  const AlphabetPtr& alphabet_ptr() const { return alphabet_; }
  const BigInt& bound() const { return budget_.bound(); }
  BigInt letters_read() const { return budget_.used(); }
  unsigned bits() const { return bits_; }
  double epsilon_bound() const { return epsilon_; }

  void step(Letter a);
  void step_power(Letter a, const BigInt& k);
  void feed(const Word& w);

  // Packed encoding of the current state, in [0, 2^bits).
  BigInt state_index() const { return pack(); }
  const BigInt& initial_index() const { return initial_; }
  bool at_initial() const { return state_index() == initial_; }
  // Return to the sampled initial state.
  void reset();

 protected:
  StreamAutomaton(AlphabetPtr alphabet, const BigInt& n, unsigned bits, double epsilon);
  // Derived constructors call this once the initial state is in place.
  void record_initial();

  virtual void do_step(Letter a) = 0;
  // Default: repeated do_step. k has already been checked against the budget.
  virtual void do_step_power(Letter a, const BigInt& k);
  virtual BigInt pack() const = 0;
  virtual void do_reset() = 0;

 private:
  AlphabetPtr alphabet_;
  LengthBudget budget_;
  unsigned bits_;
  double epsilon_;
  BigInt initial_ = 0;
};

using AutomatonPtr = std::unique_ptr<StreamAutomaton>;

// Immutable build recipe for a family (A_n) of machines.
class Recipe {
 public:
  virtual ~Recipe() = default;
  virtual const AlphabetPtr& alphabet() const = 0;
  virtual AutomatonPtr build(const BigInt& n, Rng rng) const = 0;
  virtual unsigned space_bits(const BigInt& n) const = 0;
  virtual double epsilon(const BigInt& n) const = 0;
  virtual std::string describe() const = 0;
};

using RecipePtr = std::shared_ptr<const Recipe>;

AutomatonPtr init(const Recipe& recipe, const BigInt& n, std::uint64_t seed);

struct DecisionResult {
  bool accept = false;
  unsigned bits_used = 0;
  BigInt letters_read = 0;
};

DecisionResult decide_identity(const Recipe& recipe, const BigInt& n, std::uint64_t seed, const Word& w);
DecisionResult decide_identity(StreamAutomaton& machine, const Word& w);

unsigned space_bits(const Recipe& recipe, const BigInt& n);

}  // namespace wordstream
