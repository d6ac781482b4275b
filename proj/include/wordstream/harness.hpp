#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wordstream/automaton.hpp"
#include "wordstream/exact_group.hpp"
#include "wordstream/grigorchuk.hpp"

namespace wordstream {

enum class PairKind { equal, unequal, adversarial_disjointness, adversarial_grigorchuk };

std::string to_string(PairKind kind);
PairKind parse_pair_kind(const std::string& text);

struct WordPair {
  Word u, v;
  bool truth = false;  // u and v are equal in the group
};

Word random_word(const Alphabet& alphabet, std::size_t length, Rng& rng);

// Oracle-labeled pair with |u|, |v| <= max_len. Throws ResourceError when the
// requested kind cannot be produced (e.g. unequal pairs in a trivial group).
WordPair gen_word_pair(const ExactGroup& g, PairKind kind, std::size_t max_len, std::uint64_t seed);

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

// Wilson score interval; z = 2.5758 gives 99% coverage.
inline constexpr double kWilson99 = 2.5758293035489;
Interval wilson_interval(std::uint64_t failures, std::uint64_t trials, double z = kWilson99);

struct ErrorReport {
  std::string spec;
  std::string n;
  std::string kind;
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  double estimate = 0.0;
  Interval ci;
  double bound = 0.0;
  double slack = 2.0;
  bool pass = false;

  nlohmann::json to_json() const;
  static std::string csv_header();
  std::string to_csv_row() const;
};

struct EstimateOptions {
  std::string spec;
  std::size_t pool = 256;            // distinct oracle-labeled inputs
  std::size_t inputs_per_seed = 1;   // inputs run on one sampled machine (reset in between)
  std::size_t max_len = 0;           // 0: use n
  unsigned threads = 0;              // 0: hardware concurrency
  double slack = 2.0;
};

// Injectivity violations: equal pairs reaching different states, unequal
// pairs reaching the same state. Trial i uses seed block i / inputs_per_seed.
ErrorReport estimate_error(const Recipe& recipe, const ExactGroup& oracle, PairKind kind, const BigInt& n,
                           std::uint64_t trials, std::uint64_t seed, const EstimateOptions& opts = {});

// Same, for pairs supplied by the caller.
ErrorReport estimate_error(const Recipe& recipe, const std::vector<WordPair>& pairs, const BigInt& n,
                           std::uint64_t trials, std::uint64_t seed, const EstimateOptions& opts = {},
                           const std::string& kind = "custom");

// Decision errors against the oracle on a mix of identity words and random words of length <= n.
ErrorReport estimate_decision_error(const Recipe& recipe, const ExactGroup& oracle, const BigInt& n,
                                    std::uint64_t trials, std::uint64_t seed, const EstimateOptions& opts = {});

// ---- hard instances ----

using Bits = std::vector<bool>;
Bits parse_bits(const std::string& text);

// u[g] v[h] u[g^-1] v[h^-1] in H wr G, where x[i] sits at the i-th prefix of the ray.
// g, h: words over the lamp alphabet; ray: n-1 letters over the top alphabet.
struct DisjointnessInstance {
  Word word;
  bool identity = false;  // oracle verdict
};
DisjointnessInstance disjointness_instance(const Bits& u, const Bits& v, const WreathGroup& group, const Word& g,
                                           const Word& h, std::optional<Word> ray = std::nullopt);
// First pair of lamp generators that do not commute.
std::pair<Word, Word> noncommuting_lamps(const WreathGroup& group);

// Subgroup K = <t, v, w> of the Grigorchuk group.
AlphabetPtr tvw_alphabet();
// t = (ab)^2, v = (bada)^2, w = (abad)^2.
Word expand_tvw(const Word& w, const GrigorchukGroup& g);
// Image of the pair (x, 1) or (1, x) under phi : K x K -> K.
Word grigorchuk_phi_pair(const Word& x, const Word& y);
// phi_k on a tuple of 2^k words over {t, v, w}.
Word grigorchuk_phi(const std::vector<Word>& tuple, unsigned k);

struct GrigorchukInstance {
  Word tvw;       // x[t] y[v] x[t^-1] y[v^-1]
  Word expanded;  // over {a, b, c, d}
  bool identity = false;
};
GrigorchukInstance grigorchuk_instance(const Bits& x, const Bits& y, const GrigorchukGroup& g);

}  // namespace wordstream
