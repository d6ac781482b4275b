#include "wordstream/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "wordstream/errors.hpp"

namespace wordstream {

std::string to_string(PairKind kind) {
  switch (kind) {
    case PairKind::equal:
      return "equal";
    case PairKind::unequal:
      return "unequal";
    case PairKind::adversarial_disjointness:
      return "adversarial-disjointness";
    case PairKind::adversarial_grigorchuk:
      return "adversarial-grigorchuk";
  }
  return "?";
}

PairKind parse_pair_kind(const std::string& text) {
  for (auto k : {PairKind::equal, PairKind::unequal, PairKind::adversarial_disjointness, PairKind::adversarial_grigorchuk})
    if (to_string(k) == text) return k;
  throw FormatError("unknown pair kind '" + text + "'");
}

Word random_word(const Alphabet& alphabet, std::size_t length, Rng& rng) {
  Word w;
  w.reserve(length);
  for (std::size_t i = 0; i < length; ++i) w.push_back(Letter::from_code(static_cast<std::uint32_t>(rng.below(alphabet.letter_count()))));
  return w;
}

namespace {

constexpr int kAttempts = 2000;

Word rotate(const Word& w, std::size_t k) {
  Word out(w.begin() + static_cast<std::ptrdiff_t>(k % std::max<std::size_t>(w.size(), 1)), w.end());
  out.insert(out.end(), w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k % std::max<std::size_t>(w.size(), 1)));
  return out;
}

// A random word equal to the identity, no longer than budget (possibly empty).
Word identity_piece(const ExactGroup& g, const std::vector<Word>& relators, std::size_t budget, Rng& rng) {
  std::vector<Word> fitting;
  for (const auto& r : relators)
    if (!r.empty() && r.size() <= budget) fitting.push_back(r);
  if (!fitting.empty() && rng.coin()) {
    Word r = fitting[rng.below(fitting.size())];
    r = rotate(r, rng.below(r.size()));
    return rng.coin() ? r : inverse(r);
  }
  if (budget < 2) return {};
  Letter a = Letter::from_code(static_cast<std::uint32_t>(rng.below(g.alphabet().letter_count())));
  return {a, a.inverse()};
}

Word insert_identities(const ExactGroup& g, const std::vector<Word>& relators, Word w, std::size_t max_len, Rng& rng,
                       unsigned pieces) {
  for (unsigned i = 0; i < pieces && w.size() < max_len; ++i) {
    Word piece = identity_piece(g, relators, max_len - w.size(), rng);
    auto at = static_cast<std::ptrdiff_t>(rng.below(w.size() + 1));
    w.insert(w.begin() + at, piece.begin(), piece.end());
  }
  return w;
}

WordPair equal_pair(const ExactGroup& g, std::size_t max_len, Rng& rng) {
  const auto relators = g.relators();
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::size_t base_len = rng.below(max_len - 1);
    Word base = random_word(g.alphabet(), base_len, rng);
    auto pieces = static_cast<unsigned>(1 + rng.below(3));
    Word u = insert_identities(g, relators, base, max_len, rng, rng.coin() ? 0u : pieces);
    Word v = insert_identities(g, relators, base, max_len, rng, pieces);
    if (u == v) continue;
    if (!g.equal(g.evaluate(u), g.evaluate(v))) throw Error("equal-pair generator produced unequal words in " + g.kind());
    return {std::move(u), std::move(v), true};
  }
  throw ResourceError("generation timeout: no equal pair found in " + g.kind());
}

WordPair unequal_pair(const ExactGroup& g, std::size_t max_len, Rng& rng) {
  const auto& alpha = g.alphabet();
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    Word u = random_word(alpha, 1 + rng.below(max_len), rng);
    Word v;
    switch (rng.below(3)) {
      case 0:
        v = random_word(alpha, rng.below(max_len + 1), rng);
        break;
      case 1:
        v = u;
        v[rng.below(v.size())] = Letter::from_code(static_cast<std::uint32_t>(rng.below(alpha.letter_count())));
        break;
      default: {
        // Insert a commutator of two letters.
        v = u;
        if (v.size() + 4 > max_len) v.resize(max_len - std::min<std::size_t>(max_len, 4));
        Letter x = Letter::from_code(static_cast<std::uint32_t>(rng.below(alpha.letter_count())));
        Letter y = Letter::from_code(static_cast<std::uint32_t>(rng.below(alpha.letter_count())));
        Word c{x, y, x.inverse(), y.inverse()};
        if (c.size() > max_len) continue;
        v.insert(v.begin() + static_cast<std::ptrdiff_t>(rng.below(v.size() + 1)), c.begin(), c.end());
        break;
      }
    }
    if (v.size() > max_len) continue;
    if (g.equal(g.evaluate(u), g.evaluate(v))) continue;
    return {std::move(u), std::move(v), false};
  }
  throw ResourceError("generation timeout: no unequal pair found in " + g.kind());
}

Bits random_bits(std::size_t n, Rng& rng) {
  Bits b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = rng.coin();
  return b;
}

WordPair disjointness_pair(const ExactGroup& g, std::size_t max_len, Rng& rng) {
  const auto* wr = dynamic_cast<const WreathGroup*>(&g);
  if (!wr) throw ConstructionError("adversarial-disjointness pairs need a wreath product group");
  auto [x, y] = noncommuting_lamps(*wr);
  std::size_t per = std::max(x.size(), y.size());
  // |w| <= 4 (n per + 2 (n - 1)).
  std::size_t n = max_len / 4 + 2 >= per + 2 ? (max_len / 4 + 2) / (per + 2) : 0;
  if (n == 0) throw ResourceError("generation timeout: max_len too small for a disjointness instance");
  auto inst = disjointness_instance(random_bits(n, rng), random_bits(n, rng), *wr, x, y);
  return {inst.word, {}, inst.identity};
}

WordPair grigorchuk_pair(const ExactGroup& g, std::size_t max_len, Rng& rng) {
  const auto* gg = dynamic_cast<const GrigorchukGroup*>(&g);
  if (!gg) throw ConstructionError("adversarial-grigorchuk pairs need the Grigorchuk group");
  for (int k = 12; k >= 0; --k) {
    std::size_t n = std::size_t{1} << k;
    if (8 * 4 * n * n > 64 * max_len) continue;
    auto inst = grigorchuk_instance(random_bits(n, rng), random_bits(n, rng), *gg);
    if (inst.expanded.size() <= max_len) return {inst.expanded, {}, inst.identity};
  }
  throw ResourceError("generation timeout: max_len too small for a Grigorchuk instance");
}

}  // namespace

WordPair gen_word_pair(const ExactGroup& g, PairKind kind, std::size_t max_len, std::uint64_t seed) {
  if (max_len < 2) throw ConstructionError("gen_word_pair: max_len must be at least 2");
  Rng rng = Rng(seed).split("pair");
  switch (kind) {
    case PairKind::equal:
      return equal_pair(g, max_len, rng);
    case PairKind::unequal:
      return unequal_pair(g, max_len, rng);
    case PairKind::adversarial_disjointness:
      return disjointness_pair(g, max_len, rng);
    case PairKind::adversarial_grigorchuk:
      return grigorchuk_pair(g, max_len, rng);
  }
  throw Error("unknown pair kind");
}

Interval wilson_interval(std::uint64_t failures, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double t = static_cast<double>(trials);
  const double p = static_cast<double>(failures) / t;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / t;
  const double center = (p + z2 / (2.0 * t)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / t + z2 / (4.0 * t * t)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

nlohmann::json ErrorReport::to_json() const {
  return {{"spec", spec},         {"n", n},
          {"kind", kind},         {"trials", trials},
          {"failures", failures}, {"estimate", estimate},
          {"ci", {ci.low, ci.high}}, {"bound", bound},
          {"slack", slack},       {"pass", pass}};
}

std::string ErrorReport::csv_header() { return "spec,n,kind,trials,failures,estimate,ci_low,ci_high,bound,pass"; }

std::string ErrorReport::to_csv_row() const {
  std::ostringstream os;
  os.precision(10);
  os << '"' << spec << "\"," << n << ',' << kind << ',' << trials << ',' << failures << ',' << estimate << ',' << ci.low
     << ',' << ci.high << ',' << bound << ',' << (pass ? "true" : "false");
  return os.str();
}

namespace {

void check_lengths(const std::vector<WordPair>& pairs, const BigInt& n) {
  for (const auto& p : pairs)
    if (BigInt(p.u.size()) > n || BigInt(p.v.size()) > n) throw OverflowError("input word longer than the bound n");
}

ErrorReport run_trials(const Recipe& recipe, const std::vector<WordPair>& inputs, const BigInt& n, std::uint64_t trials,
                       std::uint64_t seed, const EstimateOptions& opts, const std::string& kind) {
  if (trials < 100) throw ConstructionError("estimate: trials must be at least 100");
  if (inputs.empty()) throw ConstructionError("estimate: no inputs");
  check_lengths(inputs, n);
  const std::uint64_t per = std::max<std::uint64_t>(1, opts.inputs_per_seed);
  const std::uint64_t blocks = (trials + per - 1) / per;
  std::vector<std::uint8_t> fail(trials, 0);
  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, blocks));
  std::vector<std::exception_ptr> errors(threads);
  const Rng base = Rng(seed).split("trial");

  auto worker = [&](unsigned tid) {
    try {
      for (std::uint64_t b = tid; b < blocks; b += threads) {
        auto machine = recipe.build(n, base.split(b));
        for (std::uint64_t i = b * per; i < std::min(trials, (b + 1) * per); ++i) {
          const auto& pr = inputs[i % inputs.size()];
          machine->reset();
          machine->feed(pr.u);
          BigInt su = machine->state_index();
          machine->reset();
          machine->feed(pr.v);
          bool same = su == machine->state_index();
          fail[i] = same != pr.truth;
        }
      }
    } catch (...) {
      errors[tid] = std::current_exception();
    }
  };
  if (threads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  ErrorReport r;
  r.spec = opts.spec.empty() ? recipe.describe() : opts.spec;
  r.n = n.str();
  r.kind = kind;
  r.trials = trials;
  for (auto f : fail) r.failures += f;
  r.estimate = static_cast<double>(r.failures) / static_cast<double>(trials);
  r.ci = wilson_interval(r.failures, trials);
  r.bound = recipe.epsilon(n);
  r.slack = opts.slack;
  r.pass = r.ci.low <= opts.slack * r.bound;
  return r;
}

std::size_t max_len_for(const EstimateOptions& opts, const BigInt& n) {
  std::size_t cap = fits_u64(n) && n < 100000 ? static_cast<std::size_t>(n) : 100000;
  return opts.max_len ? std::min(opts.max_len, cap) : cap;
}

void check_alphabets(const Recipe& recipe, const ExactGroup& oracle) {
  if (!(*recipe.alphabet() == oracle.alphabet()))
    throw ConstructionError("estimate: recipe and oracle use different alphabets");
}

}  // namespace

ErrorReport estimate_error(const Recipe& recipe, const ExactGroup& oracle, PairKind kind, const BigInt& n,
                           std::uint64_t trials, std::uint64_t seed, const EstimateOptions& opts) {
  if (trials < 100) throw ConstructionError("estimate: trials must be at least 100");
  check_alphabets(recipe, oracle);
  const std::size_t len = max_len_for(opts, n);
  const std::size_t pool = std::max<std::size_t>(1, std::min<std::uint64_t>(opts.pool, trials));
  std::vector<WordPair> pairs;
  Rng prng = Rng(seed).split("pool");
  for (std::size_t i = 0; i < pool; ++i) pairs.push_back(gen_word_pair(oracle, kind, len, prng.split(i).key()));
  return run_trials(recipe, pairs, n, trials, seed, opts, to_string(kind));
}

ErrorReport estimate_error(const Recipe& recipe, const std::vector<WordPair>& pairs, const BigInt& n,
                           std::uint64_t trials, std::uint64_t seed, const EstimateOptions& opts, const std::string& kind) {
  return run_trials(recipe, pairs, n, trials, seed, opts, kind);
}

ErrorReport estimate_decision_error(const Recipe& recipe, const ExactGroup& oracle, const BigInt& n,
                                    std::uint64_t trials, std::uint64_t seed, const EstimateOptions& opts) {
  if (trials < 100) throw ConstructionError("estimate: trials must be at least 100");
  check_alphabets(recipe, oracle);
  const std::size_t len = max_len_for(opts, n);
  if (len < 4) throw ConstructionError("estimate: n too small for decision inputs");
  const std::size_t pool = std::max<std::size_t>(1, std::min<std::uint64_t>(opts.pool, trials));
  std::vector<WordPair> inputs;
  Rng prng = Rng(seed).split("pool");
  for (std::size_t i = 0; i < pool; ++i) {
    Rng r = prng.split(i);
    Word w;
    if (i % 2 == 0) {
      auto p = gen_word_pair(oracle, PairKind::equal, len / 2, r.key());
      w = concat(p.u, inverse(p.v));
    } else {
      w = random_word(oracle.alphabet(), 1 + r.below(len), r);
    }
    bool truth = oracle.is_identity(w);
    inputs.push_back({std::move(w), {}, truth});
  }
  return run_trials(recipe, inputs, n, trials, seed, opts, "decision");
}

// ---------------------------------------------------------------- hard instances

Bits parse_bits(const std::string& text) {
  Bits b;
  for (char ch : text) {
    if (ch == '0' || ch == '1')
      b.push_back(ch == '1');
    else if (!std::isspace(static_cast<unsigned char>(ch)))
      throw FormatError("bitstring may contain only 0 and 1");
  }
  return b;
}

std::pair<Word, Word> noncommuting_lamps(const WreathGroup& group) {
  const auto& h = *group.lamp();
  for (std::uint32_t i = 0; i < h.alphabet().size(); ++i)
    for (std::uint32_t j = i + 1; j < h.alphabet().size(); ++j) {
      Word x{Letter{i, false}}, y{Letter{j, false}};
      if (!h.equal(h.evaluate(concat(x, y)), h.evaluate(concat(y, x)))) return {x, y};
    }
  throw ConstructionError("disjointness instance: lamp group generators all commute");
}

DisjointnessInstance disjointness_instance(const Bits& u, const Bits& v, const WreathGroup& group, const Word& g,
                                           const Word& h, std::optional<Word> ray) {
  const std::size_t n = u.size();
  if (n == 0 || v.size() != n) throw ConstructionError("disjointness instance: bitstrings must have equal positive length");
  const auto& layout = group.layout();
  const auto& top = *group.top();
  Word t = ray ? *ray : Word(n - 1, Letter{0, false});
  if (t.size() != n - 1) throw ConstructionError("disjointness instance: ray word needs n-1 letters");
  top.alphabet().check(t);
  std::vector<CanonicalKey> seen;
  Element pos = top.identity();
  seen.push_back(top.key(pos));
  for (Letter a : t) {
    pos = top.mul(pos, top.letter(a));
    auto k = top.key(pos);
    if (std::find(seen.begin(), seen.end(), k) != seen.end())
      throw ConstructionError("disjointness instance: ray word has repeated prefixes");
    seen.push_back(std::move(k));
  }
  auto lift = [&](const Word& w, std::size_t part) {
    Word out;
    for (Letter a : w) out.push_back(layout.from_part(a, part));
    return out;
  };
  const Word ray_word = lift(t, 1);
  // w[x] = x^{a_0} t_1 x^{a_1} ... t_{n-1} x^{a_{n-1}} s^{-1}
  auto block = [&](const Bits& bits, const Word& x) {
    Word lx = lift(x, 0);
    Word out;
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) out.push_back(ray_word[i - 1]);
      if (bits[i]) out.insert(out.end(), lx.begin(), lx.end());
    }
    Word back = inverse(ray_word);
    out.insert(out.end(), back.begin(), back.end());
    return out;
  };
  Word w = block(u, g);
  for (const Word& part : {block(v, h), block(u, inverse(g)), block(v, inverse(h))}) w.insert(w.end(), part.begin(), part.end());
  return {w, group.is_identity(group.evaluate(w))};
}

AlphabetPtr tvw_alphabet() {
  static const AlphabetPtr a = std::make_shared<Alphabet>(std::vector<std::string>{"t", "v", "w"});
  return a;
}

Word expand_tvw(const Word& w, const GrigorchukGroup& g) {
  const auto& al = g.alphabet();
  const Word images[3] = {al.parse_word("a b a b"), al.parse_word("b a d a b a d a"), al.parse_word("a b a d a b a d")};
  Word out;
  for (Letter x : w) {
    if (x.gen > 2) throw AlphabetError("expand_tvw: letter outside {t, v, w}");
    Word img = x.inverted ? inverse(images[x.gen]) : images[x.gen];
    out.insert(out.end(), img.begin(), img.end());
  }
  return out;
}

namespace {

Word apply_images(const Word& w, const Word (&images)[3]) {
  Word out;
  for (Letter x : w) {
    if (x.gen > 2) throw AlphabetError("phi: letter outside {t, v, w}");
    Word img = x.inverted ? inverse(images[x.gen]) : images[x.gen];
    out.insert(out.end(), img.begin(), img.end());
  }
  return out;
}

}  // namespace

Word grigorchuk_phi_pair(const Word& x, const Word& y) {
  const auto& al = *tvw_alphabet();
  static const Word left[3] = {al.parse_word("v"), al.parse_word("v- t- v t"), al.parse_word("v t v- t-")};
  static const Word right[3] = {al.parse_word("w"), al.parse_word("w- t w t-"), al.parse_word("w t- w- t")};
  return concat(apply_images(x, left), apply_images(y, right));
}

Word grigorchuk_phi(const std::vector<Word>& tuple, unsigned k) {
  if (k >= 32 || tuple.size() != (std::size_t{1} << k))
    throw ConstructionError("grigorchuk_phi: tuple length must be 2^k");
  if (k == 0) return tuple[0];
  const std::size_t half = tuple.size() / 2;
  std::vector<Word> lo(tuple.begin(), tuple.begin() + static_cast<std::ptrdiff_t>(half));
  std::vector<Word> hi(tuple.begin() + static_cast<std::ptrdiff_t>(half), tuple.end());
  return grigorchuk_phi_pair(grigorchuk_phi(lo, k - 1), grigorchuk_phi(hi, k - 1));
}

GrigorchukInstance grigorchuk_instance(const Bits& x, const Bits& y, const GrigorchukGroup& g) {
  const std::size_t n = x.size();
  if (n == 0 || y.size() != n || (n & (n - 1)) != 0)
    throw ConstructionError("grigorchuk instance: bitstrings must have equal power-of-two length");
  unsigned k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  auto embed = [&](const Bits& bits, Letter s) {
    std::vector<Word> tuple;
    for (bool b : bits) tuple.push_back(b ? Word{s} : Word{});
    return grigorchuk_phi(tuple, k);
  };
  const Letter t{0, false}, v{1, false};
  Word w = embed(x, t);
  for (const Word& part : {embed(y, v), embed(x, t.inverse()), embed(y, v.inverse())}) w.insert(w.end(), part.begin(), part.end());
  GrigorchukInstance inst;
  inst.tvw = w;
  inst.expanded = expand_tvw(w, g);
  inst.identity = g.is_trivial_word(inst.expanded);
  return inst;
}

}  // namespace wordstream
