#include "wordstream/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wordstream/ball.hpp"
#include "wordstream/builder.hpp"
#include "wordstream/errors.hpp"
#include "wordstream/formats.hpp"
#include "wordstream/harness.hpp"

namespace wordstream {

namespace {

using nlohmann::json;

struct Common {
  std::string group;
  std::string n = "64";
  std::uint64_t seed = 1;
  BuildConfig build;
  bool csv = false;
  std::string output;
};

std::uint64_t default_seed() {
  if (const char* s = std::getenv("WORDSTREAM_SEED")) {
    try {
      return std::stoull(s);
    } catch (...) {
      throw FormatError("WORDSTREAM_SEED must be an unsigned integer");
    }
  }
  return 1;
}

void add_common(CLI::App* cmd, Common& c, bool needs_group = true) {
  auto* g = cmd->add_option("--group,-g", c.group, "group expression, e.g. \"fp(Z, Z)\"");
  if (needs_group) g->required();
  cmd->add_option("--n", c.n, "word-length bound n");
  cmd->add_option("--seed", c.seed, "random seed (default: $WORDSTREAM_SEED or 1)");
  cmd->add_option("--c", c.build.c, "fingerprint error exponent")->check(CLI::Range(1u, 16u));
  cmd->add_option("--c-inner", c.build.c_inner, "exponent inside fp/wr")->check(CLI::Range(1u, 16u));
  cmd->add_option("--d", c.build.d, "lamp error exponent")->check(CLI::Range(1u, 16u));
  cmd->add_option("--eps-prime", c.build.eps_prime, "error target for Z_{p^k} lamps")->check(CLI::Range(1e-9, 0.999));
  cmd->add_option("--c-f2", c.build.c_f2, "exponent of the free-product F2 fingerprint")->check(CLI::Range(1u, 16u));
  cmd->add_option("--cap", c.build.ball_cap, "ball element cap");
  cmd->add_flag("--exact-top", c.build.exact_top, "exact ball machine for wreath top groups");
  cmd->add_option("--base-dir", c.build.base_dir, "directory for relative data files");
  cmd->add_flag("--csv", c.csv, "CSV instead of JSON");
  cmd->add_option("--output,-o", c.output, "output file (default stdout)");
}

BigInt bound(const Common& c) {
  BigInt n = parse_bigint(c.n);
  if (n < 1) throw ConstructionError("--n must be at least 1");
  return n;
}

unsigned small_bound(const Common& c, unsigned limit) {
  BigInt n = bound(c);
  if (n > limit) throw ConstructionError("--n must be at most " + std::to_string(limit) + " for this command");
  return static_cast<unsigned>(n);
}

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw FormatError("cannot write '" + path + "'");
      out_ = &file_;
    }
  }
  std::ostream& operator*() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

std::string csv_bool(bool b) { return b ? "true" : "false"; }

int cmd_check(const Common& c, const std::string& word_file, bool with_oracle, std::istream& in, std::ostream& out) {
  auto built = build_group(c.group, c.build);
  const BigInt n = bound(c);
  std::string text;
  if (word_file == "-") {
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  } else {
    text = read_text_file(word_file);
  }
  auto words = parse_words(text, *built.recipe->alphabet());
  if (with_oracle && !built.oracle) throw ConstructionError("no exact oracle for " + c.group);
  auto machine = built.recipe->build(n, Rng(c.seed));
  bool ok = true;
  json results = json::array();
  std::ostringstream rows;
  rows << "word,accept,oracle,agree\n";
  for (const auto& w : words) {
    if (BigInt(w.size()) > n) throw OverflowError("word of length " + std::to_string(w.size()) + " exceeds n = " + n.str());
    machine->reset();
    auto r = decide_identity(*machine, w);
    json row = {{"word", built.recipe->alphabet()->format(w)}, {"accept", r.accept}};
    rows << '"' << built.recipe->alphabet()->format(w) << "\"," << csv_bool(r.accept);
    if (with_oracle) {
      bool truth = built.oracle->is_identity(w);
      row["oracle"] = truth;
      row["agree"] = truth == r.accept;
      ok = ok && truth == r.accept;
      rows << ',' << csv_bool(truth) << ',' << csv_bool(truth == r.accept);
    } else {
      rows << ",,";
    }
    rows << '\n';
    results.push_back(row);
  }
  Sink sink(c.output, out);
  if (c.csv) {
    *sink << rows.str();
  } else {
    json doc = {{"spec", c.group},
                {"recipe", built.recipe->describe()},
                {"n", n.str()},
                {"seed", c.seed},
                {"bits", machine->bits()},
                {"epsilon", machine->epsilon_bound()},
                {"results", results}};
    *sink << doc.dump(2) << '\n';
  }
  return ok ? kExitOk : kExitFail;
}

struct EstimateArgs {
  std::string kind = "unequal";
  std::uint64_t trials = 1000;
  bool decision = false;
  EstimateOptions opts;
};

int cmd_estimate(const Common& c, EstimateArgs e, std::ostream& out) {
  auto built = build_group(c.group, c.build);
  if (!built.oracle) throw ConstructionError("no exact oracle for " + c.group);
  const BigInt n = bound(c);
  e.opts.spec = c.group;
  ErrorReport r = e.decision ? estimate_decision_error(*built.recipe, *built.oracle, n, e.trials, c.seed, e.opts)
                             : estimate_error(*built.recipe, *built.oracle, parse_pair_kind(e.kind), n, e.trials, c.seed, e.opts);
  Sink sink(c.output, out);
  if (c.csv)
    *sink << ErrorReport::csv_header() << '\n' << r.to_csv_row() << '\n';
  else
    *sink << r.to_json().dump(2) << '\n';
  return r.pass ? kExitOk : kExitFail;
}

int cmd_growth(const Common& c, unsigned radius, std::ostream& out) {
  auto built = build_group(c.group, c.build);
  if (!built.oracle) throw ConstructionError("no exact oracle for " + c.group);
  auto table = compute_growth(*built.oracle, radius, c.build.ball_cap);
  Sink sink(c.output, out);
  if (c.csv) {
    *sink << table.to_csv();
  } else {
    json doc = {{"spec", c.group}, {"radius", radius}, {"gamma", table.gamma}};
    *sink << doc.dump(2) << '\n';
  }
  return kExitOk;
}

// Enumerates all words of length <= n and compares the DFA with the oracle.
std::uint64_t exhaustive_mismatches(const BallAutomaton& dfa, const ExactGroup& g, unsigned n, std::uint64_t& checked) {
  const auto letters = static_cast<std::uint32_t>(g.alphabet().letter_count());
  std::uint64_t mismatches = 0;
  checked = 0;
  Word w;
  std::vector<Element> prefix{g.identity()};
  std::vector<std::uint32_t> state{dfa.initial()};
  // Depth-first over words, sharing prefix evaluations.
  auto visit = [&](auto&& self) -> void {
    ++checked;
    bool truth = g.is_identity(prefix.back());
    bool accept = state.back() == dfa.initial();
    if (truth != accept) ++mismatches;
    if (w.size() == n) return;
    for (std::uint32_t code = 0; code < letters; ++code) {
      Letter a = Letter::from_code(code);
      w.push_back(a);
      prefix.push_back(g.mul(prefix.back(), g.letter(a)));
      state.push_back(dfa.next(state.back(), a));
      self(self);
      w.pop_back();
      prefix.pop_back();
      state.pop_back();
    }
  };
  visit(visit);
  return mismatches;
}

int cmd_ball(const Common& c, bool verify, std::ostream& out) {
  auto built = build_group(c.group, c.build);
  if (!built.oracle) throw ConstructionError("no exact oracle for " + c.group);
  const unsigned n = small_bound(c, 1u << 20);
  auto dfa = build_ball_automaton(*built.oracle, n, c.build.ball_cap);
  auto growth = compute_ball(*built.oracle, n / 2, c.build.ball_cap).growth;
  const std::uint64_t formula = ball_state_formula(growth, n);
  json doc = {{"spec", c.group},
              {"n", n},
              {"states", dfa.state_count()},
              {"bits", dfa.bits()},
              {"formula_states", formula},
              {"spurious_edges", dfa.spurious_edges()},
              {"sink", dfa.sink().has_value()}};
  bool ok = dfa.state_count() == formula;
  if (verify) {
    double words = 0;
    for (unsigned k = 0; k <= n; ++k) words += std::pow(static_cast<double>(built.oracle->alphabet().letter_count()), k);
    if (words > 2e7) throw ResourceError("exhaustive verification would visit " + std::to_string(words) + " words");
    std::uint64_t checked = 0;
    auto mism = exhaustive_mismatches(dfa, *built.oracle, n, checked);
    doc["verified_words"] = checked;
    doc["mismatches"] = mism;
    ok = ok && mism == 0;
  }
  Sink sink(c.output, out);
  if (c.csv) {
    *sink << "spec,n,states,bits,formula_states\n"
          << '"' << c.group << "\"," << n << ',' << dfa.state_count() << ',' << dfa.bits() << ',' << formula << '\n';
  } else {
    *sink << doc.dump(2) << '\n';
  }
  return ok ? kExitOk : kExitFail;
}

int cmd_hard(const Common& c, const std::string& type, const std::string& u_text, const std::string& v_text, unsigned degree,
             std::ostream& out) {
  Bits u = parse_bits(u_text), v = parse_bits(v_text);
  json doc;
  bool disjoint = u.size() == v.size();
  for (std::size_t i = 0; i < std::min(u.size(), v.size()); ++i) disjoint = disjoint && !(u[i] && v[i]);
  if (type == "disjointness") {
    std::vector<std::string> names;
    for (unsigned k = 0; k + 1 < degree; ++k) names.push_back("x" + std::to_string(k + 1));
    auto lamp = FiniteGroup::symmetric(degree, names);
    WreathGroup wr(lamp, std::make_shared<FreeAbelianGroup>(std::vector<std::string>{"t"}));
    auto [g, h] = noncommuting_lamps(wr);
    auto inst = disjointness_instance(u, v, wr, g, h);
    doc = {{"type", type},
           {"group", "S" + std::to_string(degree) + " wr Z"},
           {"word", wr.alphabet().format(inst.word)},
           {"length", inst.word.size()},
           {"identity", inst.identity},
           {"supports_disjoint", disjoint}};
  } else if (type == "grigorchuk") {
    GrigorchukGroup g;
    auto inst = grigorchuk_instance(u, v, g);
    doc = {{"type", type},
           {"tvw_word", tvw_alphabet()->format(inst.tvw)},
           {"tvw_length", inst.tvw.size()},
           {"word", g.alphabet().format(inst.expanded)},
           {"length", inst.expanded.size()},
           {"identity", inst.identity},
           {"supports_disjoint", disjoint}};
  } else {
    throw ConstructionError("--type must be disjointness or grigorchuk");
  }
  Sink sink(c.output, out);
  if (c.csv)
    *sink << "type,length,identity,supports_disjoint\n"
          << type << ',' << doc["length"] << ',' << csv_bool(doc["identity"]) << ',' << csv_bool(disjoint) << '\n';
  else
    *sink << doc.dump(2) << '\n';
  return kExitOk;
}

int cmd_bench(const Common& c, std::uint64_t letters, std::ostream& out) {
  auto built = build_group(c.group, c.build);
  const BigInt n = bound(c);
  if (letters == 0) letters = fits_u64(n) ? std::min<std::uint64_t>(static_cast<std::uint64_t>(n), 100000) : 100000;
  if (BigInt(letters) > n) throw ConstructionError("--letters exceeds n");
  Rng rng = Rng(c.seed).split("bench");
  Word w = random_word(*built.recipe->alphabet(), letters, rng);
  auto t0 = std::chrono::steady_clock::now();
  auto machine = built.recipe->build(n, Rng(c.seed));
  auto t1 = std::chrono::steady_clock::now();
  machine->feed(w);
  auto t2 = std::chrono::steady_clock::now();
  const double build_s = std::chrono::duration<double>(t1 - t0).count();
  const double run_s = std::chrono::duration<double>(t2 - t1).count();
  json doc = {{"spec", c.group},
              {"recipe", built.recipe->describe()},
              {"n", n.str()},
              {"bits", machine->bits()},
              {"letters", letters},
              {"build_seconds", build_s},
              {"run_seconds", run_s},
              {"letters_per_second", run_s > 0 ? static_cast<double>(letters) / run_s : 0.0}};
  Sink sink(c.output, out);
  if (c.csv)
    *sink << "spec,n,bits,letters,build_seconds,run_seconds\n"
          << '"' << c.group << "\"," << n.str() << ',' << machine->bits() << ',' << letters << ',' << build_s << ',' << run_s << '\n';
  else
    *sink << doc.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"wordstream: streaming word-problem machines and experiments"};
  app.require_subcommand(1);
  Common common;
  try {
    common.seed = default_seed();
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  auto* check = app.add_subcommand("check", "decide words read from a file (or - for stdin)");
  add_common(check, common);
  std::string word_file = "-";
  bool with_oracle = false;
  check->add_option("--word,-w", word_file, "word file, one word per line")->required();
  check->add_flag("--oracle", with_oracle, "compare with the exact oracle");

  auto* estimate = app.add_subcommand("estimate", "Monte-Carlo injectivity or decision error");
  add_common(estimate, common);
  EstimateArgs est;
  estimate->add_option("--kind", est.kind, "equal | unequal | adversarial-disjointness | adversarial-grigorchuk");
  estimate->add_option("--trials", est.trials, "number of trials (>= 100)");
  estimate->add_flag("--decision", est.decision, "measure decision error on single words");
  estimate->add_option("--pool", est.opts.pool, "distinct inputs");
  estimate->add_option("--per-seed", est.opts.inputs_per_seed, "inputs per sampled machine");
  estimate->add_option("--max-len", est.opts.max_len, "maximum input length (default n)");
  estimate->add_option("--threads", est.opts.threads, "worker threads (default: all cores)");
  estimate->add_option("--slack", est.opts.slack, "pass if the CI lower end is <= slack * bound");

  auto* growth = app.add_subcommand("growth", "growth function by breadth-first search");
  add_common(growth, common);
  unsigned radius = 8;
  growth->add_option("--radius,-r", radius, "largest radius")->required();

  auto* ball = app.add_subcommand("ball", "deterministic ball automaton for bound n");
  add_common(ball, common);
  bool verify = false;
  ball->add_flag("--verify", verify, "exhaustively compare with the oracle");

  auto* hard = app.add_subcommand("hard", "lower-bound instances");
  add_common(hard, common, false);
  std::string type = "disjointness", u_text, v_text;
  unsigned degree = 3;
  hard->add_option("--type", type, "disjointness | grigorchuk");
  hard->add_option("--u", u_text, "first bitstring")->required();
  hard->add_option("--v", v_text, "second bitstring")->required();
  hard->add_option("--degree", degree, "lamp group S_degree for disjointness")->check(CLI::Range(3u, 6u));

  auto* bench = app.add_subcommand("bench", "throughput and state size");
  add_common(bench, common);
  std::uint64_t letters = 0;
  bench->add_option("--letters", letters, "stream length (default min(n, 1e5))");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) err << sub->help();
    return kExitUsage;
  }

  try {
    if (check->parsed()) return cmd_check(common, word_file, with_oracle, in, out);
    if (estimate->parsed()) return cmd_estimate(common, est, out);
    if (growth->parsed()) return cmd_growth(common, radius, out);
    if (ball->parsed()) return cmd_ball(common, verify, out);
    if (hard->parsed()) return cmd_hard(common, type, u_text, v_text, degree, out);
    if (bench->parsed()) return cmd_bench(common, letters, out);
  } catch (const ParseError& e) {
    err << "group expression error at " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const AlphabetError& e) {
    err << "alphabet error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConstructionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ResourceError& e) {
    err << "resource error: " << e.what() << '\n';
    return kExitResource;
  } catch (const std::bad_alloc&) {
    err << "resource error: out of memory\n";
    return kExitResource;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitUsage;
}

}  // namespace wordstream
