#include "wordstream/formats.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "wordstream/errors.hpp"

namespace wordstream {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

std::string strip_comment(const std::string& line) {
  auto h = line.find('#');
  return h == std::string::npos ? line : line.substr(0, h);
}

bool blank(const std::string& line) { return tokens(line).empty(); }

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw FormatError("line " + std::to_string(line) + ": " + msg);
}

template <class F>
auto at_line(std::size_t line, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const FormatError& e) {
    fail(line, e.what());
  } catch (const AlphabetError& e) {
    fail(line, e.what());
  }
}

std::uint32_t parse_index(const std::string& tok, std::uint32_t k, std::size_t line) {
  try {
    BigInt v = parse_bigint(tok);
    if (v < 1 || v > k) fail(line, "coset index " + tok + " out of range [1, " + std::to_string(k) + "]");
    return static_cast<std::uint32_t>(v) - 1;
  } catch (const FormatError&) {
    fail(line, "bad coset index '" + tok + "'");
  }
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Word> parse_words(const std::string& text, const Alphabet& alphabet) {
  std::vector<Word> out;
  auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& l = lines[i];
    auto first = l.find_first_not_of(" \t");
    if (first != std::string::npos && l[first] == '#') continue;
    out.push_back(at_line(i + 1, [&] { return alphabet.parse_word(l); }));
  }
  return out;
}

MatrixGenerators parse_matrix_file(const std::string& text) {
  auto lines = split_lines(text);
  std::optional<unsigned> dim, vars;
  std::optional<std::uint64_t> characteristic;
  std::string denom_text = "1";
  std::size_t i = 0;
  // Header.
  for (; i < lines.size(); ++i) {
    std::string l = strip_comment(lines[i]);
    if (blank(l)) continue;
    auto tk = tokens(l);
    if (tk[0] == "gen" || tk[0] == "inv") break;
    std::string norm;
    for (char ch : l) norm += ch == ';' ? '\n' : ch;
    for (const auto& field : split_lines(norm)) {
      auto f = tokens(field);
      if (f.empty()) continue;
      if (f.size() != 2) fail(i + 1, "expected 'key value' in header, got '" + field + "'");
      auto num = [&](unsigned lo, unsigned hi) {
        try {
          BigInt v = parse_bigint(f[1]);
          if (v < lo || v > hi) fail(i + 1, f[0] + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
          return static_cast<unsigned>(v);
        } catch (const FormatError&) {
          fail(i + 1, "bad number '" + f[1] + "'");
        }
      };
      if (f[0] == "dim")
        dim = num(1, 64);
      else if (f[0] == "vars")
        vars = num(0, 64);
      else if (f[0] == "denom")
        denom_text = f[1];
      else if (f[0] == "char") {
        unsigned p = num(0, 1u << 30);
        if (p != 0) characteristic = p;
      } else
        fail(i + 1, "unknown header key '" + f[0] + "'");
    }
  }
  if (!dim) throw FormatError("matrix file: missing 'dim' in header");
  if (!vars) vars = 0;
  Poly t = at_line(1, [&] { return Poly::parse(denom_text, *vars); });

  std::vector<std::string> names;
  std::map<std::string, PolyMatrix> fwd, bwd;
  while (i < lines.size()) {
    std::string l = strip_comment(lines[i]);
    if (blank(l)) {
      ++i;
      continue;
    }
    auto tk = tokens(l);
    if ((tk[0] != "gen" && tk[0] != "inv") || tk.size() != 2) fail(i + 1, "expected 'gen NAME' or 'inv NAME'");
    const bool is_inv = tk[0] == "inv";
    const std::string name = tk[1];
    const std::size_t head = i + 1;
    ++i;
    PolyMatrix m(*dim, *dim);
    unsigned row = 0;
    while (row < *dim) {
      if (i >= lines.size()) fail(head, "block '" + name + "' needs " + std::to_string(*dim) + " rows");
      std::string rl = strip_comment(lines[i]);
      if (blank(rl)) {
        ++i;
        continue;
      }
      auto entries = tokens(rl);
      if (entries.size() != *dim) fail(i + 1, "row needs " + std::to_string(*dim) + " entries, got " + std::to_string(entries.size()));
      for (unsigned c = 0; c < *dim; ++c) m(row, c) = at_line(i + 1, [&] { return Poly::parse(entries[c], *vars); });
      ++row;
      ++i;
    }
    if (is_inv) {
      if (bwd.count(name)) fail(head, "duplicate inverse block for '" + name + "'");
      bwd[name] = m;
    } else {
      if (fwd.count(name)) fail(head, "duplicate generator '" + name + "'");
      fwd[name] = m;
      names.push_back(name);
    }
  }
  if (names.empty()) throw FormatError("matrix file: no generators");
  for (const auto& [n, _] : bwd)
    if (!fwd.count(n)) throw FormatError("matrix file: inverse block for unknown generator '" + n + "'");
  std::vector<PolyMatrix> forward;
  std::vector<std::optional<PolyMatrix>> backward;
  for (const auto& n : names) {
    forward.push_back(fwd[n]);
    auto it = bwd.find(n);
    backward.push_back(it == bwd.end() ? std::nullopt : std::optional<PolyMatrix>(it->second));
  }
  try {
    return MatrixGenerators::from_scaled(names, *dim, *vars, t, std::move(forward), std::move(backward), characteristic);
  } catch (const ConstructionError& e) {
    throw FormatError(std::string("matrix file: ") + e.what());
  }
}

std::shared_ptr<FiniteGroup> parse_finite_table(const std::string& text) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto tk = tokens(strip_comment(lines[i]));
    if (!tk.empty()) rows.emplace_back(i + 1, std::move(tk));
  }
  if (rows.empty()) throw FormatError("finite table: empty file");
  const auto names = rows[0].second;
  const std::size_t n = names.size();
  std::map<std::string, std::uint32_t> index;
  for (std::uint32_t k = 0; k < n; ++k)
    if (!index.emplace(names[k], k).second) fail(rows[0].first, "duplicate element name '" + names[k] + "'");
  auto lookup = [&](const std::string& tok, std::size_t line) {
    auto it = index.find(tok);
    if (it == index.end()) fail(line, "unknown element '" + tok + "'");
    return it->second;
  };
  if (rows.size() < n + 1) throw FormatError("finite table: expected " + std::to_string(n) + " table rows");
  std::vector<std::vector<std::uint32_t>> table;
  for (std::size_t r = 1; r <= n; ++r) {
    const auto& [line, tk] = rows[r];
    if (tk.size() != n) fail(line, "table row needs " + std::to_string(n) + " entries");
    std::vector<std::uint32_t> row;
    for (const auto& t : tk) row.push_back(lookup(t, line));
    table.push_back(std::move(row));
  }
  std::optional<std::vector<std::uint32_t>> gens;
  if (rows.size() > n + 1) {
    const auto& [line, tk] = rows[n + 1];
    if (tk[0] != "gens" || tk.size() < 2) fail(line, "expected 'gens NAME...'");
    gens.emplace();
    for (std::size_t k = 1; k < tk.size(); ++k) gens->push_back(lookup(tk[k], line));
    if (rows.size() > n + 2) fail(rows[n + 2].first, "unexpected content after 'gens'");
  }
  try {
    return std::make_shared<FiniteGroup>(names, std::move(table), std::move(gens));
  } catch (const ConstructionError& e) {
    throw FormatError(std::string("finite table: ") + e.what());
  }
}

ExtensionFile parse_extension_file(const std::string& text, AlphabetPtr base_alphabet) {
  ExtensionFile out;
  auto& d = out.data;
  d.base_alphabet = base_alphabet;
  const auto lines = split_lines(text);
  std::size_t i = 0;
  for (; i < lines.size(); ++i) {
    auto tk = tokens(strip_comment(lines[i]));
    if (tk.empty()) continue;
    if (tk[0] != "cosets") fail(i + 1, "expected 'cosets NAME...' first");
    d.coset_names.assign(tk.begin() + 1, tk.end());
    ++i;
    break;
  }
  const std::uint32_t k = d.cosets();
  const std::size_t letters = base_alphabet->size();
  std::vector<std::vector<std::optional<Word>>> conj(letters, std::vector<std::optional<Word>>(k));
  std::vector<std::vector<std::optional<std::uint32_t>>> alpha(k, std::vector<std::optional<std::uint32_t>>(k));
  std::vector<std::vector<std::optional<Word>>> mult(k, std::vector<std::optional<Word>>(k));
  for (std::uint32_t a = 0; a < letters; ++a) conj[a][0] = Word{Letter{a, false}};
  for (std::uint32_t j = 0; j < k; ++j) {
    alpha[0][j] = j;
    alpha[j][0] = j;
    mult[0][j] = Word{};
    mult[j][0] = Word{};
  }
  auto word_after_colon = [&](const std::string& line, std::size_t ln) {
    auto c = line.find(':');
    if (c == std::string::npos) fail(ln, "expected ':' before the word");
    return at_line(ln, [&] { return base_alphabet->parse_word(line.substr(c + 1)); });
  };
  for (; i < lines.size(); ++i) {
    const std::string l = strip_comment(lines[i]);
    auto tk = tokens(l);
    if (tk.empty()) continue;
    const std::size_t ln = i + 1;
    if (tk[0] == "conj") {
      if (tk.size() < 4 || tk[3] != ":") fail(ln, "expected 'conj LETTER i : WORD'");
      auto gen = base_alphabet->find(tk[1]);
      if (!gen) fail(ln, "unknown base letter '" + tk[1] + "'");
      conj[*gen][parse_index(tk[2], k, ln)] = word_after_colon(l, ln);
    } else if (tk[0] == "alpha") {
      if (tk.size() != 5 || tk[3] != "=") fail(ln, "expected 'alpha i j = l'");
      alpha[parse_index(tk[1], k, ln)][parse_index(tk[2], k, ln)] = parse_index(tk[4], k, ln);
    } else if (tk[0] == "mult") {
      if (tk.size() < 4 || tk[3] != ":") fail(ln, "expected 'mult i j : WORD'");
      mult[parse_index(tk[1], k, ln)][parse_index(tk[2], k, ln)] = word_after_colon(l, ln);
    } else if (tk[0] == "oracle") {
      if (tk.size() != 2) fail(ln, "expected 'oracle FILE'");
      out.oracle_matrix_file = tk[1];
    } else {
      fail(ln, "unknown directive '" + tk[0] + "'");
    }
  }
  d.conj.assign(letters, std::vector<Word>(k));
  d.alpha.assign(k, std::vector<std::uint32_t>(k));
  d.mult.assign(k, std::vector<Word>(k));
  for (std::uint32_t a = 0; a < letters; ++a)
    for (std::uint32_t j = 0; j < k; ++j) {
      if (!conj[a][j]) throw FormatError("extension file: missing 'conj " + base_alphabet->name(a) + " " + std::to_string(j + 1) + "'");
      d.conj[a][j] = *conj[a][j];
    }
  for (std::uint32_t x = 0; x < k; ++x)
    for (std::uint32_t y = 0; y < k; ++y) {
      if (!alpha[x][y]) throw FormatError("extension file: missing 'alpha " + std::to_string(x + 1) + " " + std::to_string(y + 1) + "'");
      if (!mult[x][y]) throw FormatError("extension file: missing 'mult " + std::to_string(x + 1) + " " + std::to_string(y + 1) + "'");
      d.alpha[x][y] = *alpha[x][y];
      d.mult[x][y] = *mult[x][y];
    }
  try {
    d.validate();
  } catch (const ConstructionError& e) {
    throw FormatError(std::string("extension file: ") + e.what());
  }
  return out;
}

GeneratorMap parse_generator_map(const std::string& text, const Alphabet& base) {
  std::vector<std::string> names;
  std::vector<Word> images;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string l = strip_comment(lines[i]);
    if (blank(l)) continue;
    auto eq = l.find('=');
    if (eq == std::string::npos) fail(i + 1, "expected 'NAME = WORD'");
    auto lhs = tokens(l.substr(0, eq));
    if (lhs.size() != 1) fail(i + 1, "expected a single generator name before '='");
    names.push_back(lhs[0]);
    images.push_back(at_line(i + 1, [&] { return base.parse_word(l.substr(eq + 1)); }));
  }
  if (names.empty()) throw FormatError("generator map: no generators");
  GeneratorMap m;
  try {
    m.alphabet = std::make_shared<Alphabet>(names);
  } catch (const Error& e) {
    throw FormatError(std::string("generator map: ") + e.what());
  }
  m.images = std::move(images);
  return m;
}

}  // namespace wordstream
