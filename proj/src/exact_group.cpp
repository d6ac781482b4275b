#include "wordstream/exact_group.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>

#include "wordstream/rng.hpp"

namespace wordstream {

void append_field(std::string& out, const std::string& field) {
  append_u32(out, static_cast<std::uint32_t>(field.size()));
  out += field;
}

void append_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}

void append_i64(std::string& out, std::int64_t v) {
  auto u = static_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out += static_cast<char>((u >> (8 * i)) & 0xff);
}

std::vector<std::string> default_names(std::size_t count) {
  std::vector<std::string> out;
  if (count <= 26) {
    for (std::size_t i = 0; i < count; ++i) out.emplace_back(1, static_cast<char>('a' + i));
  } else {
    for (std::size_t i = 0; i < count; ++i) out.push_back("a" + std::to_string(i + 1));
  }
  return out;
}

// ---- ExactGroup ----

bool ExactGroup::is_identity(const Element& x) const { return key(x) == key(identity()); }

std::string ExactGroup::format(const Element& x) const {
  if (auto w = word_of(x)) return w->empty() ? std::string("1") : alphabet().format(*w);
  static const char* hex = "0123456789abcdef";
  std::string out = "#";
  for (unsigned char ch : key(x)) {
    out += hex[ch >> 4];
    out += hex[ch & 15];
  }
  return out;
}

std::optional<Word> ExactGroup::word_of(const Element&) const { return std::nullopt; }

const Element& ExactGroup::letter(Letter a) const {
  alphabet().check(a);
  std::call_once(letters_once_, [this] {
    letters_.resize(alphabet().letter_count());
    for (std::uint32_t g = 0; g < alphabet().size(); ++g) {
      letters_[2 * g] = generator(g);
      letters_[2 * g + 1] = inv(letters_[2 * g]);
    }
  });
  return letters_[a.code()];
}

Element ExactGroup::evaluate(const Word& w) const {
  alphabet().check(w);
  Element x = identity();
  for (Letter a : w) x = mul(x, letter(a));
  return x;
}

// ---- FreeGroup ----

FreeGroup::FreeGroup(unsigned rank) : FreeGroup(default_names(rank)) {}

FreeGroup::FreeGroup(std::vector<std::string> names)
    : ExactGroup(std::make_shared<Alphabet>(std::move(names))) {}

std::string FreeGroup::kind() const { return "free(" + std::to_string(alphabet().size()) + ")"; }

Element FreeGroup::identity() const { return box(Word{}); }

Element FreeGroup::generator(std::uint32_t gen) const { return box(Word{Letter{gen, false}}); }

Element FreeGroup::mul(const Element& x, const Element& y) const {
  const Word& a = unbox<Word>(x);
  const Word& b = unbox<Word>(y);
  std::size_t i = 0;
  while (i < a.size() && i < b.size() && a[a.size() - 1 - i] == b[i].inverse()) ++i;
  Word r(a.begin(), a.end() - static_cast<std::ptrdiff_t>(i));
  r.insert(r.end(), b.begin() + static_cast<std::ptrdiff_t>(i), b.end());
  return box(std::move(r));
}

Element FreeGroup::inv(const Element& x) const { return box(inverse(unbox<Word>(x))); }

CanonicalKey FreeGroup::key(const Element& x) const {
  std::string k;
  for (Letter a : unbox<Word>(x)) append_u32(k, a.code());
  return k;
}

std::string FreeGroup::format(const Element& x) const {
  const Word& w = unbox<Word>(x);
  return w.empty() ? "1" : alphabet().format(w);
}

std::optional<Word> FreeGroup::word_of(const Element& x) const { return unbox<Word>(x); }

// ---- FreeAbelianGroup ----

FreeAbelianGroup::FreeAbelianGroup(unsigned rank)
    : FreeAbelianGroup([rank] {
        if (rank == 1) return std::vector<std::string>{"a"};
        std::vector<std::string> n;
        for (unsigned i = 1; i <= rank; ++i) n.push_back("a" + std::to_string(i));
        return n;
      }()) {}

FreeAbelianGroup::FreeAbelianGroup(std::vector<std::string> names)
    : ExactGroup(std::make_shared<Alphabet>(std::move(names))) {}

std::string FreeAbelianGroup::kind() const {
  return alphabet().size() == 1 ? "Z" : "Z^" + std::to_string(alphabet().size());
}

Element FreeAbelianGroup::make(std::vector<std::int64_t> v) const {
  if (v.size() != alphabet().size()) throw Error("FreeAbelianGroup: wrong vector length");
  return box(std::move(v));
}

Element FreeAbelianGroup::identity() const { return box(std::vector<std::int64_t>(alphabet().size(), 0)); }

Element FreeAbelianGroup::generator(std::uint32_t gen) const {
  std::vector<std::int64_t> v(alphabet().size(), 0);
  v[gen] = 1;
  return box(std::move(v));
}

Element FreeAbelianGroup::mul(const Element& x, const Element& y) const {
  auto r = vec(x);
  const auto& b = vec(y);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return box(std::move(r));
}

Element FreeAbelianGroup::inv(const Element& x) const {
  auto r = vec(x);
  for (auto& v : r) v = -v;
  return box(std::move(r));
}

CanonicalKey FreeAbelianGroup::key(const Element& x) const {
  std::string k;
  for (auto v : vec(x)) append_i64(k, v);
  return k;
}

std::string FreeAbelianGroup::format(const Element& x) const {
  std::ostringstream out;
  out << '(';
  const auto& v = vec(x);
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  out << ')';
  return out.str();
}

std::optional<Word> FreeAbelianGroup::word_of(const Element& x) const {
  Word w;
  const auto& v = vec(x);
  for (std::uint32_t i = 0; i < v.size(); ++i) {
    Letter a{i, v[i] < 0};
    for (std::int64_t k = 0; k < std::abs(v[i]); ++k) w.push_back(a);
  }
  return w;
}

std::vector<Word> FreeAbelianGroup::relators() const {
  std::vector<Word> out;
  for (std::uint32_t i = 0; i < alphabet().size(); ++i)
    for (std::uint32_t j = i + 1; j < alphabet().size(); ++j)
      out.push_back({{i, false}, {j, false}, {i, true}, {j, true}});
  return out;
}

// ---- CyclicGroup ----

CyclicGroup::CyclicGroup(std::uint64_t modulus, std::string name)
    : ExactGroup(std::make_shared<Alphabet>(std::vector<std::string>{std::move(name)})), modulus_(modulus) {
  if (modulus < 1) throw ConstructionError("Zmod: modulus must be positive");
}

std::string CyclicGroup::kind() const { return "Zmod(" + std::to_string(modulus_) + ")"; }

Element CyclicGroup::identity() const { return box(std::uint64_t{0}); }

Element CyclicGroup::generator(std::uint32_t) const { return box(std::uint64_t{1 % modulus_}); }

Element CyclicGroup::mul(const Element& x, const Element& y) const {
  return box(static_cast<std::uint64_t>((static_cast<unsigned __int128>(residue(x)) + residue(y)) % modulus_));
}

Element CyclicGroup::inv(const Element& x) const {
  std::uint64_t r = residue(x);
  return box(r == 0 ? std::uint64_t{0} : modulus_ - r);
}

CanonicalKey CyclicGroup::key(const Element& x) const {
  std::string k;
  append_i64(k, static_cast<std::int64_t>(residue(x)));
  return k;
}

std::string CyclicGroup::format(const Element& x) const { return std::to_string(residue(x)); }

std::optional<Word> CyclicGroup::word_of(const Element& x) const {
  std::uint64_t r = residue(x);
  if (r <= modulus_ / 2) return Word(r, Letter{0, false});
  return Word(modulus_ - r, Letter{0, true});
}

std::vector<Word> CyclicGroup::relators() const {
  if (modulus_ > 64) return {};
  return {Word(modulus_, Letter{0, false})};
}

// ---- FiniteGroup ----

FiniteGroup::FiniteGroup(std::vector<std::string> element_names, std::vector<std::vector<std::uint32_t>> table,
                         std::optional<std::vector<std::uint32_t>> generators)
    : ExactGroup([&] {
        std::vector<std::uint32_t> gens;
        if (generators) {
          gens = *generators;
        } else {
          for (std::uint32_t i = 1; i < element_names.size(); ++i) gens.push_back(i);
        }
        std::vector<std::string> names;
        for (auto g : gens) {
          if (g >= element_names.size()) throw ConstructionError("finite group: generator index out of range");
          names.push_back(element_names[g]);
        }
        return std::make_shared<Alphabet>(std::move(names));
      }()),
      element_names_(std::move(element_names)),
      table_(std::move(table)) {
  const std::size_t n = table_.size();
  if (n == 0) throw ConstructionError("finite group: empty table");
  if (element_names_.size() != n) throw ConstructionError("finite group: names and table size differ");
  for (std::size_t i = 0; i < n; ++i) {
    if (table_[i].size() != n) throw ConstructionError("finite group: table row " + std::to_string(i) + " has wrong length");
    std::vector<bool> seen(n, false);
    for (std::size_t j = 0; j < n; ++j) {
      auto v = table_[i][j];
      if (v >= n) throw ConstructionError("finite group: table entry out of range");
      if (seen[v]) throw ConstructionError("finite group: row " + std::to_string(i) + " repeats an element");
      seen[v] = true;
    }
    if (table_[0][i] != i || table_[i][0] != i) throw ConstructionError("finite group: first element is not the identity");
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<bool> seen(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      if (seen[table_[i][j]]) throw ConstructionError("finite group: column " + std::to_string(j) + " repeats an element");
      seen[table_[i][j]] = true;
    }
  }
  auto assoc = [&](std::size_t a, std::size_t b, std::size_t c) {
    return table_[table_[a][b]][c] == table_[a][table_[b][c]];
  };
  if (n <= 128) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c)
          if (!assoc(a, b, c)) throw ConstructionError("finite group: table is not associative");
  } else {
    Rng rng(0x5eed);
    for (int t = 0; t < 1000000; ++t)
      if (!assoc(rng.below(n), rng.below(n), rng.below(n))) throw ConstructionError("finite group: table is not associative");
  }
  inverse_.assign(n, 0);
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < n; ++j)
      if (table_[i][j] == 0) inverse_[i] = j;
  // Generator indices in alphabet order.
  for (const auto& name : alphabet().names())
    generators_.push_back(static_cast<std::uint32_t>(
        std::find(element_names_.begin(), element_names_.end(), name) - element_names_.begin()));
  // Shortest words by BFS.
  words_.assign(n, Word{});
  std::vector<bool> seen(n, false);
  seen[0] = true;
  std::deque<std::uint32_t> queue{0};
  while (!queue.empty()) {
    auto x = queue.front();
    queue.pop_front();
    for (Letter a : alphabet().letters()) {
      std::uint32_t g = generators_[a.gen];
      std::uint32_t y = table_[x][a.inverted ? inverse_[g] : g];
      if (!seen[y]) {
        seen[y] = true;
        words_[y] = words_[x];
        words_[y].push_back(a);
        queue.push_back(y);
      }
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw ConstructionError("finite group: generators do not generate the group");
}

std::shared_ptr<FiniteGroup> FiniteGroup::symmetric(unsigned degree, std::optional<std::vector<std::string>> gen_names) {
  if (degree < 1 || degree > 6) throw ConstructionError("symmetric group degree must be in [1, 6]");
  std::vector<std::vector<unsigned>> perms;
  std::vector<unsigned> p(degree);
  std::iota(p.begin(), p.end(), 0u);
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  std::map<std::vector<unsigned>, std::uint32_t> index;
  for (std::uint32_t i = 0; i < perms.size(); ++i) index[perms[i]] = i;
  std::vector<std::string> names;
  for (std::uint32_t i = 0; i < perms.size(); ++i) {
    std::string s = "p";
    for (auto v : perms[i]) s += std::to_string(v);
    names.push_back(i == 0 ? "e" : s);
  }
  std::vector<std::vector<std::uint32_t>> table(perms.size(), std::vector<std::uint32_t>(perms.size()));
  for (std::uint32_t i = 0; i < perms.size(); ++i)
    for (std::uint32_t j = 0; j < perms.size(); ++j) {
      // Apply perms[i] first, then perms[j].
      std::vector<unsigned> c(degree);
      for (unsigned k = 0; k < degree; ++k) c[k] = perms[j][perms[i][k]];
      table[i][j] = index[c];
    }
  std::vector<std::uint32_t> gens;
  for (unsigned k = 0; k + 1 < degree; ++k) {
    std::vector<unsigned> t(degree);
    std::iota(t.begin(), t.end(), 0u);
    std::swap(t[k], t[k + 1]);
    gens.push_back(index[t]);
  }
  if (gen_names) {
    if (gen_names->size() != gens.size()) throw ConstructionError("symmetric: wrong number of generator names");
    for (std::size_t k = 0; k < gens.size(); ++k) names[gens[k]] = (*gen_names)[k];
  }
  if (gens.empty()) gens.push_back(0);
  return std::make_shared<FiniteGroup>(std::move(names), std::move(table), gens);
}

std::shared_ptr<FiniteGroup> FiniteGroup::cyclic(std::uint32_t m) {
  if (m < 1) throw ConstructionError("cyclic: order must be positive");
  std::vector<std::string> names;
  std::vector<std::vector<std::uint32_t>> table(m, std::vector<std::uint32_t>(m));
  for (std::uint32_t i = 0; i < m; ++i) {
    names.push_back(i == 0 ? "e" : "g" + std::to_string(i));
    for (std::uint32_t j = 0; j < m; ++j) table[i][j] = (i + j) % m;
  }
  std::vector<std::uint32_t> gens{m > 1 ? 1u : 0u};
  return std::make_shared<FiniteGroup>(std::move(names), std::move(table), gens);
}

std::string FiniteGroup::kind() const { return "finite(" + std::to_string(table_.size()) + ")"; }

Element FiniteGroup::identity() const { return box(std::uint32_t{0}); }

Element FiniteGroup::element(std::uint32_t i) const {
  if (i >= table_.size()) throw Error("finite group: element index out of range");
  return box(i);
}

Element FiniteGroup::generator(std::uint32_t gen) const { return box(generators_[gen]); }

Element FiniteGroup::mul(const Element& x, const Element& y) const { return box(table_[index(x)][index(y)]); }

Element FiniteGroup::inv(const Element& x) const { return box(inverse_[index(x)]); }

CanonicalKey FiniteGroup::key(const Element& x) const {
  std::string k;
  append_u32(k, index(x));
  return k;
}

std::string FiniteGroup::format(const Element& x) const { return element_names_[index(x)]; }

std::optional<Word> FiniteGroup::word_of(const Element& x) const { return words_[index(x)]; }

std::vector<Word> FiniteGroup::relators() const {
  std::vector<Word> out;
  for (std::uint32_t a = 0; a < alphabet().size() && out.size() < 64; ++a)
    for (std::uint32_t b = 0; b < alphabet().size() && out.size() < 64; ++b) {
      std::uint32_t ab = table_[generators_[a]][generators_[b]];
      Word w{{a, false}, {b, false}};
      Word r = free_reduce(concat(w, inverse(words_[ab])));
      if (!r.empty()) out.push_back(r);
    }
  return out;
}

// ---- DirectProductGroup ----

DirectProductGroup::DirectProductGroup(GroupPtr left, GroupPtr right)
    : ExactGroup(combine_alphabets({left->alphabet_ptr(), right->alphabet_ptr()}).alphabet),
      left_(std::move(left)),
      right_(std::move(right)),
      layout_(combine_alphabets({left_->alphabet_ptr(), right_->alphabet_ptr()})) {}

std::string DirectProductGroup::kind() const { return "dp(" + left_->kind() + "," + right_->kind() + ")"; }

Element DirectProductGroup::identity() const { return box(Pair{left_->identity(), right_->identity()}); }

Element DirectProductGroup::generator(std::uint32_t gen) const {
  std::size_t part = layout_.part_of(gen);
  Letter a = layout_.to_part({gen, false}, part);
  if (part == 0) return box(Pair{left_->letter(a), right_->identity()});
  return box(Pair{left_->identity(), right_->letter(a)});
}

Element DirectProductGroup::mul(const Element& x, const Element& y) const {
  const auto& a = unbox<Pair>(x);
  const auto& b = unbox<Pair>(y);
  return box(Pair{left_->mul(a.first, b.first), right_->mul(a.second, b.second)});
}

Element DirectProductGroup::inv(const Element& x) const {
  const auto& a = unbox<Pair>(x);
  return box(Pair{left_->inv(a.first), right_->inv(a.second)});
}

CanonicalKey DirectProductGroup::key(const Element& x) const {
  const auto& a = unbox<Pair>(x);
  std::string k;
  append_field(k, left_->key(a.first));
  append_field(k, right_->key(a.second));
  return k;
}

bool DirectProductGroup::is_identity(const Element& x) const {
  const auto& a = unbox<Pair>(x);
  return left_->is_identity(a.first) && right_->is_identity(a.second);
}

std::string DirectProductGroup::format(const Element& x) const {
  const auto& a = unbox<Pair>(x);
  return "(" + left_->format(a.first) + ", " + right_->format(a.second) + ")";
}

std::optional<Word> DirectProductGroup::word_of(const Element& x) const {
  const auto& a = unbox<Pair>(x);
  auto u = left_->word_of(a.first);
  auto v = right_->word_of(a.second);
  if (!u || !v) return std::nullopt;
  Word w;
  for (Letter l : *u) w.push_back(layout_.from_part(l, 0));
  for (Letter l : *v) w.push_back(layout_.from_part(l, 1));
  return w;
}

std::optional<std::uint64_t> DirectProductGroup::order() const {
  auto a = left_->order();
  auto b = right_->order();
  if (!a || !b) return std::nullopt;
  unsigned __int128 p = static_cast<unsigned __int128>(*a) * *b;
  if (p >> 63) return std::nullopt;
  return static_cast<std::uint64_t>(p);
}

std::vector<Word> DirectProductGroup::relators() const {
  std::vector<Word> out;
  for (std::size_t part = 0; part < 2; ++part)
    for (const Word& r : factor(part)->relators()) {
      Word w;
      for (Letter l : r) w.push_back(layout_.from_part(l, part));
      out.push_back(w);
    }
  for (std::uint32_t a = 0; a < left_->alphabet().size(); ++a)
    for (std::uint32_t b = 0; b < right_->alphabet().size(); ++b) {
      Letter x = layout_.from_part({a, false}, 0);
      Letter y = layout_.from_part({b, false}, 1);
      out.push_back({x, y, x.inverse(), y.inverse()});
    }
  return out;
}

// ---- FreeProductGroup ----

FreeProductGroup::FreeProductGroup(GroupPtr left, GroupPtr right)
    : ExactGroup(combine_alphabets({left->alphabet_ptr(), right->alphabet_ptr()}).alphabet),
      left_(std::move(left)),
      right_(std::move(right)),
      layout_(combine_alphabets({left_->alphabet_ptr(), right_->alphabet_ptr()})) {}

std::string FreeProductGroup::kind() const { return "fp(" + left_->kind() + "," + right_->kind() + ")"; }

Element FreeProductGroup::identity() const { return box(std::vector<Syllable>{}); }

Element FreeProductGroup::generator(std::uint32_t gen) const {
  std::size_t part = layout_.part_of(gen);
  const auto& g = factor(part);
  Element v = g->letter(layout_.to_part({gen, false}, part));
  if (g->is_identity(v)) return identity();
  return box(std::vector<Syllable>{{static_cast<std::uint8_t>(part), v}});
}

Element FreeProductGroup::mul(const Element& x, const Element& y) const {
  std::vector<Syllable> out = syllables(x);
  for (const auto& s : syllables(y)) {
    if (!out.empty() && out.back().factor == s.factor) {
      const auto& g = factor(s.factor);
      Element v = g->mul(out.back().value, s.value);
      if (g->is_identity(v))
        out.pop_back();
      else
        out.back().value = v;
    } else {
      out.push_back(s);
    }
  }
  return box(std::move(out));
}

Element FreeProductGroup::inv(const Element& x) const {
  const auto& s = syllables(x);
  std::vector<Syllable> out;
  out.reserve(s.size());
  for (auto it = s.rbegin(); it != s.rend(); ++it) out.push_back({it->factor, factor(it->factor)->inv(it->value)});
  return box(std::move(out));
}

CanonicalKey FreeProductGroup::key(const Element& x) const {
  std::string k;
  for (const auto& s : syllables(x)) {
    k += static_cast<char>(s.factor);
    append_field(k, factor(s.factor)->key(s.value));
  }
  return k;
}

std::string FreeProductGroup::format(const Element& x) const {
  const auto& s = syllables(x);
  if (s.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += " * ";
    out += "[" + factor(s[i].factor)->format(s[i].value) + "]";
  }
  return out;
}

std::optional<Word> FreeProductGroup::word_of(const Element& x) const {
  Word w;
  for (const auto& s : syllables(x)) {
    auto u = factor(s.factor)->word_of(s.value);
    if (!u) return std::nullopt;
    for (Letter l : *u) w.push_back(layout_.from_part(l, s.factor));
  }
  return w;
}

std::vector<Word> FreeProductGroup::relators() const {
  std::vector<Word> out;
  for (std::size_t part = 0; part < 2; ++part)
    for (const Word& r : factor(part)->relators()) {
      Word w;
      for (Letter l : r) w.push_back(layout_.from_part(l, part));
      out.push_back(w);
    }
  return out;
}

// ---- WreathGroup ----

WreathGroup::WreathGroup(GroupPtr lamp, GroupPtr top)
    : ExactGroup(combine_alphabets({lamp->alphabet_ptr(), top->alphabet_ptr()}).alphabet),
      lamp_(std::move(lamp)),
      top_(std::move(top)),
      layout_(combine_alphabets({lamp_->alphabet_ptr(), top_->alphabet_ptr()})) {}

std::string WreathGroup::kind() const { return "wr(" + lamp_->kind() + "," + top_->kind() + ")"; }

Element WreathGroup::identity() const { return box(Value{{}, top_->identity()}); }

Element WreathGroup::generator(std::uint32_t gen) const {
  std::size_t part = layout_.part_of(gen);
  Letter a = layout_.to_part({gen, false}, part);
  Value v;
  v.cursor = top_->identity();
  if (part == 0) {
    Element h = lamp_->letter(a);
    if (!lamp_->is_identity(h)) v.support.emplace(top_->key(v.cursor), std::make_pair(v.cursor, h));
  } else {
    v.cursor = top_->letter(a);
  }
  return box(std::move(v));
}

Element WreathGroup::mul(const Element& x, const Element& y) const {
  const Value& a = value(x);
  const Value& b = value(y);
  Value out;
  out.support = a.support;
  bool cursor_trivial = top_->is_identity(a.cursor);
  for (const auto& [bkey, entry] : b.support) {
    Element pos = cursor_trivial ? entry.first : top_->mul(a.cursor, entry.first);
    CanonicalKey k = cursor_trivial ? bkey : top_->key(pos);
    auto it = out.support.find(k);
    if (it == out.support.end()) {
      out.support.emplace(std::move(k), std::make_pair(pos, entry.second));
    } else {
      Element h = lamp_->mul(it->second.second, entry.second);
      if (lamp_->is_identity(h))
        out.support.erase(it);
      else
        it->second.second = h;
    }
  }
  out.cursor = top_->mul(a.cursor, b.cursor);
  return box(std::move(out));
}

Element WreathGroup::inv(const Element& x) const {
  const Value& a = value(x);
  Value out;
  out.cursor = top_->inv(a.cursor);
  for (const auto& [k, entry] : a.support) {
    Element pos = top_->mul(out.cursor, entry.first);
    out.support.emplace(top_->key(pos), std::make_pair(pos, lamp_->inv(entry.second)));
  }
  return box(std::move(out));
}

CanonicalKey WreathGroup::key(const Element& x) const {
  const Value& a = value(x);
  std::string k;
  append_field(k, top_->key(a.cursor));
  append_u32(k, static_cast<std::uint32_t>(a.support.size()));
  for (const auto& [pk, entry] : a.support) {
    append_field(k, pk);
    append_field(k, lamp_->key(entry.second));
  }
  return k;
}

bool WreathGroup::is_identity(const Element& x) const {
  const Value& a = value(x);
  return a.support.empty() && top_->is_identity(a.cursor);
}

std::string WreathGroup::format(const Element& x) const {
  const Value& a = value(x);
  std::string out = "{";
  bool first = true;
  for (const auto& [k, entry] : a.support) {
    if (!first) out += ", ";
    first = false;
    out += top_->format(entry.first) + " -> " + lamp_->format(entry.second);
  }
  out += "; cursor " + top_->format(a.cursor) + "}";
  return out;
}

std::optional<Word> WreathGroup::word_of(const Element& x) const {
  const Value& a = value(x);
  Word w;
  auto lift = [&](const Word& u, std::size_t part) {
    Word r;
    for (Letter l : u) r.push_back(layout_.from_part(l, part));
    return r;
  };
  for (const auto& [k, entry] : a.support) {
    auto g = top_->word_of(entry.first);
    auto h = lamp_->word_of(entry.second);
    if (!g || !h) return std::nullopt;
    Word gw = lift(*g, 1);
    w = concat(w, gw);
    w = concat(w, lift(*h, 0));
    w = concat(w, inverse(gw));
  }
  auto c = top_->word_of(a.cursor);
  if (!c) return std::nullopt;
  return free_reduce(concat(w, lift(*c, 1)));
}

std::optional<std::uint64_t> WreathGroup::order() const {
  auto h = lamp_->order();
  auto g = top_->order();
  if (!h || !g) return std::nullopt;
  unsigned __int128 total = *g;
  for (std::uint64_t i = 0; i < *g; ++i) {
    total *= *h;
    if (total >> 63) return std::nullopt;
  }
  return static_cast<std::uint64_t>(total);
}

std::vector<Word> WreathGroup::relators() const {
  std::vector<Word> out;
  for (std::size_t part = 0; part < 2; ++part)
    for (const Word& r : (part == 0 ? lamp_ : top_)->relators()) {
      Word w;
      for (Letter l : r) w.push_back(layout_.from_part(l, part));
      out.push_back(w);
    }
  for (std::uint32_t g = 0; g < top_->alphabet().size(); ++g) {
    if (top_->is_identity(top_->letter({g, false}))) continue;
    Letter t = layout_.from_part({g, false}, 1);
    for (std::uint32_t a = 0; a < lamp_->alphabet().size(); ++a)
      for (std::uint32_t b = 0; b < lamp_->alphabet().size(); ++b) {
        Letter x = layout_.from_part({a, false}, 0);
        Letter y = layout_.from_part({b, false}, 0);
        // [x, t y t^-1]
        out.push_back({x, t, y, t.inverse(), x.inverse(), t, y.inverse(), t.inverse()});
      }
  }
  return out;
}

// ---- RegenGroup ----

RegenGroup::RegenGroup(GroupPtr base, AlphabetPtr alphabet, std::vector<Word> images)
    : ExactGroup(std::move(alphabet)), base_(std::move(base)), images_(std::move(images)) {
  if (images_.size() != this->alphabet().size()) throw ConstructionError("regen: one image per generator required");
  for (const Word& w : images_) base_->alphabet().check(w);
}

std::string RegenGroup::kind() const { return "regen(" + base_->kind() + ")"; }

Element RegenGroup::generator(std::uint32_t gen) const { return base_->evaluate(images_[gen]); }

}  // namespace wordstream
