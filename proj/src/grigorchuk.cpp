#include "wordstream/grigorchuk.hpp"

#include <array>

namespace wordstream {

namespace {

constexpr std::uint8_t kA = 0;
constexpr unsigned kMaxDepth = 64;

// Sections of b, c, d at child 0 and child 1; 255 marks the identity.
constexpr std::uint8_t kNone = 255;
constexpr std::array<std::array<std::uint8_t, 2>, 4> kSection = {{{kNone, kNone}, {0, 2}, {0, 3}, {kNone, 1}}};

void push_reduced(GrigWord& out, std::uint8_t x) {
  if (!out.empty()) {
    std::uint8_t y = out.back();
    if (x == y) {
      out.pop_back();
      return;
    }
    if (x != kA && y != kA) {
      out.pop_back();
      push_reduced(out, static_cast<std::uint8_t>(6 - x - y));
      return;
    }
  }
  out.push_back(x);
}

bool trivial_rec(const GrigWord& w_in, unsigned depth) {
  if (depth > kMaxDepth) throw Error("grigorchuk: recursion depth exceeded");
  GrigWord w = grigorchuk_reduce(w_in);
  if (w.empty()) return true;
  if (w.size() == 1) return false;
  // Abelianization (Z/2)^3 spanned by a, b, c with d = bc.
  unsigned na = 0, nb = 0, nc = 0;
  for (auto x : w) {
    if (x == 0) ++na;
    if (x == 1 || x == 3) ++nb;
    if (x == 2 || x == 3) ++nc;
  }
  if ((na | nb | nc) & 1) return false;
  auto [s0, s1] = grigorchuk_sections(w);
  return trivial_rec(s0, depth + 1) && trivial_rec(s1, depth + 1);
}

// Canonical portrait: root permutation and sections, cut off at nucleus elements.
void key_rec(const GrigWord& w_in, std::string& out, unsigned depth) {
  if (depth > kMaxDepth) throw Error("grigorchuk: recursion depth exceeded");
  GrigWord w = grigorchuk_reduce(w_in);
  if (grigorchuk_is_trivial(w)) {
    out += '1';
    return;
  }
  for (std::uint8_t x = 0; x < 4; ++x) {
    GrigWord t = w;
    t.push_back(x);
    if (grigorchuk_is_trivial(t)) {
      out += static_cast<char>('a' + x);
      return;
    }
  }
  unsigned na = 0;
  for (auto x : w) na += x == kA;
  auto [s0, s1] = grigorchuk_sections(w);
  out += (na & 1) ? "(s" : "(e";
  key_rec(s0, out, depth + 1);
  out += ',';
  key_rec(s1, out, depth + 1);
  out += ')';
}

}  // namespace

GrigWord grigorchuk_reduce(const GrigWord& w) {
  GrigWord out;
  out.reserve(w.size());
  for (auto x : w) {
    if (x > 3) throw AlphabetError("grigorchuk: letter outside {a,b,c,d}");
    push_reduced(out, x);
  }
  return out;
}

std::pair<GrigWord, GrigWord> grigorchuk_sections(const GrigWord& w) {
  std::pair<GrigWord, GrigWord> out;
  for (int start = 0; start < 2; ++start) {
    GrigWord& s = start == 0 ? out.first : out.second;
    int cur = start;
    for (auto x : w) {
      if (x == kA) {
        cur ^= 1;
      } else {
        std::uint8_t y = kSection[x][cur];
        if (y != kNone) push_reduced(s, y);
      }
    }
  }
  return out;
}

bool grigorchuk_is_trivial(const GrigWord& w) { return trivial_rec(w, 0); }

GrigorchukGroup::GrigorchukGroup()
    : ExactGroup(std::make_shared<Alphabet>(std::vector<std::string>{"a", "b", "c", "d"})) {}

GrigWord GrigorchukGroup::letters_of(const Word& w) const {
  alphabet().check(w);
  GrigWord out;
  out.reserve(w.size());
  for (Letter a : w) out.push_back(static_cast<std::uint8_t>(a.gen));
  return out;
}

Element GrigorchukGroup::identity() const { return box(GrigWord{}); }

Element GrigorchukGroup::generator(std::uint32_t gen) const { return box(GrigWord{static_cast<std::uint8_t>(gen)}); }

Element GrigorchukGroup::mul(const Element& x, const Element& y) const {
  GrigWord w = reduced(x);
  for (auto l : reduced(y)) push_reduced(w, l);
  return box(std::move(w));
}

Element GrigorchukGroup::inv(const Element& x) const {
  const GrigWord& w = reduced(x);
  return box(GrigWord(w.rbegin(), w.rend()));
}

CanonicalKey GrigorchukGroup::key(const Element& x) const {
  std::string out;
  key_rec(reduced(x), out, 0);
  return out;
}

bool GrigorchukGroup::is_identity(const Element& x) const { return grigorchuk_is_trivial(reduced(x)); }

std::string GrigorchukGroup::format(const Element& x) const {
  const GrigWord& w = reduced(x);
  if (w.empty()) return "1";
  std::string out;
  for (auto l : w) out += static_cast<char>('a' + l);
  return out;
}

std::optional<Word> GrigorchukGroup::word_of(const Element& x) const {
  Word w;
  for (auto l : reduced(x)) w.push_back({l, false});
  return w;
}

std::vector<Word> GrigorchukGroup::relators() const {
  auto parse = [](const std::string& s) {
    Word w;
    for (char ch : s) w.push_back({static_cast<std::uint32_t>(ch - 'a'), false});
    return w;
  };
  std::string ab16, ac8, ad4;
  for (int i = 0; i < 16; ++i) ab16 += "ab";
  for (int i = 0; i < 8; ++i) ac8 += "ac";
  for (int i = 0; i < 4; ++i) ad4 += "ad";
  return {parse("aa"), parse("bb"), parse("cc"), parse("dd"), parse("bcd"), parse(ad4), parse(ac8), parse(ab16)};
}

}  // namespace wordstream
