#include "wordstream/alphabet.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "wordstream/errors.hpp"

namespace wordstream {

Word inverse(const Word& w) {
  Word r;
  r.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) r.push_back(it->inverse());
  return r;
}

Word concat(const Word& a, const Word& b) {
  Word r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

Word power(const Word& w, std::size_t k) {
  Word r;
  r.reserve(w.size() * k);
  for (std::size_t i = 0; i < k; ++i) r.insert(r.end(), w.begin(), w.end());
  return r;
}

Word free_reduce(const Word& w) {
  Word r;
  r.reserve(w.size());
  for (Letter a : w) {
    if (!r.empty() && r.back() == a.inverse())
      r.pop_back();
    else
      r.push_back(a);
  }
  return r;
}

Alphabet::Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::uint32_t i = 0; i < names_.size(); ++i) {
    const auto& n = names_[i];
    if (n.empty()) throw AlphabetError("empty generator name");
    for (char ch : n)
      if (std::isspace(static_cast<unsigned char>(ch)) || ch == '-')
        throw AlphabetError("invalid generator name '" + n + "'");
    if (!index_.emplace(n, i).second) throw AlphabetError("duplicate generator name '" + n + "'");
  }
}

const std::string& Alphabet::name(std::uint32_t gen) const {
  if (gen >= names_.size()) throw AlphabetError("generator index out of range");
  return names_[gen];
}

std::optional<std::uint32_t> Alphabet::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void Alphabet::check(Letter a) const {
  if (!contains(a)) throw AlphabetError("letter index " + std::to_string(a.gen) + " outside alphabet");
}

void Alphabet::check(const Word& w) const {
  for (Letter a : w) check(a);
}

Letter Alphabet::letter(std::string_view name) const {
  auto g = find(name);
  if (!g) throw AlphabetError("unknown generator '" + std::string(name) + "'");
  return {*g, false};
}

Letter Alphabet::parse_letter(std::string_view token) const {
  bool inv = false;
  if (token.size() > 1 && token.back() == '-') {
    inv = true;
    token.remove_suffix(1);
  }
  Letter a = letter(token);
  a.inverted = inv;
  return a;
}

std::string Alphabet::format(Letter a) const { return name(a.gen) + (a.inverted ? "-" : ""); }

Word Alphabet::parse_word(std::string_view text) const {
  Word w;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) w.push_back(parse_letter(text.substr(i, j - i)));
    i = j;
  }
  return w;
}

std::string Alphabet::format(const Word& w) const {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += format(w[i]);
  }
  return out;
}

std::vector<Letter> Alphabet::letters() const {
  std::vector<Letter> out;
  for (std::uint32_t g = 0; g < names_.size(); ++g) {
    out.push_back({g, false});
    out.push_back({g, true});
  }
  return out;
}

std::size_t CombinedAlphabet::part_of(std::uint32_t gen) const {
  auto it = std::upper_bound(offsets.begin(), offsets.end(), gen);
  return static_cast<std::size_t>(it - offsets.begin()) - 1;
}

CombinedAlphabet combine_alphabets(const std::vector<AlphabetPtr>& parts) {
  std::multiset<std::string> seen;
  for (const auto& p : parts)
    for (const auto& n : p->names()) seen.insert(n);
  CombinedAlphabet out;
  std::vector<std::string> names;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    out.offsets.push_back(static_cast<std::uint32_t>(names.size()));
    for (const auto& n : parts[k]->names())
      names.push_back(seen.count(n) > 1 ? std::to_string(k + 1) + "." + n : n);
  }
  out.alphabet = std::make_shared<Alphabet>(std::move(names));
  return out;
}

}  // namespace wordstream
