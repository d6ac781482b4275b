#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wordstream {

struct Letter {
  std::uint32_t gen = 0;
  bool inverted = false;

  Letter inverse() const { return {gen, !inverted}; }
  // Dense code in [0, 2 * #generators).
  std::uint32_t code() const { return gen * 2 + (inverted ? 1u : 0u); }
  static Letter from_code(std::uint32_t c) { return {c / 2, (c & 1) != 0}; }
  auto operator<=>(const Letter&) const = default;
};

using Word = std::vector<Letter>;

Word inverse(const Word& w);
Word concat(const Word& a, const Word& b);
Word power(const Word& w, std::size_t k);
Word free_reduce(const Word& w);

// Symmetric alphabet: each generator name stands for a letter and its formal inverse.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  std::size_t letter_count() const { return 2 * names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::uint32_t gen) const;
  std::optional<std::uint32_t> find(std::string_view name) const;
  bool contains(Letter a) const { return a.gen < names_.size(); }
  void check(Letter a) const;
  void check(const Word& w) const;

  Letter letter(std::string_view name) const;
  // Token form: name, or name followed by '-' for the inverse.
  Letter parse_letter(std::string_view token) const;
  std::string format(Letter a) const;
  // Whitespace-separated tokens.
  Word parse_word(std::string_view text) const;
  std::string format(const Word& w) const;

  std::vector<Letter> letters() const;

  bool operator==(const Alphabet& o) const { return names_ == o.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

using AlphabetPtr = std::shared_ptr<const Alphabet>;

// Union of alphabets. Colliding names get a "k." prefix naming the 1-based part.
struct CombinedAlphabet {
  AlphabetPtr alphabet;
  std::vector<std::uint32_t> offsets;
  std::size_t part_of(std::uint32_t gen) const;
  Letter to_part(Letter a, std::size_t part) const { return {a.gen - offsets[part], a.inverted}; }
  Letter from_part(Letter a, std::size_t part) const { return {a.gen + offsets[part], a.inverted}; }
};

CombinedAlphabet combine_alphabets(const std::vector<AlphabetPtr>& parts);

}  // namespace wordstream
