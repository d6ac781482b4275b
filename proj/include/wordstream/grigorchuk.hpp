#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wordstream/exact_group.hpp"

namespace wordstream {

// Letters a, b, c, d as 0..3; all are involutions.
using GrigWord = std::vector<std::uint8_t>;

// Free reduction with a^2 = b^2 = c^2 = d^2 = 1 and bc = cb = d, bd = db = c, cd = dc = b.
GrigWord grigorchuk_reduce(const GrigWord& w);
// Sections at the two children of the root (right action).
std::pair<GrigWord, GrigWord> grigorchuk_sections(const GrigWord& w);
bool grigorchuk_is_trivial(const GrigWord& w);

// Automorphism group of the binary rooted tree generated by a, b, c, d.
class GrigorchukGroup final : public ExactGroup {
 public:
  GrigorchukGroup();
  std::string kind() const override { return "grigorchuk"; }
  Element identity() const override;
  Element generator(std::uint32_t gen) const override;
  Element mul(const Element& x, const Element& y) const override;
  Element inv(const Element& x) const override;
  CanonicalKey key(const Element& x) const override;
  bool is_identity(const Element& x) const override;
  using ExactGroup::is_identity;
  std::string format(const Element& x) const override;
  std::optional<Word> word_of(const Element& x) const override;
  std::vector<Word> relators() const override;

  GrigWord letters_of(const Word& w) const;
  const GrigWord& reduced(const Element& x) const { return unbox<GrigWord>(x); }
  bool is_trivial_word(const Word& w) const { return grigorchuk_is_trivial(letters_of(w)); }
};

}  // namespace wordstream
