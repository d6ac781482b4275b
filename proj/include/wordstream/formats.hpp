#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wordstream/combinators.hpp"
#include "wordstream/exact_group.hpp"
#include "wordstream/matrix_group.hpp"

namespace wordstream {

// All parsers throw FormatError with a "line N: " prefix.

std::string read_text_file(const std::string& path);

// One word per line, whitespace-separated letters, trailing '-' for inverses.
// A blank line is the empty word; lines starting with '#' are skipped.
std::vector<Word> parse_words(const std::string& text, const Alphabet& alphabet);

// Header "dim r; vars m; denom <poly>" (optionally "char p"), then blocks
// "gen NAME" / "inv NAME" followed by r rows of r polynomial entries, scaled by denom.
MatrixGenerators parse_matrix_file(const std::string& text);

// Line 1: element names, identity first. Then one row of products per element.
// Optional final line "gens NAME...".
std::shared_ptr<FiniteGroup> parse_finite_table(const std::string& text);

// "cosets NAME...", "conj LETTER i : WORD", "alpha i j = l", "mult i j : WORD",
// optional "oracle FILE" naming a matrix file for the big group. Indices are 1-based.
struct ExtensionFile {
  ExtensionData data;
  std::optional<std::string> oracle_matrix_file;
};
ExtensionFile parse_extension_file(const std::string& text, AlphabetPtr base_alphabet);

// Lines "NAME = WORD" over the base alphabet.
struct GeneratorMap {
  AlphabetPtr alphabet;
  std::vector<Word> images;
};
GeneratorMap parse_generator_map(const std::string& text, const Alphabet& base);

}  // namespace wordstream
