#pragma once

#include <string>

#include "wordstream/automaton.hpp"
#include "wordstream/ball.hpp"
#include "wordstream/exact_group.hpp"
#include "wordstream/group_spec.hpp"

namespace wordstream {

struct BuildConfig {
  unsigned c = 1;           // fingerprint exponent at the top level
  unsigned c_inner = 4;     // inside fp/wr, whose error terms scale with n^2
  unsigned d = 2;           // lamp exponent for Z and Z_p lamps
  double eps_prime = 0.05;  // Z_{p^k} lamps
  unsigned c_f2 = 1;
  bool exact_top = false;   // wr top groups use the exact ball machine when an oracle exists
  std::string base_dir = ".";
  std::size_t ball_cap = kDefaultBallCap;
};

struct BuiltGroup {
  RecipePtr recipe;
  GroupPtr oracle;  // null when no exact oracle exists (e.g. matrices over F_p)
};

// Base machines: Z^m and D_inf use diagonal / affine matrices, free groups the
// Sanov pair, nilpotent groups the unitriangular fingerprint, and finite,
// cyclic or Grigorchuk groups the exact ball machine.
BuiltGroup build_group(const GroupSpec& spec, const BuildConfig& config = {});
BuiltGroup build_group(const std::string& text, const BuildConfig& config = {});

}  // namespace wordstream
