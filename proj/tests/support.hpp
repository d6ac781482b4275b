#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wordstream/alphabet.hpp"
#include "wordstream/bigint.hpp"

namespace testing {

using wordstream::BigInt;
using wordstream::Letter;
using wordstream::Word;

// Square matrix of big integers, row-major, used as an independent reference.
struct RefMatrix {
  unsigned r = 0;
  std::vector<BigInt> a;

  static RefMatrix identity(unsigned r) {
    RefMatrix m{r, std::vector<BigInt>(r * r, 0)};
    for (unsigned i = 0; i < r; ++i) m.a[i * r + i] = 1;
    return m;
  }
  static RefMatrix of(std::initializer_list<std::initializer_list<long>> rows) {
    RefMatrix m;
    m.r = static_cast<unsigned>(rows.size());
    for (const auto& row : rows)
      for (long v : row) m.a.emplace_back(v);
    return m;
  }
  BigInt& at(unsigned i, unsigned j) { return a[i * r + j]; }
  const BigInt& at(unsigned i, unsigned j) const { return a[i * r + j]; }

  RefMatrix times(const RefMatrix& o) const {
    RefMatrix out{r, std::vector<BigInt>(r * r, 0)};
    for (unsigned i = 0; i < r; ++i)
      for (unsigned k = 0; k < r; ++k)
        for (unsigned j = 0; j < r; ++j) out.at(i, j) += at(i, k) * o.at(k, j);
    return out;
  }
  RefMatrix mod(const BigInt& p) const {
    RefMatrix out = *this;
    for (auto& v : out.a) {
      v %= p;
      if (v < 0) v += p;
    }
    return out;
  }
  bool operator==(const RefMatrix& o) const { return r == o.r && a == o.a; }
};

inline std::uint64_t enumerate_count(std::size_t letters, unsigned max_len) {
  std::uint64_t total = 0, layer = 1;
  for (unsigned l = 0; l <= max_len; ++l) {
    total += layer;
    layer *= letters;
  }
  return total;
}

// Calls visit on every word of length <= max_len over the full symmetric alphabet.
inline void for_each_word(std::size_t generators, unsigned max_len, const std::function<void(const Word&)>& visit) {
  Word w;
  std::function<void()> rec = [&] {
    visit(w);
    if (w.size() == max_len) return;
    for (std::uint32_t c = 0; c < 2 * generators; ++c) {
      w.push_back(Letter::from_code(c));
      rec();
      w.pop_back();
    }
  };
  rec();
}

inline bool trial_division_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::string data_path(const std::string& name) { return std::string(WORDSTREAM_TEST_DATA) + "/" + name; }

}  // namespace testing
