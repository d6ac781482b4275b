#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wordstream/alphabet.hpp"
#include "wordstream/errors.hpp"

namespace wordstream {

struct ElementData {
  explicit ElementData(const void* owner) : owner(owner) {}
  virtual ~ElementData() = default;
  const void* owner;
};

using Element = std::shared_ptr<const ElementData>;
using CanonicalKey = std::string;

template <class T>
struct Boxed final : ElementData {
  Boxed(const void* owner, T v) : ElementData(owner), value(std::move(v)) {}
  T value;
};

// Length-prefixed append, keeps concatenated keys injective.
void append_field(std::string& out, const std::string& field);
void append_u32(std::string& out, std::uint32_t v);
void append_i64(std::string& out, std::int64_t v);

// Exact group with a symmetric generating alphabet.
class ExactGroup {
 public:
  explicit ExactGroup(AlphabetPtr alphabet) : alphabet_(std::move(alphabet)) {}
  virtual ~ExactGroup() = default;

  const Alphabet& alphabet() const { return *alphabet_; }
  const AlphabetPtr& alphabet_ptr() const { return alphabet_; }

  virtual std::string kind() const = 0;
  virtual Element identity() const = 0;
  // Image of the positive letter of generator gen.
  virtual Element generator(std::uint32_t gen) const = 0;
  virtual Element mul(const Element& x, const Element& y) const = 0;
  virtual Element inv(const Element& x) const = 0;
  virtual CanonicalKey key(const Element& x) const = 0;
  virtual bool is_identity(const Element& x) const;
  virtual std::string format(const Element& x) const;
  // A word evaluating to x, when the representation supports it.
  virtual std::optional<Word> word_of(const Element& x) const;
  virtual std::optional<std::uint64_t> order() const { return std::nullopt; }
  // Words equal to the identity, used to build equal pairs.
  virtual std::vector<Word> relators() const { return {}; }

  bool equal(const Element& x, const Element& y) const { return key(x) == key(y); }
  const Element& letter(Letter a) const;
  Element evaluate(const Word& w) const;
  bool is_identity(const Word& w) const { return is_identity(evaluate(w)); }

 protected:
  template <class T>
  Element box(T v) const {
    return std::make_shared<const Boxed<T>>(this, std::move(v));
  }
  template <class T>
  const T& unbox(const Element& e) const {
    if (!e || e->owner != this) throw GroupMismatch("element belongs to a different group than " + kind());
    return static_cast<const Boxed<T>*>(e.get())->value;
  }

 private:
  AlphabetPtr alphabet_;
  mutable std::once_flag letters_once_;
  mutable std::vector<Element> letters_;
};

using GroupPtr = std::shared_ptr<const ExactGroup>;

std::vector<std::string> default_names(std::size_t count);

class FreeGroup final : public ExactGroup {
 public:
  explicit FreeGroup(unsigned rank);
  explicit FreeGroup(std::vector<std::string> names);
  std::string kind() const override;
  Element identity() const override;
  Element generator(std::uint32_t gen) const override;
  Element mul(const Element& x, const Element& y) const override;
  Element inv(const Element& x) const override;
  CanonicalKey key(const Element& x) const override;
  std::string format(const Element& x) const override;
  std::optional<Word> word_of(const Element& x) const override;
  const Word& reduced(const Element& x) const { return unbox<Word>(x); }
};

class FreeAbelianGroup final : public ExactGroup {
 public:
  explicit FreeAbelianGroup(unsigned rank);
  explicit FreeAbelianGroup(std::vector<std::string> names);
  std::string kind() const override;
  Element identity() const override;
  Element generator(std::uint32_t gen) const override;
  Element mul(const Element& x, const Element& y) const override;
  Element inv(const Element& x) const override;
  CanonicalKey key(const Element& x) const override;
  std::string format(const Element& x) const override;
  std::optional<Word> word_of(const Element& x) const override;
  std::vector<Word> relators() const override;
  const std::vector<std::int64_t>& vec(const Element& x) const { return unbox<std::vector<std::int64_t>>(x); }
  Element make(std::vector<std::int64_t> v) const;
};

class CyclicGroup final : public ExactGroup {
 public:
  explicit CyclicGroup(std::uint64_t modulus, std::string name = "a");
  std::string kind() const override;
  Element identity() const override;
  Element generator(std::uint32_t gen) const override;
  Element mul(const Element& x, const Element& y) const override;
  Element inv(const Element& x) const override;
  CanonicalKey key(const Element& x) const override;
  std::string format(const Element& x) const override;
  std::optional<Word> word_of(const Element& x) const override;
  std::optional<std::uint64_t> order() const override { return modulus_; }
  std::vector<Word> relators() const override;
  std::uint64_t modulus() const { return modulus_; }
  std::uint64_t residue(const Element& x) const { return unbox<std::uint64_t>(x); }

 private:
  std::uint64_t modulus_;
};

// Finite group from a multiplication table; element 0 is the identity.
class FiniteGroup final : public ExactGroup {
 public:
  // generators: element indices forming the alphabet (default: all non-identity elements).
  FiniteGroup(std::vector<std::string> element_names, std::vector<std::vector<std::uint32_t>> table,
              std::optional<std::vector<std::uint32_t>> generators = std::nullopt);
  static std::shared_ptr<FiniteGroup> symmetric(unsigned degree, std::optional<std::vector<std::string>> gen_names = std::nullopt);
  static std::shared_ptr<FiniteGroup> cyclic(std::uint32_t m);

  std::string kind() const override;
  Element identity() const override;
  Element generator(std::uint32_t gen) const override;
  Element mul(const Element& x, const Element& y) const override;
  Element inv(const Element& x) const override;
  CanonicalKey key(const Element& x) const override;
  std::string format(const Element& x) const override;
  std::optional<Word> word_of(const Element& x) const override;
  std::optional<std::uint64_t> order() const override { return table_.size(); }
  std::vector<Word> relators() const override;

  std::uint32_t size() const { return static_cast<std::uint32_t>(table_.size()); }
  std::uint32_t index(const Element& x) const { return unbox<std::uint32_t>(x); }
  Element element(std::uint32_t i) const;
  std::uint32_t mul_index(std::uint32_t a, std::uint32_t b) const { return table_[a][b]; }
  std::uint32_t inv_index(std::uint32_t a) const { return inverse_[a]; }
  std::uint32_t generator_index(std::uint32_t gen) const { return generators_[gen]; }
  const std::vector<std::string>& element_names() const { return element_names_; }

 private:
  std::vector<std::string> element_names_;
  std::vector<std::vector<std::uint32_t>> table_;
  std::vector<std::uint32_t> inverse_;
  std::vector<std::uint32_t> generators_;
  std::vector<Word> words_;
};

class DirectProductGroup final : public ExactGroup {
 public:
  DirectProductGroup(GroupPtr left, GroupPtr right);
  std::string kind() const override;
  Element identity() const override;
  Element generator(std::uint32_t gen) const override;
  Element mul(const Element& x, const Element& y) const override;
  Element inv(const Element& x) const override;
  CanonicalKey key(const Element& x) const override;
  bool is_identity(const Element& x) const override;
  using ExactGroup::is_identity;
  std::string format(const Element& x) const override;
  std::optional<Word> word_of(const Element& x) const override;
  std::optional<std::uint64_t> order() const override;
  std::vector<Word> relators() const override;
  const CombinedAlphabet& layout() const { return layout_; }
  const GroupPtr& factor(std::size_t i) const { return i == 0 ? left_ : right_; }

 private:
  using Pair = std::pair<Element, Element>;
  GroupPtr left_, right_;
  CombinedAlphabet layout_;
};

class FreeProductGroup final : public ExactGroup {
 public:
  FreeProductGroup(GroupPtr left, GroupPtr right);
  std::string kind() const override;
  Element identity() const override;
  Element generator(std::uint32_t gen) const override;
  Element mul(const Element& x, const Element& y) const override;
  Element inv(const Element& x) const override;
  CanonicalKey key(const Element& x) const override;
  std::string format(const Element& x) const override;
  std::optional<Word> word_of(const Element& x) const override;
  std::vector<Word> relators() const override;
  const CombinedAlphabet& layout() const { return layout_; }
  const GroupPtr& factor(std::size_t i) const { return i == 0 ? left_ : right_; }

  struct Syllable {
    std::uint8_t factor;
    Element value;
  };
  const std::vector<Syllable>& syllables(const Element& x) const { return unbox<std::vector<Syllable>>(x); }

 private:
  GroupPtr left_, right_;
  CombinedAlphabet layout_;
};

// H wr G: finitely supported lamps G -> H and a cursor in G. Lamp letters come first in the alphabet.
class WreathGroup final : public ExactGroup {
 public:
  WreathGroup(GroupPtr lamp, GroupPtr top);
  std::string kind() const override;
  Element identity() const override;
  Element generator(std::uint32_t gen) const override;
  Element mul(const Element& x, const Element& y) const override;
  Element inv(const Element& x) const override;
  CanonicalKey key(const Element& x) const override;
  bool is_identity(const Element& x) const override;
  using ExactGroup::is_identity;
  std::string format(const Element& x) const override;
  std::optional<Word> word_of(const Element& x) const override;
  std::optional<std::uint64_t> order() const override;
  std::vector<Word> relators() const override;
  const CombinedAlphabet& layout() const { return layout_; }
  const GroupPtr& lamp() const { return lamp_; }
  const GroupPtr& top() const { return top_; }
  bool is_lamp_letter(Letter a) const { return layout_.part_of(a.gen) == 0; }

  struct Value {
    // Support keyed by the canonical key of the position; stores (position, lamp value).
    std::map<CanonicalKey, std::pair<Element, Element>> support;
    Element cursor;
  };
  const Value& value(const Element& x) const { return unbox<Value>(x); }
  Element make(Value v) const { return box(std::move(v)); }

 private:
  GroupPtr lamp_, top_;
  CombinedAlphabet layout_;
};

// Same group, new generating set given by words over the old one.
class RegenGroup final : public ExactGroup {
 public:
  RegenGroup(GroupPtr base, AlphabetPtr alphabet, std::vector<Word> images);
  std::string kind() const override;
  Element identity() const override { return base_->identity(); }
  Element generator(std::uint32_t gen) const override;
  Element mul(const Element& x, const Element& y) const override { return base_->mul(x, y); }
  Element inv(const Element& x) const override { return base_->inv(x); }
  CanonicalKey key(const Element& x) const override { return base_->key(x); }
  bool is_identity(const Element& x) const override { return base_->is_identity(x); }
  using ExactGroup::is_identity;
  std::string format(const Element& x) const override { return base_->format(x); }
  std::optional<std::uint64_t> order() const override { return base_->order(); }
  const GroupPtr& base() const { return base_; }

 private:
  GroupPtr base_;
  std::vector<Word> images_;
};

}  // namespace wordstream
