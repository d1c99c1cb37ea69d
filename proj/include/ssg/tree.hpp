#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ssg/family.hpp"

namespace ssg {

inline constexpr std::uint64_t kDefaultIdentityBudget = 10'000'000;

// Group element at level nu of a family: a reduced word over that level's
// generators. Immutable once built; safe to share.
struct Element {
  std::uint64_t level = 0;
  Word word;

  friend bool operator==(const Element&, const Element&) = default;
};

// Stack-based reducer producing words in alternating form. Adjacent rooted
// letters multiply in the zero group; adjacent units fuse when the family's
// fusion table says so (including u * u^-1 = 1).
class WordBuilder {
 public:
  explicit WordBuilder(const FamilySpec& spec) : spec_(&spec), buf_{0} {}

  void push_zero(Letter z);
  void push_unit(Letter u);
  void append(std::span<const Letter> letters);
  void append(const Word& w) { append(w.letters()); }
  std::size_t units() const { return (buf_.size() - 1) / 2; }
  void clear() { buf_.assign(1, 0); }
  Word take();

 private:
  const FamilySpec* spec_;
  std::vector<Letter> buf_;
};

Word reduce(const FamilySpec& spec, const RawWord& raw);

Element identity_element(std::uint64_t level);
Element zero_element(std::uint64_t level, Letter z);
Element unit_element(std::uint64_t level, Letter u);

// Throws DomainError when the levels differ.
Element multiply(const FamilySpec& spec, const Element& u, const Element& v);
Element invert(const FamilySpec& spec, const Element& g);
Word invert_word(const FamilySpec& spec, const Word& w);

// g = (g_1, ..., g_d) root with g(xw) = root(x) g_x(w).
struct Decomposition {
  Perm root;
  std::vector<Word> sections;  // words at the next level
};

Decomposition decompose(const FamilySpec& spec, std::size_t level_idx, const Word& w);

struct ElementDecomposition {
  Perm root;
  std::vector<Element> sections;
};

ElementDecomposition decompose(const FamilySpec& spec, const Element& g);

// Zero-based vertex letters.
Element section_at(const FamilySpec& spec, const Element& g, std::span<const int> vertex);

// Root permutations of the sections at every vertex of length < depth.
// Layer k holds d^k permutations in lexicographic vertex order.
struct Portrait {
  int depth = 0;
  int degree = 2;
  std::vector<std::vector<Perm>> layers;

  const Perm& at(std::span<const int> vertex) const;
  // Image of a vertex of length <= depth under the element.
  std::vector<int> act(std::span<const int> vertex) const;
  friend bool operator==(const Portrait&, const Portrait&) = default;
};

Portrait portrait(const FamilySpec& spec, const Element& g, int depth);

// Exhaustive search over reachable sections. Throws BudgetExceeded when more
// than `budget` distinct states are visited.
bool is_identity(const FamilySpec& spec, std::size_t level_idx, const Word& w,
                 std::uint64_t budget = kDefaultIdentityBudget);
bool is_identity(const FamilySpec& spec, const Element& g,
                 std::uint64_t budget = kDefaultIdentityBudget);
bool equals(const FamilySpec& spec, const Element& u, const Element& v,
            std::uint64_t budget = kDefaultIdentityBudget);

// Letter names: unit names as declared, rooted letters by a zero generator
// name of the level when one matches, otherwise cycle notation.
std::string format_word(const FamilySpec& spec, std::uint64_t level, const Word& w);

// Space- or '*'-separated generator names, each optionally raised to an
// integer power ("a^2", "b^-1"). Unknown names throw DomainError.
Element parse_element(const FamilySpec& spec, std::uint64_t level, const std::string& text);

}  // namespace ssg
