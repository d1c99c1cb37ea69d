#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace ssg {

using Letter = std::uint16_t;

// A word in alternating form z0 u1 z1 u2 ... un zn. Even positions hold
// zero-group element ids (0 is the identity), odd positions hold unit
// generator ids. The identity word is the single letter {0}.
//
// Words are only ever produced by WordBuilder, which keeps them reduced:
// interior zero letters are the identity only between two units that do not
// fuse.
class Word {
 public:
  Word() : letters_{0} {}
  explicit Word(std::vector<Letter> letters);

  static Word zero(Letter z) { return Word(std::vector<Letter>{z}); }

  std::size_t units() const { return (letters_.size() - 1) / 2; }
  Letter zero_at(std::size_t i) const { return letters_[2 * i]; }
  Letter unit_at(std::size_t i) const { return letters_[2 * i + 1]; }
  Letter last_zero() const { return letters_.back(); }

  bool is_zero() const { return letters_.size() == 1; }
  bool is_trivial() const { return letters_.size() == 1 && letters_[0] == 0; }

  std::span<const Letter> letters() const { return letters_; }

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;

 private:
  std::vector<Letter> letters_;
};

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept;
};

std::uint64_t hash_letters(std::span<const Letter> letters) noexcept;

}  // namespace ssg
