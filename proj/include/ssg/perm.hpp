#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ssg {

// Largest tree degree supported (Neumann's example needs 6).
inline constexpr int kMaxDegree = 8;

// A permutation of {0, ..., degree-1}. Composition follows function
// notation: (p * q)(x) = p(q(x)).
class Perm {
 public:
  Perm() : Perm(1) {}
  explicit Perm(int degree);

  // One-based images, i.e. one-line notation [pi(1), ..., pi(d)].
  static Perm from_one_line(std::span<const int> images);
  // Single cycle given by one-based points, e.g. {1, 2, 3} for (1 2 3).
  static Perm cycle(int degree, std::span<const int> points);

  int degree() const { return degree_; }
  int operator()(int x) const { return images_[x]; }

  Perm operator*(const Perm& rhs) const;
  Perm inverse() const;
  Perm pow(long long e) const;
  bool is_identity() const;
  int order() const;

  // Packs the images into a single integer, unique per permutation of a
  // fixed degree.
  std::uint32_t code() const;
  static Perm from_code(int degree, std::uint32_t code);

  std::vector<int> one_line() const;
  std::string to_string() const;  // cycle notation, "()" for the identity

  friend bool operator==(const Perm&, const Perm&) = default;
  friend auto operator<=>(const Perm&, const Perm&) = default;

 private:
  std::uint8_t degree_ = 1;
  std::array<std::uint8_t, kMaxDegree> images_{};
};

// Closure of a set of permutations under composition; sorted, identity first.
std::vector<Perm> generate_group(std::span<const Perm> gens, int degree);

// Orbit of `point` under the group generated by `gens`.
std::vector<int> orbit(std::span<const Perm> gens, int degree, int point);

bool is_transitive(std::span<const Perm> gens, int degree);

}  // namespace ssg
