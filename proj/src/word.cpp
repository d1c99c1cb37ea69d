#include "ssg/word.hpp"

#include <stdexcept>

namespace ssg {

Word::Word(std::vector<Letter> letters) : letters_(std::move(letters)) {
  if (letters_.size() % 2 == 0) {
    throw std::invalid_argument("word must alternate zero and unit letters");
  }
}

std::uint64_t hash_letters(std::span<const Letter> letters) noexcept {
  // FNV-1a over 16-bit symbols followed by a final avalanche.
  std::uint64_t h = 1469598103934665603ull;
  for (Letter l : letters) {
    h ^= l;
    h *= 1099511628211ull;
  }
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdull;
  h ^= h >> 33;
  return h;
}

std::size_t WordHash::operator()(const Word& w) const noexcept {
  return static_cast<std::size_t>(hash_letters(w.letters()));
}

}  // namespace ssg
