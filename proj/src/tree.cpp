#include "ssg/tree.hpp"

#include <array>
#include <cctype>
#include <deque>
#include <numeric>
#include <unordered_set>

#include "ssg/errors.hpp"

namespace ssg {

void WordBuilder::push_zero(Letter z) { buf_.back() = spec_->zero_mul(buf_.back(), z); }

void WordBuilder::push_unit(Letter u) {
  for (;;) {
    if (buf_.size() >= 3 && buf_.back() == 0) {
      const Fusion f = spec_->fuse(buf_[buf_.size() - 2], u);
      if (f.kind == FusionKind::unit) {
        buf_.resize(buf_.size() - 2);
        u = f.value;
        continue;
      }
      if (f.kind == FusionKind::zero) {
        buf_.resize(buf_.size() - 2);
        push_zero(f.value);
        return;
      }
    }
    buf_.push_back(u);
    buf_.push_back(0);
    return;
  }
}

void WordBuilder::append(std::span<const Letter> letters) {
  push_zero(letters[0]);
  for (std::size_t i = 1; i + 1 < letters.size(); i += 2) {
    push_unit(letters[i]);
    push_zero(letters[i + 1]);
  }
}

Word WordBuilder::take() {
  Word w(std::move(buf_));
  buf_.assign(1, 0);
  return w;
}

Word reduce(const FamilySpec& spec, const RawWord& raw) {
  WordBuilder b(spec);
  for (const RawLetter& l : raw) {
    if (l.is_unit) {
      b.push_unit(l.unit);
    } else {
      auto z = spec.find_zero(l.perm);
      if (!z) throw DomainError("rooted letter " + l.perm.to_string() + " is outside the zero group");
      b.push_zero(*z);
    }
  }
  return b.take();
}

Element identity_element(std::uint64_t level) { return {level, Word()}; }
Element zero_element(std::uint64_t level, Letter z) { return {level, Word::zero(z)}; }
Element unit_element(std::uint64_t level, Letter u) { return {level, Word({0, u, 0})}; }

Element multiply(const FamilySpec& spec, const Element& u, const Element& v) {
  if (u.level != v.level) {
    throw DomainError("cannot multiply elements of levels " + std::to_string(u.level) + " and " +
                      std::to_string(v.level));
  }
  WordBuilder b(spec);
  b.append(u.word);
  b.append(v.word);
  return {u.level, b.take()};
}

Word invert_word(const FamilySpec& spec, const Word& w) {
  WordBuilder b(spec);
  auto l = w.letters();
  b.push_zero(spec.zero_inv(l.back()));
  for (std::size_t i = l.size() - 1; i >= 2; i -= 2) {
    b.push_unit(spec.units[l[i - 1]].inverse);
    b.push_zero(spec.zero_inv(l[i - 2]));
  }
  return b.take();
}

Element invert(const FamilySpec& spec, const Element& g) { return {g.level, invert_word(spec, g.word)}; }

Decomposition decompose(const FamilySpec& spec, std::size_t level_idx, const Word& w) {
  const int d = spec.degree;
  const LevelSpec& lvl = spec.level(level_idx);
  const std::size_t m = w.units();
  std::array<int, kMaxDegree> cur{};
  std::iota(cur.begin(), cur.begin() + d, 0);

  // pieces[i * d + x]: contribution of the i-th unit to the section at x.
  std::vector<const Word*> pieces(m * d);
  auto apply_zero = [&](Letter z) {
    if (z == 0) return;
    const Perm& p = spec.zero_perm(z);
    for (int x = 0; x < d; ++x) cur[x] = p(cur[x]);
  };
  apply_zero(w.last_zero());
  for (std::size_t i = m; i-- > 0;) {
    const UnitRule& rule = lvl.units[w.unit_at(i)];
    for (int x = 0; x < d; ++x) {
      pieces[i * d + x] = &rule.children[cur[x]];
      cur[x] = rule.root(cur[x]);
    }
    apply_zero(w.zero_at(i));
  }

  Decomposition out;
  out.root = Perm(d);
  std::vector<int> images(cur.begin(), cur.begin() + d);
  for (int& x : images) ++x;
  out.root = Perm::from_one_line(images);
  out.sections.reserve(d);
  WordBuilder b(spec);
  for (int x = 0; x < d; ++x) {
    for (std::size_t i = 0; i < m; ++i) {
      const Word* piece = pieces[i * d + x];
      if (!piece->is_trivial()) b.append(*piece);
    }
    out.sections.push_back(b.take());
  }
  return out;
}

ElementDecomposition decompose(const FamilySpec& spec, const Element& g) {
  Decomposition d = decompose(spec, spec.level_index(g.level), g.word);
  ElementDecomposition out{d.root, {}};
  for (auto& s : d.sections) out.sections.push_back({g.level + 1, std::move(s)});
  return out;
}

Element section_at(const FamilySpec& spec, const Element& g, std::span<const int> vertex) {
  Element cur = g;
  for (int x : vertex) {
    Decomposition d = decompose(spec, spec.level_index(cur.level), cur.word);
    cur = {cur.level + 1, std::move(d.sections.at(x))};
  }
  return cur;
}

const Perm& Portrait::at(std::span<const int> vertex) const {
  std::size_t index = 0;
  for (int x : vertex) index = index * degree + x;
  return layers.at(vertex.size()).at(index);
}

std::vector<int> Portrait::act(std::span<const int> vertex) const {
  std::vector<int> image(vertex.size());
  for (std::size_t i = 0; i < vertex.size(); ++i) {
    image[i] = at(vertex.subspan(0, i))(vertex[i]);
  }
  return image;
}

Portrait portrait(const FamilySpec& spec, const Element& g, int depth) {
  Portrait p;
  p.depth = depth;
  p.degree = spec.degree;
  std::vector<Word> words{g.word};
  for (int k = 0; k < depth; ++k) {
    const std::size_t idx = spec.level_index(g.level + k);
    std::vector<Perm> layer;
    std::vector<Word> next;
    layer.reserve(words.size());
    for (const Word& w : words) {
      if (w.is_trivial()) {
        layer.emplace_back(spec.degree);
        if (k + 1 < depth) next.insert(next.end(), spec.degree, Word());
        continue;
      }
      Decomposition d = decompose(spec, idx, w);
      layer.push_back(d.root);
      if (k + 1 < depth) {
        for (auto& s : d.sections) next.push_back(std::move(s));
      }
    }
    p.layers.push_back(std::move(layer));
    words = std::move(next);
  }
  return p;
}

namespace {

struct StateHash {
  std::size_t operator()(const std::pair<std::size_t, Word>& s) const noexcept {
    return WordHash{}(s.second) ^ (s.first * 0x9e3779b97f4a7c15ull);
  }
};

}  // namespace

bool is_identity(const FamilySpec& spec, std::size_t level_idx, const Word& w, std::uint64_t budget) {
  if (w.is_trivial()) return true;
  if (w.is_zero()) return false;
  std::unordered_set<std::pair<std::size_t, Word>, StateHash> seen;
  std::deque<std::pair<std::size_t, Word>> queue;
  seen.insert({level_idx, w});
  queue.emplace_back(level_idx, w);
  while (!queue.empty()) {
    auto [idx, word] = std::move(queue.front());
    queue.pop_front();
    Decomposition d = decompose(spec, idx, word);
    if (!d.root.is_identity()) return false;
    const std::size_t next = spec.next_index(idx);
    for (auto& s : d.sections) {
      if (s.is_trivial()) continue;
      if (s.is_zero()) return false;
      if (seen.emplace(next, s).second) {
        if (seen.size() > budget) {
          throw BudgetExceeded("identity check visited more than " + std::to_string(budget) +
                               " states");
        }
        queue.emplace_back(next, std::move(s));
      }
    }
  }
  return true;
}

bool is_identity(const FamilySpec& spec, const Element& g, std::uint64_t budget) {
  return is_identity(spec, spec.level_index(g.level), g.word, budget);
}

bool equals(const FamilySpec& spec, const Element& u, const Element& v, std::uint64_t budget) {
  return is_identity(spec, multiply(spec, u, invert(spec, v)), budget);
}

namespace {

std::string zero_name(const FamilySpec& spec, std::size_t level_idx, Letter z) {
  const LevelSpec& lvl = spec.level(level_idx);
  for (const auto& g : lvl.zero_generators) {
    if (g.element == z) return g.name;
  }
  for (const auto& g : lvl.zero_generators) {
    Letter p = g.element;
    for (int k = 2; k <= 64 && p != 0; ++k) {
      p = spec.zero_mul(p, g.element);
      if (p == z) return g.name + "^" + std::to_string(k);
    }
  }
  return spec.zero_perm(z).to_string();
}

}  // namespace

std::string format_word(const FamilySpec& spec, std::uint64_t level, const Word& w) {
  if (w.is_trivial()) return "1";
  const std::size_t level_idx = spec.level_index(level);
  std::string out;
  auto add = [&](const std::string& s) {
    if (!out.empty()) out += ' ';
    out += s;
  };
  auto l = w.letters();
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (i % 2 == 1) add(spec.units[l[i]].name);
    else if (l[i] != 0) add(zero_name(spec, level_idx, l[i]));
  }
  return out;
}

Element parse_element(const FamilySpec& spec, std::uint64_t level, const std::string& text) {
  const LevelSpec& lvl = spec.level(spec.level_index(level));
  WordBuilder b(spec);
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == '*') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '*') ++j;
    std::string token = text.substr(i, j - i);
    i = j;
    long long power = 1;
    if (auto caret = token.find('^'); caret != std::string::npos) {
      try {
        power = std::stoll(token.substr(caret + 1));
      } catch (const std::exception&) {
        throw DomainError("bad exponent in '" + token + "'");
      }
      token.resize(caret);
    }
    if (token == "1") continue;
    std::optional<Letter> zero;
    for (const auto& g : lvl.zero_generators) {
      if (g.name == token) zero = g.element;
    }
    if (zero) {
      Letter z = power < 0 ? spec.zero_inv(*zero) : *zero;
      for (long long k = 0; k < (power < 0 ? -power : power); ++k) b.push_zero(z);
      continue;
    }
    auto unit = spec.find_unit(token);
    if (!unit) throw DomainError("unknown generator '" + token + "' at level " + std::to_string(level));
    Letter u = power < 0 ? spec.units[*unit].inverse : *unit;
    for (long long k = 0; k < (power < 0 ? -power : power); ++k) b.push_unit(u);
  }
  return {level, b.take()};
}

}  // namespace ssg
