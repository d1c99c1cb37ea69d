#include "ssg/perm.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ssg {

Perm::Perm(int degree) {
  if (degree < 1 || degree > kMaxDegree) {
    throw std::invalid_argument("permutation degree out of range: " +
                                std::to_string(degree));
  }
  degree_ = static_cast<std::uint8_t>(degree);
  for (int i = 0; i < degree; ++i) images_[i] = static_cast<std::uint8_t>(i);
}

Perm Perm::from_one_line(std::span<const int> images) {
  Perm p(static_cast<int>(images.size()));
  std::vector<bool> seen(images.size(), false);
  for (std::size_t i = 0; i < images.size(); ++i) {
    int y = images[i] - 1;
    if (y < 0 || y >= static_cast<int>(images.size()) || seen[y]) {
      throw std::invalid_argument("not a permutation in one-line notation");
    }
    seen[y] = true;
    p.images_[i] = static_cast<std::uint8_t>(y);
  }
  return p;
}

Perm Perm::cycle(int degree, std::span<const int> points) {
  Perm p(degree);
  for (std::size_t i = 0; i < points.size(); ++i) {
    int from = points[i] - 1;
    int to = points[(i + 1) % points.size()] - 1;
    if (from < 0 || from >= degree || to < 0 || to >= degree) {
      throw std::invalid_argument("cycle point out of range");
    }
    p.images_[from] = static_cast<std::uint8_t>(to);
  }
  std::vector<int> check(p.one_line());
  std::sort(check.begin(), check.end());
  for (int i = 0; i < degree; ++i) {
    if (check[i] != i + 1) throw std::invalid_argument("cycle repeats a point");
  }
  return p;
}

Perm Perm::operator*(const Perm& rhs) const {
  if (degree_ != rhs.degree_) throw std::invalid_argument("degree mismatch");
  Perm r(*this);
  for (int i = 0; i < degree_; ++i) r.images_[i] = images_[rhs.images_[i]];
  return r;
}

Perm Perm::inverse() const {
  Perm r(*this);
  for (int i = 0; i < degree_; ++i) r.images_[images_[i]] = static_cast<std::uint8_t>(i);
  return r;
}

Perm Perm::pow(long long e) const {
  Perm base = e < 0 ? inverse() : *this;
  unsigned long long k = e < 0 ? static_cast<unsigned long long>(-e) : e;
  Perm result(degree_);
  while (k) {
    if (k & 1) result = result * base;
    base = base * base;
    k >>= 1;
  }
  return result;
}

bool Perm::is_identity() const {
  for (int i = 0; i < degree_; ++i) {
    if (images_[i] != i) return false;
  }
  return true;
}

int Perm::order() const {
  int ord = 1;
  std::vector<bool> seen(degree_, false);
  for (int i = 0; i < degree_; ++i) {
    if (seen[i]) continue;
    int len = 0;
    for (int j = i; !seen[j]; j = images_[j]) {
      seen[j] = true;
      ++len;
    }
    ord = std::lcm(ord, len);
  }
  return ord;
}

std::uint32_t Perm::code() const {
  std::uint32_t c = 0;
  for (int i = 0; i < degree_; ++i) c = c * kMaxDegree + images_[i];
  return c;
}

Perm Perm::from_code(int degree, std::uint32_t code) {
  Perm p(degree);
  for (int i = degree; i-- > 0;) {
    p.images_[i] = static_cast<std::uint8_t>(code % kMaxDegree);
    code /= kMaxDegree;
  }
  return p;
}

std::vector<int> Perm::one_line() const {
  std::vector<int> out(degree_);
  for (int i = 0; i < degree_; ++i) out[i] = images_[i] + 1;
  return out;
}

std::string Perm::to_string() const {
  std::ostringstream os;
  std::vector<bool> seen(degree_, false);
  bool any = false;
  for (int i = 0; i < degree_; ++i) {
    if (seen[i] || images_[i] == i) continue;
    any = true;
    os << '(';
    for (int j = i; !seen[j]; j = images_[j]) {
      seen[j] = true;
      if (j != i) os << ' ';
      os << j + 1;
    }
    os << ')';
  }
  if (!any) os << "()";
  return os.str();
}

std::vector<Perm> generate_group(std::span<const Perm> gens, int degree) {
  std::set<Perm> group{Perm(degree)};
  std::vector<Perm> frontier{Perm(degree)};
  while (!frontier.empty()) {
    std::vector<Perm> next;
    for (const Perm& g : frontier) {
      for (const Perm& s : gens) {
        Perm h = g * s;
        if (group.insert(h).second) next.push_back(h);
      }
    }
    frontier = std::move(next);
  }
  return {group.begin(), group.end()};
}

std::vector<int> orbit(std::span<const Perm> gens, int degree, int point) {
  std::vector<bool> seen(degree, false);
  std::vector<int> out{point};
  seen[point] = true;
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (const Perm& s : gens) {
      int y = s(out[i]);
      if (!seen[y]) {
        seen[y] = true;
        out.push_back(y);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool is_transitive(std::span<const Perm> gens, int degree) {
  return static_cast<int>(orbit(gens, degree, 0).size()) == degree;
}

}  // namespace ssg
