#include "ssg/growth.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "ssg/errors.hpp"

namespace ssg {

namespace {

constexpr unsigned __int128 kSat = ~static_cast<unsigned __int128>(0) >> 1;

unsigned __int128 mul_sat(unsigned __int128 a, unsigned __int128 b) {
  if (a == 0 || b == 0) return 0;
  if (a > kSat / b) return kSat;
  return a * b;
}

unsigned __int128 add_sat(unsigned __int128 a, unsigned __int128 b) {
  return a > kSat - b ? kSat : a + b;
}

constexpr std::size_t kBlock = std::size_t{1} << 15;

}  // namespace

Word Sphere::word(std::size_t i) const {
  const std::size_t s = stride();
  return Word(std::vector<Letter>(letters.begin() + static_cast<std::ptrdiff_t>(i * s),
                                  letters.begin() + static_cast<std::ptrdiff_t>((i + 1) * s)));
}

std::vector<std::uint64_t> SphereTable::sphere_sizes() const {
  std::vector<std::uint64_t> out;
  for (const auto& s : spheres) out.push_back(s.size());
  return out;
}

std::vector<std::uint64_t> SphereTable::gamma() const {
  std::vector<std::uint64_t> out;
  std::uint64_t acc = 0;
  for (const auto& s : spheres) out.push_back(acc += s.size());
  return out;
}

Atlas::Atlas(const FamilySpec& spec, GrowthOptions options)
    : spec_(spec),
      options_(options),
      store_(std::make_unique<ElementStore>(spec, options.identity_budget)),
      tables_(spec.level_count()),
      lengths_(spec.level_count()) {
  for (std::size_t i = 0; i < tables_.size(); ++i) tables_[i].level_idx = i;
}

bool Atlas::has_radius(std::size_t level_idx, int radius) const {
  return tables_.at(level_idx).max_radius() >= radius;
}

const SphereTable& Atlas::ensure(std::size_t level_idx, int radius) {
  SphereTable& t = tables_.at(level_idx);
  while (t.max_radius() < radius && !t.truncated) extend(level_idx);
  return t;
}

std::optional<int> Atlas::length(std::size_t level_idx, NodeId n) const {
  const auto& l = lengths_[level_idx];
  if (n < l.size() && l[n] >= 0) return l[n];
  return std::nullopt;
}

void Atlas::record(std::size_t level_idx, NodeId n, int len) {
  auto& l = lengths_[level_idx];
  if (n >= l.size()) l.resize(std::max<std::size_t>(store_->node_count(), n + 1), -1);
  l[n] = static_cast<std::int8_t>(len);
}

int Atlas::pseudolength(const Element& g, int cap) {
  const std::size_t idx = spec_.level_index(g.level);
  const NodeId n = store_->intern(idx, g.word);
  for (;;) {
    if (auto len = length(idx, n)) return *len;
    const SphereTable& t = tables_[idx];
    if (t.max_radius() >= cap || t.truncated) {
      throw TableExhausted("pseudolength exceeds the enumerated radius " + std::to_string(t.max_radius()));
    }
    extend(idx);
  }
}

void Atlas::adopt(SphereTable table) {
  const std::size_t idx = table.level_idx;
  lengths_[idx].clear();
  for (auto& sphere : table.spheres) {
    sphere.nodes.resize(sphere.parent.size());
    for (std::size_t i = 0; i < sphere.parent.size(); ++i) {
      sphere.nodes[i] = store_->intern(idx, sphere.word(i));
      record(idx, sphere.nodes[i], sphere.radius);
    }
  }
  tables_[idx] = std::move(table);
}

void Atlas::extend(std::size_t idx) {
  SphereTable& t = tables_[idx];
  const LevelSpec& lvl = spec_.level(idx);
  std::uint64_t total = 0;
  for (const auto& s : t.spheres) total += s.size();

  if (t.spheres.empty()) {
    Sphere s0;
    for (Letter z : lvl.zero_subgroup) {
      s0.letters.push_back(z);
      s0.parent.push_back(0);
      s0.nodes.push_back(store_->rooted(z));
      record(idx, s0.nodes.back(), 0);
    }
    t.spheres.push_back(std::move(s0));
    return;
  }

  const int n = static_cast<int>(t.spheres.size());
  const Sphere& prev = t.spheres.back();
  Sphere next;
  next.radius = n;
  const std::size_t stride = next.stride();
  const std::size_t units = spec_.unit_count();
  const std::size_t zeros = lvl.zero_subgroup.size();
  const std::size_t per_parent = units * zeros;
  const std::size_t candidates = prev.size() * per_parent;
  const int threads = std::max(1, options_.threads);

  std::vector<Letter> buf(kBlock * stride);
  std::vector<NodeId> ids(kBlock);
  for (std::size_t start = 0; start < candidates && !t.truncated; start += kBlock) {
    const std::size_t count = std::min(kBlock, candidates - start);
    auto work = [&](std::size_t lo, std::size_t hi) {
      WordBuilder b(spec_);
      for (std::size_t k = lo; k < hi; ++k) {
        const std::size_t c = start + k;
        const std::size_t parent = c / per_parent;
        const Letter u = static_cast<Letter>((c % per_parent) / zeros);
        const Letter z = lvl.zero_subgroup[c % zeros];
        b.append(std::span<const Letter>(prev.letters.data() + parent * prev.stride(), prev.stride()));
        b.push_unit(u);
        b.push_zero(z);
        if (b.units() < static_cast<std::size_t>(n)) {
          ids[k] = 0xffffffffu;
          b.clear();
          continue;
        }
        Word w = b.take();
        std::copy(w.letters().begin(), w.letters().end(), buf.begin() + static_cast<std::ptrdiff_t>(k * stride));
        ids[k] = store_->intern(idx, w);
      }
    };
    if (threads == 1 || count < 64) {
      work(0, count);
    } else {
      std::vector<std::thread> pool;
      const std::size_t per = (count + threads - 1) / threads;
      for (int th = 0; th < threads; ++th) {
        const std::size_t lo = th * per;
        const std::size_t hi = std::min(count, lo + per);
        if (lo < hi) pool.emplace_back(work, lo, hi);
      }
      for (auto& th : pool) th.join();
    }
    // Merge in candidate order so the result does not depend on scheduling.
    for (std::size_t k = 0; k < count; ++k) {
      if (ids[k] == 0xffffffffu || length(idx, ids[k])) continue;
      if (total + next.size() >= options_.max_elements) {
        t.truncated = true;
        break;
      }
      record(idx, ids[k], n);
      next.nodes.push_back(ids[k]);
      next.parent.push_back(static_cast<std::uint32_t>((start + k) / per_parent));
      next.letters.insert(next.letters.end(), buf.begin() + static_cast<std::ptrdiff_t>(k * stride),
                          buf.begin() + static_cast<std::ptrdiff_t>((k + 1) * stride));
    }
  }
  t.spheres.push_back(std::move(next));
}

KappaEstimate kappa_estimates(const std::vector<std::uint64_t>& sizes) {
  KappaEstimate k;
  k.root.assign(sizes.size(), 0.0);
  k.ratio.assign(sizes.size() > 0 ? sizes.size() - 1 : 0, 0.0);
  for (std::size_t n = 1; n < sizes.size(); ++n) {
    k.root[n] = std::pow(static_cast<double>(sizes[n]), 1.0 / static_cast<double>(n));
  }
  for (std::size_t n = 0; n + 1 < sizes.size(); ++n) {
    k.ratio[n] = sizes[n] ? static_cast<double>(sizes[n + 1]) / static_cast<double>(sizes[n]) : 0.0;
  }
  return k;
}

bool check_submultiplicative(const std::vector<std::uint64_t>& gamma) {
  for (std::size_t n = 0; n < gamma.size(); ++n) {
    for (std::size_t m = 0; n + m < gamma.size(); ++m) {
      if (static_cast<unsigned __int128>(gamma[n + m]) >
          static_cast<unsigned __int128>(gamma[n]) * gamma[m]) {
        return false;
      }
    }
  }
  return true;
}

WreathCheck check_wreath_inequality(const std::vector<std::uint64_t>& gamma_nu,
                                    const std::vector<std::uint64_t>& gamma_next, int degree, int n) {
  if (n < 0 || static_cast<std::size_t>(n) >= gamma_nu.size() ||
      static_cast<std::size_t>(n) >= gamma_next.size()) {
    throw TableExhausted("wreath inequality needs both tables to radius " + std::to_string(n));
  }
  // conv[s] = sum over r_1 + ... + r_k = s of prod gamma_next(r_i).
  std::vector<unsigned __int128> conv(n + 1);
  for (int s = 0; s <= n; ++s) conv[s] = gamma_next[s];
  for (int k = 2; k <= degree; ++k) {
    std::vector<unsigned __int128> out(n + 1, 0);
    for (int s = 0; s <= n; ++s) {
      for (int r = 0; r <= s; ++r) out[s] = add_sat(out[s], mul_sat(conv[s - r], gamma_next[r]));
    }
    conv = std::move(out);
  }
  unsigned __int128 total = 0;
  for (int s = 0; s <= n; ++s) total = add_sat(total, conv[s]);
  unsigned __int128 fact = 1;
  for (int k = 2; k <= degree; ++k) fact *= k;
  WreathCheck w;
  w.lhs = gamma_nu[n];
  w.rhs = mul_sat(fact, total);
  w.holds = w.lhs <= w.rhs;
  return w;
}

unsigned __int128 ball_bound(std::uint64_t g0, std::uint64_t s1, int n) {
  unsigned __int128 v = g0;
  for (int i = 0; i < n; ++i) v = mul_sat(mul_sat(v, g0), s1);
  return v;
}

std::string to_string_u128(unsigned __int128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s += static_cast<char>('0' + static_cast<int>(v % 10));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

}  // namespace ssg
