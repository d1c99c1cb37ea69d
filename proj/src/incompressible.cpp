#include "ssg/incompressible.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "ssg/catalog.hpp"
#include "ssg/errors.hpp"

namespace ssg {

namespace {

constexpr unsigned __int128 kSat = ~static_cast<unsigned __int128>(0) >> 1;

unsigned __int128 mul_sat(unsigned __int128 a, unsigned __int128 b) {
  if (a == 0 || b == 0) return 0;
  if (a > kSat / b) return kSat;
  return a * b;
}

unsigned __int128 pow_sat(unsigned __int128 base, std::uint64_t e) {
  unsigned __int128 r = 1;
  for (std::uint64_t i = 0; i < e; ++i) {
    r = mul_sat(r, base);
    if (r == kSat) break;
  }
  return r;
}

std::uint64_t pow3(int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= 3;
  return r;
}

// Makes sure the lengths of all sections of an element of length `len` at
// `level_idx` are known.
void ensure_children(Atlas& atlas, std::size_t level_idx, int len) {
  const std::size_t next = atlas.spec().next_index(level_idx);
  const SphereTable& t = atlas.ensure(next, len);
  if (t.max_radius() < len) {
    throw TableExhausted("level table truncated at radius " + std::to_string(t.max_radius()));
  }
}

}  // namespace

int Compression::known_length(std::size_t level_idx, NodeId n) {
  if (auto len = atlas_.length(level_idx, n)) return *len;
  throw std::logic_error("section length missing below the enumerated radius");
}

int Compression::depth(std::size_t idx, NodeId n, int cap) {
  if (cap <= 0) return 0;
  auto& memo = memo_[idx];
  if (auto it = memo.find(n); it != memo.end()) {
    const int v = it->second >> 1;
    if (it->second & 1) return std::min(v, cap);
    if (v >= cap) return cap;
  }
  const int len = known_length(idx, n);
  if (len == 0) {
    memo[n] = 127 << 1;
    return cap;
  }
  ensure_children(atlas_, idx, len);
  const std::size_t next = atlas_.spec().next_index(idx);
  const ElementStore& store = atlas_.store();
  int sum = 0;
  for (int x = 0; x < atlas_.spec().degree; ++x) sum += known_length(next, store.child(n, x));
  int v = 0;
  if (sum == len) {
    int best = cap - 1;
    for (int x = 0; x < atlas_.spec().degree && best > 0; ++x) {
      best = std::min(best, depth(next, store.child(n, x), cap - 1));
    }
    v = 1 + best;
  }
  memo_[idx][n] = static_cast<std::uint8_t>(v < cap ? (v << 1) | 1 : (cap << 1));
  return v;
}

bool Compression::member(std::size_t idx, NodeId n, int k) {
  if (k <= 0) return true;
  const std::uint64_t key = (std::uint64_t{n} << 24) | (std::uint64_t{idx} << 8) | static_cast<std::uint64_t>(k);
  if (auto it = member_memo_.find(key); it != member_memo_.end()) return it->second;
  const int len = known_length(idx, n);
  bool in = true;
  if (len > 0) {
    ensure_children(atlas_, idx, len);
    const std::size_t next = atlas_.spec().next_index(idx);
    int sum = 0;
    for (int x = 0; x < atlas_.spec().degree; ++x) sum += known_length(next, atlas_.store().child(n, x));
    in = sum == len;
    for (int x = 0; in && x < atlas_.spec().degree; ++x) in = member(next, atlas_.store().child(n, x), k - 1);
  }
  if (member_memo_.size() > 8'000'000) member_memo_.clear();
  member_memo_.emplace(key, in);
  return in;
}

int Compression::section_length_sum(std::size_t idx, NodeId n, int l) {
  if (l == 0) return known_length(idx, n);
  const int len = known_length(idx, n);
  if (len == 0) return 0;
  ensure_children(atlas_, idx, len);
  const std::size_t next = atlas_.spec().next_index(idx);
  int sum = 0;
  for (int x = 0; x < atlas_.spec().degree; ++x) sum += section_length_sum(next, atlas_.store().child(n, x), l - 1);
  return sum;
}

IncompressibilityReport approximate_I_infty(Compression& c, std::size_t idx, int max_radius, int k_max) {
  Atlas& atlas = c.atlas();
  const SphereTable& table = atlas.ensure(idx, max_radius);
  if (table.max_radius() < max_radius) {
    throw TableExhausted("level table truncated at radius " + std::to_string(table.max_radius()));
  }
  IncompressibilityReport r;
  r.level_idx = idx;
  r.max_radius = max_radius;
  r.k_max = k_max;
  const std::size_t next = atlas.spec().next_index(idx);
  const int degree = atlas.spec().degree;
  for (int n = 0; n <= max_radius; ++n) {
    std::vector<std::uint64_t> counts(k_max + 2, 0);
    std::vector<std::uint8_t> depths(atlas.table(idx).spheres[n].size());
    for (std::size_t i = 0; i < depths.size(); ++i) {
      const NodeId node = atlas.table(idx).spheres[n].nodes[i];
      const int d = c.depth(idx, node, k_max + 1);
      depths[i] = static_cast<std::uint8_t>(d);
      for (int k = 0; k <= d; ++k) ++counts[k];

      // Nesting, checked against the plain definition.
      bool prev = true;
      for (int k = 1; k <= k_max + 1; ++k) {
        const bool in = c.member(idx, node, k);
        if (in && !prev) {
          r.nesting_ok = false;
          r.problems.push_back("nesting fails at n=" + std::to_string(n) + " k=" + std::to_string(k));
        }
        if (in != (d >= k)) {
          r.nesting_ok = false;
          r.problems.push_back("depth disagrees with membership at n=" + std::to_string(n));
        }
        prev = in;
        if (!in) {
          for (int k2 = k + 1; k2 <= k_max + 1; ++k2) {
            if (d >= k2) r.nesting_ok = false;
          }
          break;
        }
      }

      // Hereditary: lengths add up and sections sit one level lower.
      if (d >= 1 && n > 0) {
        int sum = 0;
        for (int x = 0; x < degree; ++x) {
          const NodeId ch = atlas.store().child(node, x);
          sum += *atlas.length(next, ch);
          if (c.depth(next, ch, d - 1) < d - 1) {
            r.hereditary_ok = false;
            r.problems.push_back("section outside I_" + std::to_string(d - 1) + " at n=" + std::to_string(n));
          }
        }
        if (sum != n) {
          r.hereditary_ok = false;
          r.problems.push_back("section lengths do not add up at n=" + std::to_string(n));
        }
      }
    }
    r.counts.push_back(std::vector<std::uint64_t>(counts.begin(), counts.end() - 1));
    r.depth.push_back(std::move(depths));
    // counts[k_max + 1] is only used for the stabilization test below.
    r.counts.back().push_back(counts[k_max + 1]);
  }
  for (int k = 0; k <= k_max; ++k) {
    bool stable = true;
    for (const auto& row : r.counts) stable &= row[k] == row[k + 1];
    if (stable) {
      r.stabilization_depth = k;
      break;
    }
  }
  for (auto& row : r.counts) row.pop_back();
  return r;
}

namespace {

class IncompressibleSearch {
 public:
  IncompressibleSearch(Atlas& atlas, int exact_radius) : atlas_(atlas), exact_radius_(exact_radius) {}

  // |g| = m and g in I_k, for a word with exactly m units.
  bool test(std::size_t idx, const Word& w, int m, int k) {
    if (m == 0) return true;
    const NodeId node = atlas_.store().intern(idx, w);
    const std::uint64_t key = (std::uint64_t{node} << 32) | (std::uint64_t{idx} << 24) |
                              (static_cast<std::uint64_t>(k) << 16) | static_cast<std::uint64_t>(m);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool ok;
    if (k == 0) {
      ok = length_is(idx, node, m);
    } else {
      const FamilySpec& spec = atlas_.spec();
      const Decomposition d = decompose(spec, idx, w);
      std::size_t sum = 0;
      for (const Word& s : d.sections) sum += s.units();
      ok = sum == static_cast<std::size_t>(m);
      const std::size_t next = spec.next_index(idx);
      for (std::size_t x = 0; ok && x < d.sections.size(); ++x) {
        ok = test(next, d.sections[x], static_cast<int>(d.sections[x].units()), k - 1);
      }
    }
    memo_.emplace(key, ok);
    return ok;
  }

 private:
  int radius(std::size_t idx) {
    const SphereTable& t = atlas_.ensure(idx, exact_radius_);
    return t.max_radius();
  }

  // The word has m units, so |g| <= m; decides |g| = m.
  bool length_is(std::size_t idx, NodeId node, int m) {
    const int r = radius(idx);
    if (auto len = atlas_.length(idx, node)) return *len == m;
    if (r >= m) return false;
    if (lower_bound(idx, node, 8) >= m) return true;
    throw Undetermined("cannot decide a section length beyond radius " + std::to_string(r));
  }

  int lower_bound(std::size_t idx, NodeId node, int budget) {
    const int r = radius(idx);
    if (auto len = atlas_.length(idx, node)) return *len;
    const std::uint64_t key = (std::uint64_t{node} << 8) | idx;
    if (auto it = lb_memo_.find(key); it != lb_memo_.end()) return it->second;
    int lb = r + 1;
    if (budget > 0) {
      const std::size_t next = atlas_.spec().next_index(idx);
      int sum = 0;
      for (int x = 0; x < atlas_.spec().degree; ++x) sum += lower_bound(next, atlas_.store().child(node, x), budget - 1);
      lb = std::max(lb, sum);
    }
    lb_memo_.emplace(key, lb);
    return lb;
  }

  Atlas& atlas_;
  int exact_radius_;
  std::unordered_map<std::uint64_t, bool> memo_;
  std::unordered_map<std::uint64_t, int> lb_memo_;
};

}  // namespace

IncompressibleSpheres enumerate_incompressible(Atlas& atlas, std::size_t idx, int k, int max_radius,
                                               int exact_radius) {
  const FamilySpec& spec = atlas.spec();
  IncompressibleSearch search(atlas, exact_radius);
  IncompressibleSpheres out;
  out.level_idx = idx;
  out.k = k;
  std::unordered_set<NodeId> seen;
  const LevelSpec& lvl = spec.level(idx);

  Sphere s0;
  for (Letter z : lvl.zero_subgroup) {
    s0.letters.push_back(z);
    s0.parent.push_back(0);
    s0.nodes.push_back(atlas.store().rooted(z));
    seen.insert(s0.nodes.back());
  }
  out.spheres.push_back(std::move(s0));

  WordBuilder b(spec);
  for (int n = 1; n <= max_radius; ++n) {
    const Sphere& prev = out.spheres.back();
    Sphere next;
    next.radius = n;
    for (std::size_t p = 0; p < prev.size(); ++p) {
      for (Letter u = 0; u < spec.unit_count(); ++u) {
        for (Letter z : lvl.zero_subgroup) {
          b.append(std::span<const Letter>(prev.letters.data() + p * prev.stride(), prev.stride()));
          b.push_unit(u);
          b.push_zero(z);
          if (b.units() < static_cast<std::size_t>(n)) {
            b.clear();
            continue;
          }
          Word w = b.take();
          const NodeId node = atlas.store().intern(idx, w);
          if (seen.count(node)) continue;
          ++out.candidates_tested;
          if (!search.test(idx, w, n, k)) continue;
          seen.insert(node);
          next.letters.insert(next.letters.end(), w.letters().begin(), w.letters().end());
          next.parent.push_back(static_cast<std::uint32_t>(p));
          next.nodes.push_back(node);
        }
      }
    }
    out.spheres.push_back(std::move(next));
  }
  return out;
}

bool geodesic_in_I(Atlas& atlas, std::size_t idx, const Word& w, int k, int exact_radius) {
  IncompressibleSearch search(atlas, exact_radius);
  return search.test(idx, w, static_cast<int>(w.units()), k);
}

LevelFunction level_function(Compression& c, std::size_t idx, int r, int k_max) {
  Atlas& atlas = c.atlas();
  LevelFunction lf;
  int best = INT_MAX;
  bool all_deeper = true;  // every element of the ball also lies in I_{K+1}
  for (int n = 1; n <= r; ++n) {
    const SphereTable& t = atlas.ensure(idx, n);
    if (t.max_radius() < n) throw TableExhausted("level table truncated at radius " + std::to_string(t.max_radius()));
    lf.searched_radius = n;
    const std::size_t size = t.spheres[n].size();
    for (std::size_t i = 0; i < size; ++i) {
      const int d = c.depth(idx, atlas.table(idx).spheres[n].nodes[i], k_max + 1);
      if (d < k_max) best = std::min(best, d);
      if (d <= k_max) all_deeper = false;
      if (best == 0) {
        lf.value = 1;
        lf.early_exit = true;
        return lf;
      }
    }
  }
  if (best != INT_MAX) {
    lf.value = best + 1;
    return lf;
  }
  if (!all_deeper) {
    throw Undetermined("no element of the ball lies outside I_" + std::to_string(k_max) +
                       ", and I_" + std::to_string(k_max) + " has not stabilized on it");
  }
  lf.value = 1;
  lf.empty_family = true;
  return lf;
}

int uniform_compression_level(Compression& c, std::size_t idx, int r, int k_max) {
  Atlas& atlas = c.atlas();
  const SphereTable& t = atlas.ensure(idx, r);
  if (t.max_radius() < r) throw TableExhausted("level table truncated at radius " + std::to_string(t.max_radius()));
  int level = 1;
  for (int n = 1; n <= r; ++n) {
    for (NodeId node : atlas.table(idx).spheres[n].nodes) {
      const int d = c.depth(idx, node, k_max);
      if (d < k_max) level = std::max(level, d + 1);
    }
  }
  return level;
}

PowerFit fit_power_law(const std::vector<std::uint64_t>& counts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  PowerFit f;
  for (std::size_t n = 2; n < counts.size(); ++n) {
    if (counts[n] == 0) continue;
    const double x = std::log(static_cast<double>(n));
    const double y = std::log(static_cast<double>(counts[n]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++f.points;
  }
  if (f.points >= 2) {
    const double p = f.points;
    f.delta = (p * sxy - sx * sy) / (p * sxx - sx * sx);
    f.log_c = (sy - f.delta * sx) / p;
  } else if (f.points == 1) {
    f.log_c = sy;
  }
  return f;
}

TernaryGeodesicData extract_ternary_data(const FamilySpec& spec, std::size_t idx, const Word& w) {
  if (!is_ternary_spinal(spec)) throw DomainError(spec.name + " is not a ternary spinal group");
  (void)idx;
  const Perm a = Perm::cycle(3, std::vector<int>{1, 2, 3});
  auto exponent = [&](Letter z) {
    Perm p(3);
    for (int k = 0; k < 3; ++k) {
      if (p == spec.zero_perm(z)) return k;
      p = p * a;
    }
    throw DomainError("rooted letter outside <a>");
  };
  TernaryGeodesicData t;
  const std::size_t n = w.units();
  int acc = 0;
  for (std::size_t j = 0; j < n; ++j) {
    acc = (acc + exponent(w.zero_at(j))) % 3;
    t.c.push_back(acc);
    t.beta.push_back(spec.units[w.unit_at(j)].name);
  }
  t.s = (acc + exponent(w.zero_at(n))) % 3;
  for (std::size_t j = 1; j < n; ++j) t.derivative.push_back(exponent(w.zero_at(j)));
  for (std::size_t j = 0; j < t.derivative.size(); ++j) {
    if (t.derivative[j] == 0) t.two_run_law = false;
    if (j + 1 < t.derivative.size() && t.derivative[j] == 1 && t.derivative[j + 1] == 2) t.two_run_law = false;
  }
  if (t.two_run_law && n > 0) {
    auto it = std::find(t.derivative.begin(), t.derivative.end(), 1);
    t.m_c = it == t.derivative.end() ? static_cast<int>(n) : static_cast<int>(it - t.derivative.begin()) + 1;
  }
  return t;
}

TernaryAudit audit_ternary(const FamilySpec& spec, std::size_t idx, const std::vector<Sphere>& spheres,
                           const std::vector<std::vector<std::uint8_t>>* depth, int k) {
  TernaryAudit a;
  a.applicable = is_ternary_spinal(spec);
  if (!a.applicable) return a;
  for (std::size_t n = 0; n < spheres.size(); ++n) {
    const Sphere& s = spheres[n];
    for (std::size_t i = 0; i < s.size(); ++i) {
      const bool law = extract_ternary_data(spec, idx, s.word(i)).two_run_law;
      const bool in = depth == nullptr || (*depth)[n][i] >= k;
      if (in) {
        ++a.checked;
        if (!law) ++a.law_violations;
      }
      if (!law) {
        if (in) {
          ++a.converse_violations;
        } else {
          ++a.violators_outside;
        }
      }
    }
  }
  return a;
}

WindowAudit audit_ternary_windows(Atlas& atlas, std::size_t idx, int k, int exact_radius) {
  const FamilySpec& spec = atlas.spec();
  if (!is_ternary_spinal(spec)) throw DomainError(spec.name + " is not a ternary spinal group");
  IncompressibleSearch search(atlas, exact_radius);
  const auto& zeros = spec.level(idx).zero_subgroup;
  const Letter units = static_cast<Letter>(spec.unit_count());
  WindowAudit a;
  std::vector<Letter> w(7);
  for (Letter z0 : zeros)
    for (Letter z1 : zeros)
      for (Letter z2 : zeros)
        for (Letter z3 : zeros)
          for (Letter u1 = 0; u1 < units; ++u1)
            for (Letter u2 = 0; u2 < units; ++u2)
              for (Letter u3 = 0; u3 < units; ++u3) {
                if (z1 == 0 || z2 == 0) continue;  // not reduced
                const Word word(std::vector<Letter>{z0, u1, z1, u2, z2, u3, z3});
                ++a.words;
                if (!search.test(idx, word, 3, k)) continue;
                ++a.in_I;
                if (!extract_ternary_data(spec, idx, word).two_run_law) ++a.violations;
              }
  return a;
}

BoundCheck check_polynomial_bound(const std::vector<std::uint64_t>& counts, int l, int b_size) {
  BoundCheck bc;
  bc.l = l;
  bc.exponent = static_cast<int>((pow3(l + 2) - 1) / 2);
  bc.c_l = mul_sat(pow_sat(3, pow3(l + 2) - 1), pow_sat(static_cast<unsigned>(b_size - 1), (pow3(l + 1) - 1) / 2));
  for (std::size_t n = 1; n < counts.size(); ++n) {
    const unsigned __int128 bound = mul_sat(bc.c_l, pow_sat(n, static_cast<std::uint64_t>(bc.exponent)));
    const bool holds = counts[n] <= bound;
    bc.rows.push_back({static_cast<int>(n), counts[n], bound, holds});
    bc.holds &= holds;
  }
  return bc;
}

Factorizations::Factorizations(Compression& c, std::size_t idx, int radius, int k)
    : c_(c), idx_(idx), radius_(radius), k_(k) {
  Atlas& atlas = c.atlas();
  const SphereTable& t = atlas.ensure(idx, radius);
  if (t.max_radius() < radius) throw TableExhausted("level table truncated at radius " + std::to_string(t.max_radius()));
  const FamilySpec& spec = atlas.spec();

  std::unordered_map<NodeId, Ref> where;
  std::vector<std::vector<std::uint32_t>> in_k(radius + 1);
  for (int n = 0; n <= radius; ++n) {
    const Sphere& s = atlas.table(idx).spheres[n];
    for (std::size_t i = 0; i < s.size(); ++i) {
      where.emplace(s.nodes[i], Ref{n, static_cast<std::uint32_t>(i)});
      if (n > 0 && c.depth(idx, s.nodes[i], k) >= k) in_k[n].push_back(static_cast<std::uint32_t>(i));
    }
    value_.emplace_back(s.size(), INT_MAX);
    prefix_.emplace_back(s.size());
    last_.emplace_back(s.size());
  }
  const Sphere& s0 = atlas.table(idx).spheres[0];
  for (std::size_t i = 0; i < s0.size(); ++i) value_[0][i] = s0.nodes[i] == ElementStore::identity() ? 0 : 1;

  WordBuilder b(spec);
  for (int nf = 0; nf < radius; ++nf) {
    const Sphere& sf = atlas.table(idx).spheres[nf];
    for (std::size_t fi = 0; fi < sf.size(); ++fi) {
      const int base = nf == 0 ? 0 : value_[nf][fi];
      if (base == INT_MAX) continue;
      for (int nh = 1; nf + nh <= radius; ++nh) {
        const Sphere& sh = atlas.table(idx).spheres[nh];
        for (std::uint32_t hi : in_k[nh]) {
          b.append(std::span<const Letter>(sf.letters.data() + fi * sf.stride(), sf.stride()));
          b.append(std::span<const Letter>(sh.letters.data() + hi * sh.stride(), sh.stride()));
          ++tested_;
          if (b.units() < static_cast<std::size_t>(nf + nh)) {
            b.clear();
            continue;
          }
          const NodeId g = atlas.store().intern(idx, b.take());
          const Ref at = where.at(g);
          if (at.n != nf + nh) continue;
          if (base + 1 < value_[at.n][at.i]) {
            value_[at.n][at.i] = base + 1;
            prefix_[at.n][at.i] = Ref{nf, static_cast<std::uint32_t>(fi)};
            last_[at.n][at.i] = Ref{nh, hi};
          }
        }
      }
    }
  }
}

std::vector<Word> Factorizations::factors(int n, std::size_t i) const {
  const Atlas& atlas = c_.atlas();
  const FamilySpec& spec = atlas.spec();
  if (value_[n][i] == INT_MAX) throw DomainError("element has no factorization within the ball");
  std::vector<Word> out;
  Ref cur{n, static_cast<std::uint32_t>(i)};
  while (cur.n > 0) {
    const Ref h = last_[cur.n][cur.i];
    out.push_back(atlas.table(idx_).spheres[h.n].word(h.i));
    cur = prefix_[cur.n][cur.i];
  }
  std::reverse(out.begin(), out.end());
  const Sphere& s0 = atlas.table(idx_).spheres[0];
  if (s0.nodes[cur.i] != ElementStore::identity()) {
    const Word z = s0.word(cur.i);
    if (out.empty()) {
      out.push_back(z);
    } else {
      WordBuilder b(spec);
      b.append(z);
      b.append(out.front());
      out.front() = b.take();
    }
  }
  return out;
}

}  // namespace ssg
