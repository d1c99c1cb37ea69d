#include "ssg/catalog.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

#include "ssg/errors.hpp"

namespace ssg {

namespace {

Perm standard_cycle(int d) {
  std::vector<int> pts(d);
  std::iota(pts.begin(), pts.end(), 1);
  return Perm::cycle(d, pts);
}

// "a", "a^k" for powers of (1 2 ... d), otherwise z<one-line>.
std::string rooted_name(const Perm& p) {
  const Perm a = standard_cycle(p.degree());
  Perm q = a;
  for (int k = 1; k < p.degree(); ++k) {
    if (q == p) return k == 1 ? "a" : "a^" + std::to_string(k);
    q = q * a;
  }
  std::string s = "z";
  for (int v : p.one_line()) s += std::to_string(v);
  return s;
}

struct SpinalLevel {
  std::vector<Perm> a_group;
  OmegaLevel omega;
  bool operator==(const SpinalLevel&) const = default;
};

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

FamilySpec spinal(const SpinalData& data) {
  const int d = data.degree;
  if (d < 2 || d > kMaxDegree) throw DomainError("degree out of range");
  if (data.b_orders.empty()) throw DomainError("B needs at least one cyclic factor");
  for (int n : data.b_orders) {
    if (n < 2) throw DomainError("cyclic factors of B must have order >= 2");
  }
  if (data.period.empty()) throw DomainError("omega needs a nonempty period");

  SpinalInfo info;
  info.b_orders = data.b_orders;
  const int b_size = info.b_size();
  if (b_size > 4096) throw DomainError("B is too large");
  const std::size_t ngen = data.b_orders.size();

  std::vector<OmegaLevel> levels = data.preperiod;
  std::size_t pre = levels.size();
  levels.insert(levels.end(), data.period.begin(), data.period.end());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const OmegaLevel& om = levels[i];
    if (om.size() != static_cast<std::size_t>(d - 1)) {
      throw DomainError("omega at level " + std::to_string(i) + " needs d-1 homomorphisms");
    }
    for (std::size_t j = 0; j < om.size(); ++j) {
      if (om[j].size() != ngen) throw DomainError("homomorphism needs one image per generator of B");
      for (std::size_t g = 0; g < ngen; ++g) {
        if (om[j][g].degree() != d) throw DomainError("image degree mismatch");
        if (!om[j][g].pow(data.b_orders[g]).is_identity()) {
          throw CheckFailed("homomorphism", "omega_{" + std::to_string(i) + "," + std::to_string(j + 1) +
                                                "} sends a generator of order " +
                                                std::to_string(data.b_orders[g]) +
                                                " to an element of incompatible order");
        }
        for (std::size_t h = 0; h < g; ++h) {
          if (om[j][g] * om[j][h] != om[j][h] * om[j][g]) {
            throw CheckFailed("homomorphism", "images of B's generators do not commute at level " +
                                                  std::to_string(i));
          }
        }
      }
    }
  }

  // Shrink the period to its primitive length.
  {
    std::vector<OmegaLevel> per(levels.begin() + static_cast<std::ptrdiff_t>(pre), levels.end());
    const std::size_t p = per.size();
    for (std::size_t q = 1; q < p; ++q) {
      if (p % q) continue;
      bool ok = true;
      for (std::size_t i = q; i < p && ok; ++i) ok = per[i] == per[i - q];
      if (ok) {
        levels.resize(pre + q);
        break;
      }
    }
  }
  const std::size_t window = levels.size();
  info.omega = levels;  // temporary, for image()

  // Levels i >= k of an eventually periodic sequence: k..end of the window,
  // or the whole period once k is inside it.
  auto trivial_on = [&](int b, std::size_t k) {
    for (std::size_t i = k < pre ? k : pre; i < window; ++i) {
      for (int j = 0; j < d - 1; ++j) {
        if (!info.image(i, j, b).is_identity()) return false;
      }
    }
    return true;
  };
  for (std::size_t k = 0; k < window; ++k) {
    for (int b = 1; b < b_size; ++b) {
      if (trivial_on(b, k)) {
        throw CheckFailed("kernel", "the kernels of omega_{ij}, i >= " + std::to_string(k) +
                                        ", share the nontrivial element (" + join(info.coords(b)) + ")");
      }
    }
  }

  // Level k >= 1 acts at the root through the images of omega_{k-1}.
  auto a_at = [&](std::size_t k) {
    std::vector<Perm> gens;
    if (k == 0) {
      gens = data.a_generators.empty() ? std::vector<Perm>{standard_cycle(d)} : data.a_generators;
    } else {
      for (const auto& hom : levels[k - 1]) gens.insert(gens.end(), hom.begin(), hom.end());
    }
    return generate_group(gens, d);
  };
  // Levels 0..window; level window repeats level pre in omega.
  std::vector<SpinalLevel> draft;
  for (std::size_t k = 0; k <= window; ++k) {
    SpinalLevel lvl{a_at(k), levels[k < window ? k : pre]};
    if (!is_transitive(lvl.a_group, d)) {
      throw CheckFailed("transitivity", "A at level " + std::to_string(k) +
                                            " does not act transitively on {1.." + std::to_string(d) + "}");
    }
    draft.push_back(std::move(lvl));
  }
  std::vector<SpinalLevel> dpre(draft.begin(), draft.begin() + static_cast<std::ptrdiff_t>(pre + 1));
  std::vector<SpinalLevel> dper(draft.begin() + static_cast<std::ptrdiff_t>(pre + 1), draft.end());
  while (!dpre.empty() && dpre.back() == dper.back()) {
    std::rotate(dper.rbegin(), dper.rbegin() + 1, dper.rend());
    dpre.pop_back();
  }

  FamilyBuilder fb(data.name, d);
  std::vector<std::string> names = data.unit_names;
  if (!names.empty() && names.size() != static_cast<std::size_t>(b_size - 1)) {
    throw DomainError("unit_names needs |B|-1 entries");
  }
  for (int b = 1; b < b_size; ++b) {
    std::string n;
    if (!names.empty()) n = names[b - 1];
    else if (ngen == 1) n = b == 1 ? "b" : "b^" + std::to_string(b);
    else n = "b[" + join(info.coords(b)) + "]";
    fb.add_unit(n);
  }
  for (int b = 1; b < b_size; ++b) {
    std::vector<int> c = info.coords(b);
    std::vector<int> neg(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) neg[i] = -c[i];
    fb.set_inverse(static_cast<Letter>(b - 1), static_cast<Letter>(info.index_of(neg) - 1));
    for (int e = 1; e < b_size; ++e) {
      std::vector<int> sum = c;
      std::vector<int> ce = info.coords(e);
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += ce[i];
      int s = info.index_of(sum);
      fb.add_fusion(static_cast<Letter>(b - 1), static_cast<Letter>(e - 1),
                    s == 0 ? std::nullopt : std::optional<Letter>(static_cast<Letter>(s - 1)));
    }
  }

  info.omega.clear();
  SpinalInfo scratch = info;
  auto emit = [&](const SpinalLevel& lvl, bool periodic) {
    std::size_t li = fb.add_level(periodic);
    for (const Perm& p : lvl.a_group) {
      if (!p.is_identity()) fb.add_zero_generator(periodic, li, rooted_name(p), p);
    }
    scratch.omega = {lvl.omega};
    for (int b = 1; b < b_size; ++b) {
      std::vector<RawWord> children(d);
      for (int j = 0; j < d - 1; ++j) {
        Perm img = scratch.image(0, j, b);
        if (!img.is_identity()) children[j].push_back(RawLetter::of_perm(img));
      }
      children[d - 1].push_back(RawLetter::of_unit(static_cast<Letter>(b - 1)));
      fb.set_unit_rule(periodic, li, static_cast<Letter>(b - 1), Perm(d), std::move(children));
    }
    info.omega.push_back(lvl.omega);
  };
  for (const auto& l : dpre) emit(l, false);
  for (const auto& l : dper) emit(l, true);
  fb.set_spinal(info);
  return fb.build();
}

namespace {

bool is_prime(int p) {
  if (p < 2) return false;
  for (int q = 2; q * q <= p; ++q) {
    if (p % q == 0) return false;
  }
  return true;
}

}  // namespace

FamilySpec grigorchuk_p(int p, const std::vector<int>& k_pre, const std::vector<int>& k_per) {
  if (!is_prime(p)) throw DomainError("p must be prime");
  if (p > kMaxDegree) throw DomainError("p exceeds the supported degree");
  const Perm a = standard_cycle(p);
  const Perm id(p);
  auto level = [&](int k) {
    if (k < 0 || k > p) throw DomainError("k must lie in {0..p}");
    OmegaLevel om(p - 1, Homomorphism{id, id});
    om[0] = k == p ? Homomorphism{id, a} : Homomorphism{a, a.pow(k)};
    return om;
  };
  SpinalData data;
  data.name = "grigorchuk_p(" + std::to_string(p) + ",[" + (k_pre.empty() ? "" : join(k_pre) + "|") +
              join(k_per) + "])";
  data.degree = p;
  data.b_orders = {p, p};
  for (int k : k_pre) data.preperiod.push_back(level(k));
  for (int k : k_per) data.period.push_back(level(k));
  return spinal(data);
}

FamilySpec first_grigorchuk() {
  const Perm a = standard_cycle(2);
  const Perm id(2);
  // phi_0 kills d = (0,1), phi_1 kills c = (1,1), phi_2 kills b = (1,0).
  SpinalData data;
  data.name = "first_grigorchuk";
  data.degree = 2;
  data.b_orders = {2, 2};
  data.period = {{{a, id}}, {{a, a}}, {{id, a}}};
  data.unit_names = {"b", "d", "c"};
  return spinal(data);
}

int sunic_period(int p, int m, const std::vector<int>& a) {
  if (!is_prime(p)) throw DomainError("p must be prime");
  if (m < 1) throw DomainError("m must be positive");
  if (a.size() != static_cast<std::size_t>(m - 1)) throw DomainError("sunic needs m-1 coefficients");
  using Mat = std::vector<std::vector<int>>;
  Mat rho(m, std::vector<int>(m, 0));
  rho[0][m - 1] = p - 1;
  for (int i = 1; i < m; ++i) {
    rho[i][i - 1] = 1;
    rho[i][m - 1] = ((a[i - 1] % p) + p) % p;
  }
  Mat cur = rho;
  auto is_id = [&](const Mat& x) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        if (x[i][j] != (i == j)) return false;
      }
    }
    return true;
  };
  for (int k = 1; k <= 10000; ++k) {
    if (is_id(cur)) return k;
    Mat next(m, std::vector<int>(m, 0));
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        long long s = 0;
        for (int t = 0; t < m; ++t) s += static_cast<long long>(cur[i][t]) * rho[t][j];
        next[i][j] = static_cast<int>(s % p);
      }
    }
    cur = std::move(next);
  }
  throw DomainError("order of rho exceeds 10^4");
}

FamilySpec sunic(int p, int m, const std::vector<int>& a) {
  const int period = sunic_period(p, m, a);
  if (p > kMaxDegree) throw DomainError("p exceeds the supported degree");
  auto coeff = [&](int i) { return ((a[i - 1] % p) + p) % p; };
  // Row vector r_i = phi rho^i; (r rho)_c = sum_r r_r rho_{rc}.
  std::vector<int> r(m, 0);
  r[m - 1] = 1;
  const Perm ap = standard_cycle(p);
  const Perm id(p);
  SpinalData data;
  data.name = "sunic(" + std::to_string(p) + "," + std::to_string(m) + ",[" + join(a) + "])";
  data.degree = p;
  data.b_orders.assign(m, p);
  for (int i = 0; i < period; ++i) {
    OmegaLevel om(p - 1, Homomorphism(m, id));
    for (int g = 0; g < m; ++g) om[0][g] = ap.pow(r[g]);
    data.period.push_back(om);
    std::vector<int> next(m, 0);
    for (int c = 0; c < m; ++c) {
      long long s = 0;
      if (c + 1 < m) s += r[c + 1];
      if (c == m - 1) {
        s += static_cast<long long>(r[0]) * (p - 1);
        for (int row = 1; row < m; ++row) s += static_cast<long long>(r[row]) * coeff(row);
      }
      next[c] = static_cast<int>(s % p);
    }
    r = std::move(next);
  }
  return spinal(data);
}

FamilySpec ggs(int d, const std::vector<int>& eps) {
  if (d < 2 || d > kMaxDegree) throw DomainError("degree out of range");
  if (eps.size() != static_cast<std::size_t>(d - 1)) {
    throw DomainError("eps needs d-1 = " + std::to_string(d - 1) + " entries");
  }
  std::vector<int> e(eps.size());
  int g = d;
  bool nonzero = false;
  for (std::size_t j = 0; j < eps.size(); ++j) {
    e[j] = ((eps[j] % d) + d) % d;
    g = std::gcd(g, e[j]);
    nonzero |= e[j] != 0;
  }
  if (!nonzero) throw CheckFailed("gcd", "eps must be nonzero");
  if (g != 1) {
    throw CheckFailed("gcd", "gcd(eps_1..eps_{d-1}, d) = " + std::to_string(g) + ", expected 1");
  }
  const Perm a = standard_cycle(d);
  SpinalData data;
  data.name = "ggs(" + std::to_string(d) + ",(" + join(e) + "))";
  data.degree = d;
  data.b_orders = {d};
  OmegaLevel om;
  for (int v : e) om.push_back({a.pow(v)});
  data.period = {om};
  return spinal(data);
}

FamilySpec fabrykowski_gupta() {
  FamilySpec s = ggs(3, {1, 0});
  s.name = "fabrykowski_gupta";
  return s;
}

FamilySpec nekrashevych_D(const std::vector<int>& bits_pre, const std::vector<int>& bits_per) {
  if (bits_per.empty()) throw DomainError("omega needs a nonempty period");
  for (int b : bits_pre) {
    if (b != 0 && b != 1) throw DomainError("omega entries must be 0 or 1");
  }
  for (int b : bits_per) {
    if (b != 0 && b != 1) throw DomainError("omega entries must be 0 or 1");
  }
  std::vector<int> pre = bits_pre;
  std::vector<int> per = bits_per;
  while (!pre.empty() && pre.back() == per.back()) {
    std::rotate(per.rbegin(), per.rbegin() + 1, per.rend());
    pre.pop_back();
  }
  std::string label;
  for (int b : bits_pre) label += std::to_string(b);
  if (!bits_pre.empty()) label += "(";
  for (int b : bits_per) label += std::to_string(b);
  if (!bits_pre.empty()) label += ")";
  FamilyBuilder fb("nekrashevych_D(" + label + ")", 2);
  const Letter beta = fb.add_unit("beta");
  const Letter gamma = fb.add_unit("gamma");
  fb.set_inverse(beta, beta);
  fb.set_inverse(gamma, gamma);
  const Perm alpha = Perm::cycle(2, std::vector<int>{1, 2});
  auto emit = [&](int bit, bool periodic) {
    std::size_t li = fb.add_level(periodic);
    fb.add_zero_generator(periodic, li, "alpha", alpha);
    fb.set_unit_rule(periodic, li, beta, Perm(2),
                     {{RawLetter::of_perm(alpha)}, {RawLetter::of_unit(gamma)}});
    std::vector<RawWord> g(2);
    g[bit == 0 ? 0 : 1].push_back(RawLetter::of_unit(beta));
    fb.set_unit_rule(periodic, li, gamma, Perm(2), std::move(g));
  };
  for (int b : pre) emit(b, false);
  for (int b : per) emit(b, true);
  return fb.build();
}

FamilySpec neumann6() {
  constexpr int d = 6;
  std::vector<Perm> alt;
  std::vector<int> img{1, 2, 3, 4, 5, 6};
  do {
    Perm p = Perm::from_one_line(img);
    int inversions = 0;
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) inversions += img[i] > img[j];
    }
    if (inversions % 2 == 0) alt.push_back(p);
  } while (std::next_permutation(img.begin(), img.end()));
  std::sort(alt.begin(), alt.end());

  FamilyBuilder fb("neumann6", d);
  std::map<std::pair<std::uint32_t, int>, Letter> id_of;
  std::vector<std::pair<Perm, int>> pairs;
  for (const Perm& a : alt) {
    for (int x = 0; x < d; ++x) {
      if (a(x) != x) continue;
      std::string n = "b[";
      for (int v : a.one_line()) n += std::to_string(v);
      n += "," + std::to_string(x + 1) + "]";
      id_of[{a.code(), x}] = fb.add_unit(n);
      pairs.emplace_back(a, x);
    }
  }
  std::size_t li = fb.add_level(true);
  for (std::size_t u = 0; u < pairs.size(); ++u) {
    const auto& [a, x] = pairs[u];
    const Letter self = static_cast<Letter>(u);
    fb.set_inverse(self, id_of.at({a.inverse().code(), x}));
    std::vector<RawWord> children(d);
    children[x].push_back(RawLetter::of_unit(self));
    fb.set_unit_rule(true, li, self, a, std::move(children));
    for (std::size_t v = 0; v < pairs.size(); ++v) {
      if (pairs[v].second != x) continue;
      Perm prod = a * pairs[v].first;
      fb.add_fusion(self, static_cast<Letter>(v),
                    prod.is_identity() ? std::nullopt : std::optional<Letter>(id_of.at({prod.code(), x})));
    }
  }
  return fb.build();
}

std::vector<std::pair<std::string, FamilySpec>> standard_catalog() {
  std::vector<std::pair<std::string, FamilySpec>> out;
  out.emplace_back("first_grigorchuk", first_grigorchuk());
  out.emplace_back("fabrykowski_gupta", fabrykowski_gupta());
  out.emplace_back("ggs(3,(1,1))", ggs(3, {1, 1}));
  out.emplace_back("grigorchuk_p(3,[0,3])", grigorchuk_p(3, {}, {0, 3}));
  out.emplace_back("sunic(2,2,[1])", sunic(2, 2, {1}));
  out.emplace_back("sunic(3,1,[])", sunic(3, 1, {}));
  for (int a1 = 0; a1 < 3; ++a1) {
    out.emplace_back("sunic(3,2,[" + std::to_string(a1) + "])", sunic(3, 2, {a1}));
  }
  out.emplace_back("nekrashevych_D(0)", nekrashevych_D({}, {0}));
  out.emplace_back("nekrashevych_D(1)", nekrashevych_D({}, {1}));
  out.emplace_back("nekrashevych_D(01)", nekrashevych_D({}, {0, 1}));
  out.emplace_back("neumann6", neumann6());
  return out;
}

bool is_ternary_spinal(const FamilySpec& spec) {
  if (!spec.spinal || spec.degree != 3) return false;
  const Perm a = standard_cycle(3);
  const std::vector<Perm> group{Perm(3), a, a * a};
  std::vector<Perm> sorted_group = group;
  std::sort(sorted_group.begin(), sorted_group.end());
  const SpinalInfo& info = *spec.spinal;
  for (std::size_t k = 0; k < spec.level_count(); ++k) {
    std::vector<Perm> g0;
    for (Letter z : spec.level(k).zero_subgroup) g0.push_back(spec.zero_perm(z));
    std::sort(g0.begin(), g0.end());
    if (g0 != sorted_group) return false;
    bool onto = false;
    for (const Perm& img : info.omega[k][0]) {
      if (std::find(group.begin(), group.end(), img) == group.end()) return false;
      onto |= !img.is_identity();
    }
    for (const Perm& img : info.omega[k][1]) {
      if (!img.is_identity()) return false;
    }
    if (!onto) return false;
  }
  return true;
}

std::vector<int> kernel_depths(const FamilySpec& spec) {
  std::vector<int> out(spec.level_count(), -1);
  if (!spec.spinal) return out;
  const SpinalInfo& info = *spec.spinal;
  const int b_size = info.b_size();
  for (std::size_t k = 0; k < spec.level_count(); ++k) {
    std::vector<bool> alive(b_size, true);
    std::size_t idx = k;
    for (std::size_t l = 0; l <= spec.level_count(); ++l) {
      for (int b = 1; b < b_size; ++b) {
        for (std::size_t j = 0; j + 1 < static_cast<std::size_t>(spec.degree); ++j) {
          if (!info.image(idx, j, b).is_identity()) alive[b] = false;
        }
      }
      if (std::none_of(alive.begin() + 1, alive.end(), [](bool v) { return v; })) {
        out[k] = static_cast<int>(l);
        break;
      }
      idx = spec.next_index(idx);
    }
  }
  return out;
}

}  // namespace ssg
