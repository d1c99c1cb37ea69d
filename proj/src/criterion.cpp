#include "ssg/criterion.hpp"

#include <climits>
#include <cmath>
#include <numeric>

#include "ssg/catalog.hpp"
#include "ssg/errors.hpp"

namespace ssg {

std::string Rational::to_string() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Rational parse_rational(const std::string& text) {
  auto digits = [&](const std::string& s) {
    if (s.empty() || s.size() > 15 || s.find_first_not_of("0123456789") != std::string::npos) {
      throw DomainError("not a rational number: '" + text + "'");
    }
    return std::stoll(s);
  };
  Rational r;
  if (auto slash = text.find('/'); slash != std::string::npos) {
    r.num = digits(text.substr(0, slash));
    r.den = digits(text.substr(slash + 1));
    if (r.den == 0) throw DomainError("zero denominator in '" + text + "'");
  } else if (auto dot = text.find('.'); dot != std::string::npos) {
    const std::string frac = text.substr(dot + 1);
    r.num = digits(text.substr(0, dot).empty() ? "0" : text.substr(0, dot));
    r.den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) r.den *= 10;
    r.num = r.num * r.den + digits(frac);
  } else {
    r.num = digits(text);
  }
  const std::int64_t g = std::gcd(r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  return r;
}

Rational parse_epsilon(const std::string& text) {
  const Rational e = parse_rational(text);
  if (e.num <= 0 || 2 * e.num >= e.den) {
    throw DomainError("epsilon must lie strictly between 0 and 1/2, got " + e.to_string());
  }
  return e;
}

bool is_large(int N, int n, Rational e) { return N * e.den > e.num * n; }
bool is_small_factor(int length, Rational e) { return length * e.num <= 6 * e.den; }
bool beyond_threshold(int n, Rational e) { return n * e.num > 3 * e.den; }

bool small_factor_bound_holds(std::size_t small, int n, Rational e) {
  return static_cast<std::int64_t>(small) * 8 * e.den > e.num * n;
}

bool level_reduction_holds(int sum, int n, Rational e) {
  return 8 * static_cast<std::int64_t>(sum) * e.den < (8 * e.den - e.num) * n;
}

PairedFactors pair_factors(Compression& c, std::size_t idx, const std::vector<Word>& factors, Rational eps, int k) {
  Atlas& atlas = c.atlas();
  PairedFactors p;
  WordBuilder b(atlas.spec());
  for (std::size_t i = 0; i + 1 < factors.size(); i += 2) {
    b.append(factors[i]);
    b.append(factors[i + 1]);
    const NodeId h = atlas.store().intern(idx, b.take());
    const int len = static_cast<int>(factors[i].units() + factors[i + 1].units());
    p.lengths.push_back(len);
    (is_small_factor(len, eps) ? p.small : p.large).push_back(i / 2 + 1);
    p.depths.push_back(c.depth(idx, h, k));
  }
  return p;
}

CriterionReport run_criterion(Compression& c, std::size_t idx, int max_radius, int k, Rational eps) {
  Atlas& atlas = c.atlas();
  CriterionReport r;
  r.epsilon = eps;
  r.level_idx = idx;
  r.max_radius = max_radius;
  r.k = k;
  r.small_radius = static_cast<int>(6 * eps.den / eps.num);
  r.level = level_function(c, idx, r.small_radius, k);
  r.uniform_level = uniform_compression_level(c, idx, std::min(r.small_radius, max_radius), k);
  const int l = r.level.value;

  Factorizations f(c, idx, max_radius, k);
  r.insufficient_n = !beyond_threshold(max_radius, eps);
  for (int n = 0; n <= max_radius; ++n) {
    const Sphere& s = atlas.table(idx).spheres[n];
    SphereCriterion row;
    row.n = n;
    row.total = s.size();
    row.checks_apply = beyond_threshold(n, eps);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const int N = f.N(n, i);
      if (N == INT_MAX) {
        r.partition_ok = false;
        continue;
      }
      row.max_N = std::max(row.max_N, N);
      if (!is_large(N, n, eps)) {
        ++row.small;
        continue;
      }
      ++row.large;
      const PairedFactors p = pair_factors(c, idx, f.factors(n, i), eps, k);
      for (std::size_t j = 0; j < p.depths.size(); ++j) {
        if (p.depths[j] >= k) ++row.pairs_in_IK;
        if (is_small_factor(p.lengths[j], eps) && p.depths[j] >= l) ++row.small_pairs_in_Il;
      }
      if (!row.min_small_factors || p.small.size() < *row.min_small_factors) row.min_small_factors = p.small.size();
      if (!row.checks_apply) continue;
      if (!small_factor_bound_holds(p.small.size(), n, eps)) ++row.factor_violations;
      const int sum = c.section_length_sum(idx, s.nodes[i], l);
      row.max_reduction_ratio = std::max(row.max_reduction_ratio, static_cast<double>(sum) / n);
      if (!level_reduction_holds(sum, n, eps)) ++row.level_violations;
    }
    if (row.large + row.small != row.total) r.partition_ok = false;
    if (row.factor_violations) r.factor_bound_ok = false;
    if (row.level_violations) r.level_reduction_ok = false;
    if (row.pairs_in_IK) r.pairing_ok = false;
    r.spheres.push_back(row);
  }
  return r;
}

bool generator_in_I(Atlas& atlas, std::size_t idx, const Word& w, int k, int exact_radius) {
  const NodeId n = atlas.store().intern(idx, w);
  atlas.ensure(idx, 1);
  if (auto len = atlas.length(idx, n); len && *len == 0) return true;
  return geodesic_in_I(atlas, idx, w, k, exact_radius);
}

namespace {

bool second_differences_nonpositive(const std::vector<double>& v) {
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i + 1] - 2 * v[i] + v[i - 1] > 1e-9 * (1 + std::abs(v[i]))) return false;
  }
  return true;
}

}  // namespace

HypothesesReport theorem_hypotheses(Atlas& atlas, int max_radius, int k, int exact_radius) {
  const FamilySpec& spec = atlas.spec();
  HypothesesReport r;
  r.k = k;
  r.max_radius = max_radius;
  const bool ternary = is_ternary_spinal(spec);
  const std::vector<int> kd = spec.spinal ? kernel_depths(spec) : std::vector<int>(spec.level_count(), -1);
  r.bound_applicable = ternary;
  for (std::size_t idx = 0; idx < spec.level_count(); ++idx) {
    HypothesesReport::Level lvl;
    lvl.level_idx = idx;
    const LevelSpec& ls = spec.level(idx);
    lvl.generators = spec.unit_count() + ls.zero_generators.size();
    for (Letter u = 0; u < spec.unit_count(); ++u) {
      if (!generator_in_I(atlas, idx, Word({0, u, 0}), k, exact_radius)) lvl.outside_IK.push_back(spec.units[u].name);
    }
    const IncompressibleSpheres inc = enumerate_incompressible(atlas, idx, k, max_radius, exact_radius);
    for (const Sphere& s : inc.spheres) lvl.counts.push_back(s.size());
    lvl.fit = fit_power_law(lvl.counts);
    if (ternary) {
      if (kd[idx] < 0) {
        r.bound_ok = false;
      } else {
        lvl.bound = check_polynomial_bound(lvl.counts, kd[idx], spec.spinal->b_size());
        r.bound_ok &= lvl.bound->holds;
      }
    }
    r.generators_ok &= lvl.outside_IK.empty();
    r.A = std::max(r.A, lvl.generators);
    r.envelope.resize(std::max(r.envelope.size(), lvl.counts.size()), 0);
    for (std::size_t n = 0; n < lvl.counts.size(); ++n) r.envelope[n] = std::max(r.envelope[n], lvl.counts[n]);
    r.levels.push_back(std::move(lvl));
  }
  for (const auto& lvl : r.levels) r.uniform_bound_ok &= lvl.generators <= r.A;
  r.envelope_fit = fit_power_law(r.envelope);

  // ln delta on n >= 1, for the bound itself where it applies and for the
  // fitted envelope otherwise.
  std::vector<double> log_delta;
  for (int n = 1; n <= max_radius; ++n) {
    if (ternary && !r.levels.empty() && r.levels[0].bound) {
      const BoundCheck& b = *r.levels[0].bound;
      log_delta.push_back(std::log(static_cast<double>(b.c_l)) + b.exponent * std::log(static_cast<double>(n)));
    } else {
      log_delta.push_back(r.envelope_fit.log_c + r.envelope_fit.delta * std::log(static_cast<double>(n)));
    }
  }
  r.log_concave = second_differences_nonpositive(log_delta);
  return r;
}

}  // namespace ssg
