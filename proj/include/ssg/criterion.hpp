#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ssg/incompressible.hpp"

namespace ssg {

// Exact positive rational, kept in lowest terms.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;
};

// Accepts "p/q" or a decimal such as "0.45"; throws DomainError otherwise.
Rational parse_rational(const std::string& text);
// As above, additionally requiring 0 < eps < 1/2.
Rational parse_epsilon(const std::string& text);

// N(g) > eps n
bool is_large(int N, int n, Rational eps);
// |h| <= 6 / eps
bool is_small_factor(int length, Rational eps);
// n > 3 / eps
bool beyond_threshold(int n, Rational eps);
// |S(g)| > (eps / 8) n
bool small_factor_bound_holds(std::size_t small, int n, Rational eps);
// sum < (8 - eps) / 8 * n
bool level_reduction_holds(int sum, int n, Rational eps);

struct PairedFactors {
  std::vector<int> lengths;          // |h_i|, i = 1..floor(N/2)
  std::vector<std::size_t> small;    // 1-based indices in S(g)
  std::vector<std::size_t> large;    // 1-based indices in L(g)
  std::vector<int> depths;           // compression depth of each h_i, capped at k
};

// h_i = g_{2i-1} g_{2i}; depths are capped at k (depth k means h_i in I_k).
// For k > 0 the level must be enumerated up to the longest h_i.
PairedFactors pair_factors(Compression& c, std::size_t level_idx, const std::vector<Word>& factors,
                           Rational eps, int k);

struct SphereCriterion {
  int n = 0;
  std::uint64_t total = 0;
  std::uint64_t large = 0;  // |Omega^>(n, eps)|
  std::uint64_t small = 0;  // |Omega^<(n, eps)|
  int max_N = 0;
  bool checks_apply = false;          // n > 3 / eps
  std::uint64_t factor_violations = 0;
  std::uint64_t level_violations = 0;
  std::optional<std::size_t> min_small_factors;  // over Omega^>
  double max_reduction_ratio = 0;                // sum at level l over n, over Omega^>
  std::uint64_t pairs_in_IK = 0;                 // h_i in I_K; minimality forbids this
  std::uint64_t small_pairs_in_Il = 0;           // small h_i inside I_l
};

struct CriterionReport {
  Rational epsilon;
  std::size_t level_idx = 0;
  int max_radius = 0;
  int k = 0;
  int small_radius = 0;             // floor(6 / eps)
  LevelFunction level;              // l_nu(6 / eps)
  int uniform_level = 0;            // over B(min(small_radius, max_radius))
  std::vector<SphereCriterion> spheres;
  bool partition_ok = true;
  bool factor_bound_ok = true;
  bool level_reduction_ok = true;
  bool pairing_ok = true;
  bool insufficient_n = false;      // no n in range exceeds 3 / eps

  bool ok() const { return partition_ok && factor_bound_ok && level_reduction_ok && pairing_ok; }
};

CriterionReport run_criterion(Compression& c, std::size_t level_idx, int max_radius, int k, Rational eps);

// Generator membership uses the prefix search, so it does not need whole
// spheres. A generator of length 0 is in every I_k.
bool generator_in_I(Atlas& atlas, std::size_t level_idx, const Word& w, int k, int exact_radius = 3);

struct HypothesesReport {
  struct Level {
    std::size_t level_idx = 0;
    std::size_t generators = 0;           // |S_nu| = units + rooted generators
    std::vector<std::string> outside_IK;  // generators not in I_K
    std::vector<std::uint64_t> counts;    // |I_K ∩ Omega(n)|
    std::optional<BoundCheck> bound;      // ternary spinal levels with finite l
    PowerFit fit;
  };
  int k = 0;
  int max_radius = 0;
  std::vector<Level> levels;
  std::size_t A = 0;
  bool generators_ok = true;     // (a)
  bool uniform_bound_ok = true;  // (b)
  bool bound_applicable = false;
  bool bound_ok = true;          // (c)
  bool log_concave = true;       // (d)
  std::vector<std::uint64_t> envelope;  // max over levels of |I_K ∩ Omega(n)|
  PowerFit envelope_fit;

  bool ok() const { return generators_ok && uniform_bound_ok && bound_ok && log_concave; }
};

HypothesesReport theorem_hypotheses(Atlas& atlas, int max_radius, int k, int exact_radius = 3);

}  // namespace ssg
