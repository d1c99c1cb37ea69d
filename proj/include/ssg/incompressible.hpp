#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ssg/growth.hpp"

namespace ssg {

// Compression depth over the node graph of an Atlas: depth(g) is the largest
// k (up to a cap) with g in I_k. Child lengths come from the level tables,
// so every level below the queried one must be enumerated at least to the
// length of the queried element.
class Compression {
 public:
  explicit Compression(Atlas& atlas) : atlas_(atlas), memo_(atlas.spec().level_count()) {}

  // min(depth, cap); throws TableExhausted if a needed length is missing.
  int depth(std::size_t level_idx, NodeId n, int cap);
  // Plain recursion on the definition, without the shared depth memo.
  bool member(std::size_t level_idx, NodeId n, int k);
  // Sum of the exact lengths of the sections at all vertices of length `l`.
  int section_length_sum(std::size_t level_idx, NodeId n, int l);

  Atlas& atlas() { return atlas_; }

 private:
  int known_length(std::size_t level_idx, NodeId n);

  Atlas& atlas_;
  // Per level: node -> (value << 1) | exact. Exact means value is the true
  // depth; otherwise the depth is at least value.
  std::vector<std::unordered_map<NodeId, std::uint8_t>> memo_;
  std::unordered_map<std::uint64_t, bool> member_memo_;
};

struct IncompressibilityReport {
  std::size_t level_idx = 0;
  int max_radius = 0;
  int k_max = 0;
  // counts[n][k] = |I_k ∩ Omega(n)| for k = 0..k_max.
  std::vector<std::vector<std::uint64_t>> counts;
  // Least K* <= k_max with I_{K*}(n) = I_{K*+1}(n) for every enumerated n.
  std::optional<int> stabilization_depth;
  // Per sphere: depth of each element capped at k_max + 1 (so that I_{k_max}
  // and I_{k_max+1} can be told apart).
  std::vector<std::vector<std::uint8_t>> depth;
  bool nesting_ok = true;
  bool hereditary_ok = true;
  std::vector<std::string> problems;
};

// Route over full sphere tables: flags every element of Omega(n), n <= N, at
// level `level_idx`. Enumerates the levels below as needed.
IncompressibilityReport approximate_I_infty(Compression& c, std::size_t level_idx, int max_radius,
                                            int k_max);

// Elements of I_K(n) for n <= N at one level, found without enumerating whole
// spheres: I_K is closed under geodesic prefixes, so I_K(n) is contained in
// I_K(n-1) * S_1 * G_0. Base-level lengths use exact tables up to
// `exact_radius` and recursive lower bounds beyond it; throws Undetermined if
// these do not decide.
struct IncompressibleSpheres {
  std::size_t level_idx = 0;
  int k = 0;
  std::vector<Sphere> spheres;  // spheres[n]: I_K ∩ Omega(n)
  std::uint64_t candidates_tested = 0;
};

IncompressibleSpheres enumerate_incompressible(Atlas& atlas, std::size_t level_idx, int k, int max_radius,
                                               int exact_radius);

// True when w is a geodesic and its element lies in I_k, decided like the
// enumeration above.
bool geodesic_in_I(Atlas& atlas, std::size_t level_idx, const Word& w, int k, int exact_radius);

// The l_nu(r) of the criterion, max{k : compressible ∩ B(r) ⊆ I_k} + 1,
// evaluated with I_K standing in for I_infty.
struct LevelFunction {
  int value = 1;
  bool empty_family = false;   // no compressible element in the ball; value 1 by convention
  bool early_exit = false;     // a compressible element outside I_1 was found, so the value is exact
  int searched_radius = 0;
};

// Throws Undetermined when the ball has no element outside I_K but I_K and
// I_{K+1} differ on it.
LevelFunction level_function(Compression& c, std::size_t level_idx, int r, int k_max);

// The least l with every element of B(r) \ I_K outside I_l, i.e. one plus the
// largest compression depth below K in the ball. Scans the whole ball.
int uniform_compression_level(Compression& c, std::size_t level_idx, int r, int k_max);

// Least squares fit of log count = log C + delta log n over n >= 2.
struct PowerFit {
  double delta = 0;
  double log_c = 0;
  int points = 0;
};
PowerFit fit_power_law(const std::vector<std::uint64_t>& counts);

struct TernaryGeodesicData {
  std::vector<std::string> beta;
  int s = 0;
  std::vector<int> c;
  std::vector<int> derivative;
  std::optional<int> m_c;     // 1-based switch index when the derivative has the two-run shape
  bool two_run_law = true;    // no 0 entries and no 1 followed by 2
};

// Reads the data off an alternating word a^{k_0} b_1 a^{k_1} ... b_n a^{k_n}
// with c_j = k_0 + ... + k_{j-1} and s = k_0 + ... + k_n (mod 3). Throws
// DomainError outside ternary spinal groups.
TernaryGeodesicData extract_ternary_data(const FamilySpec& spec, std::size_t level_idx, const Word& w);

// Two-run law over stored geodesics. With depths, elements of depth >= k are
// audited and the rest feed the converse count (law violators that still lie
// in I_k); without depths every element is taken to be in I_k.
struct TernaryAudit {
  bool applicable = false;
  std::uint64_t checked = 0;
  std::uint64_t law_violations = 0;
  std::uint64_t violators_outside = 0;    // compressible elements violating the law
  std::uint64_t converse_violations = 0;  // law violators flagged I_k
};

TernaryAudit audit_ternary(const FamilySpec& spec, std::size_t level_idx, const std::vector<Sphere>& spheres,
                           const std::vector<std::vector<std::uint8_t>>* depth, int k);

// Every element of I_k(n), n >= 3, has all its geodesic subwords in I_k, so
// the two-run law (a condition on three consecutive units) holds for every n
// once it holds for all geodesic words with three units. Tests all such words
// and returns the number of violations.
struct WindowAudit {
  std::uint64_t words = 0;
  std::uint64_t in_I = 0;
  std::uint64_t violations = 0;
};
WindowAudit audit_ternary_windows(Atlas& atlas, std::size_t level_idx, int k, int exact_radius);

// |I_K(n)| <= C_l n^e with C_l = 3^(3^(l+2)-1) (|B|-1)^((3^(l+1)-1)/2) and
// e = (3^(l+2)-1)/2, for n >= 1.
struct BoundCheck {
  int l = 0;
  int exponent = 0;
  unsigned __int128 c_l = 0;  // saturating
  struct Row {
    int n;
    std::uint64_t count;
    unsigned __int128 bound;
    bool holds;
  };
  std::vector<Row> rows;
  bool holds = true;
};

BoundCheck check_polynomial_bound(const std::vector<std::uint64_t>& counts, int l, int b_size);

// Minimal factorizations into I_K elements with additive lengths over a
// fully enumerated ball.
class Factorizations {
 public:
  // Requires Ball(radius) at level_idx and the compression depths.
  Factorizations(Compression& c, std::size_t level_idx, int radius, int k);

  int radius() const { return radius_; }
  // N(g) for the i-th element of sphere n.
  int N(int n, std::size_t i) const { return value_[n][i]; }
  // Factors g_1..g_N as (sphere, index) pairs; a rooted prefix is folded
  // into the first factor's word.
  std::vector<Word> factors(int n, std::size_t i) const;
  std::uint64_t products_tested() const { return tested_; }

 private:
  struct Ref {
    std::int32_t n = -1;
    std::uint32_t i = 0;
  };
  Compression& c_;
  std::size_t idx_;
  int radius_;
  int k_;
  std::vector<std::vector<int>> value_;
  std::vector<std::vector<Ref>> prefix_;
  std::vector<std::vector<Ref>> last_;
  std::uint64_t tested_ = 0;
};

}  // namespace ssg
