#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "ssg/element_store.hpp"

namespace ssg {

// Elements of pseudolength exactly n at one level, in discovery order.
// Element i has the word letters[i*(2n+1) .. (i+1)*(2n+1)) and is the
// product of element parent[i] of sphere n-1 with one unit and one rooted
// letter. Node ids belong to one element store and are empty in a table
// loaded from disk until an Atlas adopts it.
struct Sphere {
  int radius = 0;
  std::vector<Letter> letters;
  std::vector<std::uint32_t> parent;
  std::vector<NodeId> nodes;

  std::size_t size() const { return parent.size(); }
  std::size_t stride() const { return 2 * static_cast<std::size_t>(radius) + 1; }
  Word word(std::size_t i) const;
};

struct SphereTable {
  std::size_t level_idx = 0;  // compiled level
  std::vector<Sphere> spheres;
  bool truncated = false;

  int max_radius() const { return static_cast<int>(spheres.size()) - 1; }
  std::uint64_t sphere_size(int n) const { return spheres.at(n).size(); }
  std::vector<std::uint64_t> sphere_sizes() const;
  std::vector<std::uint64_t> gamma() const;  // cumulative ball sizes
};

struct GrowthOptions {
  int threads = 1;
  std::uint64_t max_elements = 20'000'000;  // per level, across all radii
  std::uint64_t identity_budget = kDefaultIdentityBudget;
};

// Sphere tables for every level of a family, enumerated lazily and sharing
// one element store. Periodic levels repeat, so tables are kept per compiled
// level index.
class Atlas {
 public:
  explicit Atlas(const FamilySpec& spec, GrowthOptions options = {});
  // The FamilySpec is held by reference.
  explicit Atlas(FamilySpec&&, GrowthOptions = {}) = delete;

  const FamilySpec& spec() const { return spec_; }
  ElementStore& store() { return *store_; }
  const GrowthOptions& options() const { return options_; }

  // Enumerates level `level_idx` up to `radius` (or until truncated) and
  // returns its table.
  const SphereTable& ensure(std::size_t level_idx, int radius);
  const SphereTable& table(std::size_t level_idx) const { return tables_.at(level_idx); }
  bool has_radius(std::size_t level_idx, int radius) const;

  // Exact pseudolength of a node at a level if it is within the enumerated
  // radius, nullopt when it lies beyond.
  std::optional<int> length(std::size_t level_idx, NodeId n) const;
  // Pseudolength with enumeration on demand up to `cap`; throws
  // TableExhausted past it.
  int pseudolength(const Element& g, int cap);

  // Replace a level's table with a loaded one (used by the cache).
  void adopt(SphereTable table);

 private:
  void extend(std::size_t level_idx);
  void record(std::size_t level_idx, NodeId n, int len);

  const FamilySpec& spec_;
  GrowthOptions options_;
  std::unique_ptr<ElementStore> store_;
  std::vector<SphereTable> tables_;
  std::vector<std::vector<std::int8_t>> lengths_;  // per level, indexed by node id
};

// Finite-n growth rate statistics; no limit is claimed.
struct KappaEstimate {
  std::vector<double> root;   // root[n] = |Omega(n)|^(1/n) for n >= 1, root[0] unused
  std::vector<double> ratio;  // ratio[n] = |Omega(n+1)| / |Omega(n)|
};

KappaEstimate kappa_estimates(const std::vector<std::uint64_t>& sphere_sizes);

// gamma(n + m) <= gamma(n) gamma(m) for all n + m within range.
bool check_submultiplicative(const std::vector<std::uint64_t>& gamma);

// gamma_nu(n) <= d! * sum_{r_1 + ... + r_d <= n} prod gamma_{nu+1}(r_i).
// Returns both sides (the right one saturating at 2^127 - 1).
struct WreathCheck {
  bool holds = false;
  unsigned __int128 lhs = 0;
  unsigned __int128 rhs = 0;
};
WreathCheck check_wreath_inequality(const std::vector<std::uint64_t>& gamma_nu,
                                    const std::vector<std::uint64_t>& gamma_next, int degree, int n);

// |G0|^(n+1) |S1|^n as a saturating 128-bit value.
unsigned __int128 ball_bound(std::uint64_t g0, std::uint64_t s1, int n);

std::string to_string_u128(unsigned __int128 v);

}  // namespace ssg
