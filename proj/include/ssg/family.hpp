#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ssg/perm.hpp"
#include "ssg/word.hpp"

namespace ssg {

// A letter of a child word as written in a definition: either a unit
// generator id or a rooted permutation of pseudolength zero.
struct RawLetter {
  bool is_unit = false;
  Letter unit = 0;
  Perm perm;

  static RawLetter of_unit(Letter u) { return {true, u, Perm()}; }
  static RawLetter of_perm(const Perm& p) { return {false, 0, p}; }
};

using RawWord = std::vector<RawLetter>;

// Recursion of a pseudolength-one generator at one level: s = (s_1..s_d) root.
struct UnitRule {
  Perm root;
  std::vector<Word> children;  // reduced, at the next level
  std::vector<RawWord> raw;    // as written
};

struct ZeroGenerator {
  std::string name;
  Letter element = 0;  // id in FamilySpec::zero_elements
};

struct LevelSpec {
  std::vector<ZeroGenerator> zero_generators;
  std::vector<Letter> zero_subgroup;  // closure of the generators, identity first
  std::vector<UnitRule> units;        // indexed by unit id
};

struct UnitSymbol {
  std::string name;
  Letter inverse = 0;
};

enum class FusionKind : std::uint8_t { none, zero, unit };

// Product of two adjacent unit letters when it is again a single letter.
struct Fusion {
  FusionKind kind = FusionKind::none;
  Letter value = 0;
};

// Parameters retained by the spinal constructors. B = Z/n_1 x ... x Z/n_m;
// element index i encodes coordinates in mixed radix (first factor fastest)
// and unit id u corresponds to element index u + 1.
struct SpinalInfo {
  std::vector<int> b_orders;
  // omega[level][j][g] = image of the g-th generator of B under omega_{level,j},
  // for j = 0..d-2; one entry per compiled level.
  std::vector<std::vector<std::vector<Perm>>> omega;

  int b_size() const;
  std::vector<int> coords(int index) const;
  int index_of(const std::vector<int>& coords) const;
  Perm image(std::size_t level, std::size_t j, int index) const;
};

// An eventually periodic non-l1-expanding similar family. Levels are
// addressed by a compiled index: preperiod levels first, then one period;
// the level after the last wraps to the start of the period.
class FamilySpec {
 public:
  int degree = 2;
  std::string name;
  std::vector<Perm> zero_elements;  // finite group of rooted letters; [0] is the identity
  std::vector<UnitSymbol> units;
  std::vector<LevelSpec> preperiod;
  std::vector<LevelSpec> period;
  std::optional<SpinalInfo> spinal;

  std::size_t level_count() const { return preperiod.size() + period.size(); }
  std::size_t level_index(std::uint64_t nu) const;
  std::size_t next_index(std::size_t idx) const;
  const LevelSpec& level(std::size_t idx) const;

  std::size_t unit_count() const { return units.size(); }
  std::size_t zero_count() const { return zero_elements.size(); }

  Letter zero_mul(Letter a, Letter b) const { return zero_mul_[a * zero_elements.size() + b]; }
  Letter zero_inv(Letter a) const { return zero_inv_[a]; }
  const Perm& zero_perm(Letter a) const { return zero_elements[a]; }
  std::optional<Letter> find_zero(const Perm& p) const;

  Fusion fuse(Letter u, Letter v) const { return fusion_[u * units.size() + v]; }
  std::optional<Letter> find_unit(const std::string& name) const;

  // Same family with every unit fusion removed, including inverse pairs.
  // Words then reduce only through the zero group, which makes the
  // semantics of the fusion table independently checkable.
  FamilySpec without_fusion() const;

  // Fill the derived tables; called by the builder and by shift().
  void finalize_tables(const std::vector<std::vector<Fusion>>& fusion);

 private:
  std::vector<Letter> zero_mul_;
  std::vector<Letter> zero_inv_;
  std::vector<Fusion> fusion_;
};

// Incremental construction of a FamilySpec. Units are global across levels;
// every level must give a rule for every unit.
class FamilyBuilder {
 public:
  FamilyBuilder(std::string name, int degree);

  Letter add_unit(const std::string& name);
  void set_inverse(Letter u, Letter inv);
  // u * v equals w (a unit) or, with nullopt, the identity.
  void add_fusion(Letter u, Letter v, std::optional<Letter> w);

  // Appends a level; returns its index in the preperiod or the period.
  std::size_t add_level(bool periodic);
  void add_zero_generator(bool periodic, std::size_t level, const std::string& name,
                          const Perm& p);
  void set_unit_rule(bool periodic, std::size_t level, Letter u, const Perm& root,
                     std::vector<RawWord> children);
  void set_spinal(SpinalInfo info) { spinal_ = std::move(info); }

  // Throws DomainError if a unit rule is missing or the rooted letters
  // generate a group too large to tabulate.
  FamilySpec build() const;

 private:
  struct DraftZero {
    std::string name;
    Perm perm;
  };
  struct DraftUnit {
    bool set = false;
    Perm root;
    std::vector<RawWord> children;
  };
  struct DraftLevel {
    std::vector<DraftZero> zeros;
    std::vector<DraftUnit> units;
  };
  DraftLevel& draft(bool periodic, std::size_t level);

  std::string name_;
  int degree_;
  std::vector<UnitSymbol> units_;
  std::vector<std::pair<std::pair<Letter, Letter>, std::optional<Letter>>> fusions_;
  std::vector<DraftLevel> pre_, per_;
  std::optional<SpinalInfo> spinal_;
};

struct ValidationIssue {
  std::string check;  // symmetry, non_expansion, zero_subgroup, transitivity, kernel, gcd, ...
  std::string where;  // level and generator
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  bool failed(const std::string& check) const;
  std::string to_string() const;
};

// Definitional checks; failures are reported, never thrown. Inverse and
// fusion declarations are checked semantically with the identity decision
// procedure on the fusion-free family, within `identity_budget` states.
ValidationReport validate(const FamilySpec& spec, std::uint64_t identity_budget = 10'000'000);

// The family re-based at level k.
FamilySpec shift(const FamilySpec& spec, std::uint64_t k);

// Largest |G_0| over the levels, and largest number of unit generators.
std::size_t max_zero_subgroup(const FamilySpec& spec);

}  // namespace ssg
