#include "ssg/family.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "ssg/errors.hpp"
#include "ssg/tree.hpp"

namespace ssg {

namespace {

// Zero-group tables grow quadratically; this keeps them under 8 MB.
constexpr std::size_t kMaxZeroGroup = 2048;

std::string level_label(const FamilySpec& spec, std::size_t idx) {
  if (idx < spec.preperiod.size()) return "level " + std::to_string(idx);
  return "level " + std::to_string(idx) + " (period " +
         std::to_string(idx - spec.preperiod.size()) + ")";
}

}  // namespace

int SpinalInfo::b_size() const {
  int n = 1;
  for (int o : b_orders) n *= o;
  return n;
}

std::vector<int> SpinalInfo::coords(int index) const {
  std::vector<int> c(b_orders.size());
  for (std::size_t i = 0; i < b_orders.size(); ++i) {
    c[i] = index % b_orders[i];
    index /= b_orders[i];
  }
  return c;
}

int SpinalInfo::index_of(const std::vector<int>& c) const {
  int index = 0;
  for (std::size_t i = b_orders.size(); i-- > 0;) {
    int v = ((c[i] % b_orders[i]) + b_orders[i]) % b_orders[i];
    index = index * b_orders[i] + v;
  }
  return index;
}

Perm SpinalInfo::image(std::size_t level, std::size_t j, int index) const {
  const auto& gens = omega.at(level).at(j);
  std::vector<int> c = coords(index);
  Perm p(gens.empty() ? 1 : gens[0].degree());
  for (std::size_t g = 0; g < gens.size(); ++g) p = p * gens[g].pow(c[g]);
  return p;
}

std::size_t FamilySpec::level_index(std::uint64_t nu) const {
  if (nu < preperiod.size()) return static_cast<std::size_t>(nu);
  return preperiod.size() + static_cast<std::size_t>((nu - preperiod.size()) % period.size());
}

std::size_t FamilySpec::next_index(std::size_t idx) const {
  return idx + 1 < level_count() ? idx + 1 : preperiod.size();
}

const LevelSpec& FamilySpec::level(std::size_t idx) const {
  return idx < preperiod.size() ? preperiod[idx] : period.at(idx - preperiod.size());
}

std::optional<Letter> FamilySpec::find_zero(const Perm& p) const {
  auto it = std::lower_bound(zero_elements.begin(), zero_elements.end(), p);
  if (it == zero_elements.end() || *it != p) return std::nullopt;
  return static_cast<Letter>(it - zero_elements.begin());
}

std::optional<Letter> FamilySpec::find_unit(const std::string& n) const {
  for (std::size_t u = 0; u < units.size(); ++u) {
    if (units[u].name == n) return static_cast<Letter>(u);
  }
  return std::nullopt;
}

void FamilySpec::finalize_tables(const std::vector<std::vector<Fusion>>& fusion) {
  const std::size_t z = zero_elements.size();
  zero_mul_.assign(z * z, 0);
  zero_inv_.assign(z, 0);
  for (std::size_t a = 0; a < z; ++a) {
    for (std::size_t b = 0; b < z; ++b) {
      zero_mul_[a * z + b] = *find_zero(zero_elements[a] * zero_elements[b]);
    }
    zero_inv_[a] = *find_zero(zero_elements[a].inverse());
  }
  const std::size_t u = units.size();
  fusion_.assign(u * u, Fusion{});
  for (std::size_t i = 0; i < u; ++i) {
    for (std::size_t j = 0; j < u; ++j) fusion_[i * u + j] = fusion[i][j];
  }
}

FamilySpec FamilySpec::without_fusion() const {
  FamilySpec copy = *this;
  std::fill(copy.fusion_.begin(), copy.fusion_.end(), Fusion{});
  // Children were reduced with fusion; rebuild them from the raw letters.
  for (auto* levels : {&copy.preperiod, &copy.period}) {
    for (auto& lvl : *levels) {
      for (auto& rule : lvl.units) {
        for (std::size_t x = 0; x < rule.raw.size(); ++x) rule.children[x] = reduce(copy, rule.raw[x]);
      }
    }
  }
  return copy;
}

FamilyBuilder::FamilyBuilder(std::string name, int degree) : name_(std::move(name)), degree_(degree) {
  if (degree < 2 || degree > kMaxDegree) {
    throw DomainError("degree must be in [2, " + std::to_string(kMaxDegree) + "]");
  }
}

Letter FamilyBuilder::add_unit(const std::string& n) {
  for (const auto& s : units_) {
    if (s.name == n) throw DomainError("duplicate generator name '" + n + "'");
  }
  units_.push_back({n, static_cast<Letter>(units_.size())});
  for (auto* levels : {&pre_, &per_}) {
    for (auto& lvl : *levels) lvl.units.resize(units_.size());
  }
  return static_cast<Letter>(units_.size() - 1);
}

void FamilyBuilder::set_inverse(Letter u, Letter inv) {
  units_.at(u).inverse = inv;
  units_.at(inv).inverse = u;
}

void FamilyBuilder::add_fusion(Letter u, Letter v, std::optional<Letter> w) {
  fusions_.push_back({{u, v}, w});
}

std::size_t FamilyBuilder::add_level(bool periodic) {
  auto& levels = periodic ? per_ : pre_;
  levels.emplace_back();
  levels.back().units.resize(units_.size());
  return levels.size() - 1;
}

FamilyBuilder::DraftLevel& FamilyBuilder::draft(bool periodic, std::size_t level) {
  return (periodic ? per_ : pre_).at(level);
}

void FamilyBuilder::add_zero_generator(bool periodic, std::size_t level, const std::string& n,
                                       const Perm& p) {
  if (p.degree() != degree_) throw DomainError("permutation degree mismatch for '" + n + "'");
  draft(periodic, level).zeros.push_back({n, p});
}

void FamilyBuilder::set_unit_rule(bool periodic, std::size_t level, Letter u, const Perm& root,
                                  std::vector<RawWord> children) {
  if (root.degree() != degree_) {
    throw DomainError("root degree mismatch for '" + units_.at(u).name + "'");
  }
  if (children.size() != static_cast<std::size_t>(degree_)) {
    throw DomainError("generator '" + units_.at(u).name + "' needs " + std::to_string(degree_) +
                      " children");
  }
  for (const auto& w : children) {
    for (const auto& l : w) {
      if (l.is_unit ? l.unit >= units_.size() : l.perm.degree() != degree_) {
        throw DomainError("bad letter in a child of '" + units_.at(u).name + "'");
      }
    }
  }
  auto& slot = draft(periodic, level).units.at(u);
  slot.set = true;
  slot.root = root;
  slot.children = std::move(children);
}

FamilySpec FamilyBuilder::build() const {
  if (per_.empty()) throw DomainError("a family needs a nonempty period");
  FamilySpec spec;
  spec.degree = degree_;
  spec.name = name_;
  spec.units = units_;
  spec.spinal = spinal_;

  std::vector<Perm> rooted{Perm(degree_)};
  for (const auto* levels : {&pre_, &per_}) {
    for (const auto& lvl : *levels) {
      for (const auto& z : lvl.zeros) rooted.push_back(z.perm);
      for (const auto& u : lvl.units) {
        for (const auto& w : u.children) {
          for (const auto& l : w) {
            if (!l.is_unit) rooted.push_back(l.perm);
          }
        }
      }
    }
  }
  spec.zero_elements = generate_group(rooted, degree_);
  if (spec.zero_elements.size() > kMaxZeroGroup) {
    throw DomainError("rooted letters generate a group of order " +
                      std::to_string(spec.zero_elements.size()) + ", above the supported " +
                      std::to_string(kMaxZeroGroup));
  }

  const std::size_t nu = units_.size();
  std::vector<std::vector<Fusion>> fusion(nu, std::vector<Fusion>(nu));
  for (std::size_t u = 0; u < nu; ++u) fusion[u][units_[u].inverse] = {FusionKind::zero, 0};
  for (const auto& [pair, w] : fusions_) {
    fusion.at(pair.first).at(pair.second) =
        w ? Fusion{FusionKind::unit, *w} : Fusion{FusionKind::zero, 0};
  }
  spec.finalize_tables(fusion);

  auto compile = [&](const DraftLevel& d, std::size_t label) {
    LevelSpec lvl;
    std::vector<Perm> gens;
    for (const auto& z : d.zeros) {
      lvl.zero_generators.push_back({z.name, *spec.find_zero(z.perm)});
      gens.push_back(z.perm);
    }
    for (const Perm& p : generate_group(gens, degree_)) lvl.zero_subgroup.push_back(*spec.find_zero(p));
    std::sort(lvl.zero_subgroup.begin(), lvl.zero_subgroup.end());
    for (std::size_t u = 0; u < nu; ++u) {
      const DraftUnit& du = d.units[u];
      if (!du.set) {
        throw DomainError("generator '" + units_[u].name + "' has no recursion at compiled level " +
                          std::to_string(label));
      }
      UnitRule rule;
      rule.root = du.root;
      rule.raw = du.children;
      for (const auto& w : du.children) rule.children.push_back(reduce(spec, w));
      lvl.units.push_back(std::move(rule));
    }
    return lvl;
  };
  std::size_t label = 0;
  for (const auto& d : pre_) spec.preperiod.push_back(compile(d, label++));
  for (const auto& d : per_) spec.period.push_back(compile(d, label++));
  return spec;
}

bool ValidationReport::failed(const std::string& check) const {
  return std::any_of(issues.begin(), issues.end(),
                     [&](const ValidationIssue& i) { return i.check == check; });
}

std::string ValidationReport::to_string() const {
  if (issues.empty()) return "all checks passed\n";
  std::ostringstream os;
  for (const auto& i : issues) os << "FAIL " << i.check << " [" << i.where << "]: " << i.message << '\n';
  return os.str();
}

ValidationReport validate(const FamilySpec& spec, std::uint64_t identity_budget) {
  ValidationReport report;
  auto issue = [&](std::string check, std::string where, std::string msg) {
    report.issues.push_back({std::move(check), std::move(where), std::move(msg)});
  };
  const std::size_t nu = spec.unit_count();

  for (std::size_t u = 0; u < nu; ++u) {
    Letter inv = spec.units[u].inverse;
    if (inv >= nu || spec.units[inv].inverse != u) {
      issue("symmetry", spec.units[u].name, "inverse pairing is not an involution");
    }
  }

  bool expansion_ok = true;
  for (std::size_t idx = 0; idx < spec.level_count(); ++idx) {
    const LevelSpec& lvl = spec.level(idx);
    const LevelSpec& next = spec.level(spec.next_index(idx));
    const std::string where = level_label(spec, idx);

    for (const auto& z : lvl.zero_generators) {
      const Letter inv = spec.zero_inv(z.element);
      bool found = inv == 0 || std::any_of(lvl.zero_generators.begin(), lvl.zero_generators.end(),
                                           [&](const ZeroGenerator& o) { return o.element == inv; });
      if (!found) issue("symmetry", where + ", " + z.name, "inverse of rooted generator missing");
    }

    std::vector<Perm> roots;
    for (const auto& z : lvl.zero_generators) roots.push_back(spec.zero_perm(z.element));
    for (std::size_t u = 0; u < nu; ++u) {
      const UnitRule& rule = lvl.units[u];
      const std::string gen = where + ", " + spec.units[u].name;
      roots.push_back(rule.root);
      int total = 0;
      int positive = 0;
      for (const RawWord& w : rule.raw) {
        int count = 0;
        for (const RawLetter& l : w) {
          if (l.is_unit) {
            ++count;
          } else {
            roots.push_back(l.perm);
            Letter z = *spec.find_zero(l.perm);
            if (!std::binary_search(next.zero_subgroup.begin(), next.zero_subgroup.end(), z)) {
              issue("zero_subgroup", gen,
                    "child letter " + l.perm.to_string() + " is not in the next level's G0");
            }
          }
        }
        total += count;
        positive += count > 0;
      }
      if (total > 1) {
        expansion_ok = false;
        issue("non_expansion", gen,
              "children carry total pseudolength " + std::to_string(total) + " > 1");
      }
      if (positive > 1) {
        issue("positive_children", gen, "more than one child has positive length");
      }
    }
    if (!is_transitive(roots, spec.degree)) {
      issue("transitivity", where, "root permutations do not act transitively on {1.." +
                                       std::to_string(spec.degree) + "}");
    }
  }

  // Fusions are trusted by the reducer, so check them against the action.
  if (expansion_ok && !report.failed("symmetry")) {
    const FamilySpec plain = spec.without_fusion();
    for (std::size_t idx = 0; idx < spec.level_count(); ++idx) {
      for (std::size_t u = 0; u < nu; ++u) {
        for (std::size_t v = 0; v < nu; ++v) {
          Fusion f = spec.fuse(static_cast<Letter>(u), static_cast<Letter>(v));
          if (f.kind == FusionKind::none) continue;
          WordBuilder b(plain);
          b.push_unit(static_cast<Letter>(u));
          b.push_unit(static_cast<Letter>(v));
          if (f.kind == FusionKind::unit) b.push_unit(spec.units[f.value].inverse);
          else b.push_zero(spec.zero_inv(f.value));
          const std::string what = spec.units[u].name + "*" + spec.units[v].name;
          try {
            if (!is_identity(plain, idx, b.take(), identity_budget)) {
              issue("symmetry", level_label(spec, idx) + ", " + what,
                    "declared product or inverse does not hold");
            }
          } catch (const BudgetExceeded&) {
            issue("symmetry", level_label(spec, idx) + ", " + what,
                  "declared product undecided within the identity budget");
          }
        }
      }
    }
  }
  return report;
}

FamilySpec shift(const FamilySpec& spec, std::uint64_t k) {
  FamilySpec out = spec;
  const std::size_t idx = spec.level_index(k);
  const std::size_t pre = spec.preperiod.size();
  auto rotate_info = [&](auto& seq) {
    if (idx < pre) {
      seq.erase(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(idx));
    } else {
      seq.erase(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(pre));
      std::rotate(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(idx - pre), seq.end());
    }
  };
  if (idx < pre) {
    out.preperiod.erase(out.preperiod.begin(), out.preperiod.begin() + static_cast<std::ptrdiff_t>(idx));
  } else {
    out.preperiod.clear();
    std::rotate(out.period.begin(), out.period.begin() + static_cast<std::ptrdiff_t>(idx - pre),
                out.period.end());
  }
  if (out.spinal) rotate_info(out.spinal->omega);
  return out;
}

std::size_t max_zero_subgroup(const FamilySpec& spec) {
  std::size_t m = 0;
  for (std::size_t i = 0; i < spec.level_count(); ++i) m = std::max(m, spec.level(i).zero_subgroup.size());
  return m;
}

}  // namespace ssg
