// Acceptance run: one PASS/FAIL line per criterion, with supporting detail
// lines indented beneath it. Exit status is 0 when every criterion passes or
// fails only in the documented way (criterion 2, see README).

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "leaf_oracle.hpp"
#include "ssg/catalog.hpp"
#include "ssg/config.hpp"
#include "ssg/criterion.hpp"
#include "ssg/errors.hpp"
#include "ssg/incompressible.hpp"
#include "ssg/table_io.hpp"

using namespace ssg;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string summary;
  // A failure that matches the documented counterexample exactly.
  bool documented = false;
};

std::vector<std::string> g_detail;

void detail(const std::string& s) { g_detail.push_back(s); }

template <class... Args>
std::string format(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string join(const std::vector<std::uint64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

constexpr unsigned __int128 kMax = ~static_cast<unsigned __int128>(0) >> 1;

unsigned __int128 mul_u128(unsigned __int128 a, unsigned __int128 b) {
  if (a == 0 || b == 0) return 0;
  return a > kMax / b ? kMax : a * b;
}

unsigned __int128 pow_u128(unsigned __int128 a, int e) {
  unsigned __int128 r = 1;
  for (int i = 0; i < e; ++i) r = mul_u128(r, a);
  return r;
}

FamilySpec catalog(const std::string& name) {
  for (auto& [n, spec] : standard_catalog())
    if (n == name) return spec;
  throw std::runtime_error("no catalog group " + name);
}

const std::string kConfigs = std::string(SSG_SOURCE_DIR) + "/configs/";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& args) {
  const std::string cmd = std::string(SSG_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
  bool ok = true;
  for (const char* name : {"first_grigorchuk", "fabrykowski_gupta", "ggs(3,(1,1))", "nekrashevych_D(01)"}) {
    const FamilySpec spec = catalog(name);
    Atlas atlas(spec);
    const auto mine = atlas.ensure(0, 6).sphere_sizes();
    oracle::LeafAction o8(spec, 0, 8);
    oracle::LeafAction o10(spec, 0, 10);
    const auto a = o8.sphere_sizes(6);
    const auto b = o10.sphere_sizes(6);
    const bool same = mine == a && a == b;
    ok &= same;
    detail(format("%s: enumerator [%s], oracle depth 8 [%s], depth 10 %s", name, join(mine).c_str(), join(a).c_str(),
                  a == b ? "identical" : ("[" + join(b) + "]").c_str()));
  }
  return {ok, "sphere sizes n <= 6 equal the leaf-action oracle at depths 8 and 10 for 4 groups"};
}

// Ball(n) for n <= 8 on every catalog group. Levels are enumerated exactly up
// to an element budget; past it |Omega(k)| <= |Omega(m)| (|S1| |G0|)^(k - m)
// gives an upper estimate of the ball, which decides the inequality when the
// estimate is below the bound.
Outcome ball_bound_check() {
  constexpr std::uint64_t kBudget = 2'000'000;
  int literal_fail = 0, undecided = 0;
  bool sphere_ok = true, summed_ok = true, only_small_n = true;
  std::vector<std::string> failures;
  for (auto& [name, spec] : standard_catalog()) {
    GrowthOptions opt;
    opt.max_elements = kBudget;
    Atlas atlas(spec, opt);
    const SphereTable& t = atlas.ensure(0, 8);
    const int exact = t.truncated ? t.max_radius() - 1 : t.max_radius();
    const std::uint64_t g0 = spec.level(0).zero_subgroup.size();
    const std::uint64_t s1 = spec.unit_count();
    const auto sizes = t.sphere_sizes();
    unsigned __int128 ball = 0, summed = 0, last = 0;
    std::string row;
    for (int n = 0; n <= 8; ++n) {
      const bool is_exact = n <= exact;
      const unsigned __int128 sphere = is_exact ? sizes[n] : mul_u128(last, g0 * s1);
      last = sphere;
      ball += sphere;
      const unsigned __int128 bound = ball_bound(g0, s1, n);
      summed += bound;
      if (is_exact) sphere_ok &= sphere <= bound;
      summed_ok &= ball <= summed;
      char mark;
      if (ball <= bound) {
        mark = is_exact ? '+' : 'c';
      } else if (is_exact) {
        mark = 'x';
        ++literal_fail;
        only_small_n &= n <= 2;
        failures.push_back(format("%s n=%d: |Ball| = %s > %s", name.c_str(), n, to_string_u128(ball).c_str(),
                                  to_string_u128(bound).c_str()));
      } else {
        mark = '?';
        ++undecided;
      }
      row += mark;
    }
    detail(format("%-22s exact to n=%d  [%s]", name.c_str(), exact, row.c_str()));
  }
  detail("legend: + holds exactly, c holds by the sphere-growth estimate, x violated, ? undecided");
  for (const auto& f : failures) detail("violation: " + f);
  detail(format("|Omega(n)| <= |G0|^(n+1) |S1|^n on every exact sphere: %s", sphere_ok ? "yes" : "NO"));
  detail(format("|Ball(n)| <= sum_{k<=n} |G0|^(k+1) |S1|^k for all n <= 8: %s", summed_ok ? "yes" : "NO"));
  const bool pass = literal_fail == 0 && undecided == 0;
  Outcome o;
  o.pass = pass;
  o.summary = pass ? "|Ball(n)| <= |G0|^(n+1) |S1|^n for n <= 8 on every catalog group"
                   : format("|Ball(n)| <= |G0|^(n+1) |S1|^n is violated in %d cases (%d undecided); the "
                            "counting argument bounds spheres, not balls",
                            literal_fail, undecided);
  // Documented failure: only small-n violations, with the sphere form intact.
  o.documented = !pass && undecided == 0 && only_small_n && sphere_ok && summed_ok;
  return o;
}

Outcome non_expansion() {
  bool ok = true;
  for (const char* name : {"fabrykowski_gupta", "first_grigorchuk"}) {
    const FamilySpec spec = catalog(name);
    Atlas atlas(spec);
    const int radius = 8;
    const SphereTable& t = atlas.ensure(0, radius);
    const std::size_t next = spec.next_index(0);
    atlas.ensure(next, radius);
    const ElementStore& store = atlas.store();
    std::uint64_t checked = 0, bad = 0, strict = 0;
    for (int n = 0; n <= radius; ++n) {
      for (NodeId x : t.spheres[n].nodes) {
        int sum = 0;
        for (int i = 0; i < spec.degree; ++i) {
          const auto len = atlas.length(next, store.child(x, i));
          if (!len) throw TableExhausted("child beyond the table");
          sum += *len;
        }
        ++checked;
        bad += sum > n;
        strict += sum < n;
      }
    }
    // Generators: at most one section of positive length, at every level.
    std::uint64_t gen_bad = 0;
    for (std::size_t idx = 0; idx < spec.level_count(); ++idx) {
      const std::size_t nx = spec.next_index(idx);
      atlas.ensure(nx, 1);
      for (Letter u = 0; u < spec.unit_count(); ++u) {
        const NodeId g = atlas.store().intern(idx, Word({0, u, 0}));
        int positive = 0;
        for (int i = 0; i < spec.degree; ++i) positive += *atlas.length(nx, store.child(g, i)) > 0;
        gen_bad += positive > 1;
      }
    }
    ok &= bad == 0 && gen_bad == 0;
    detail(format("%s: %llu elements of Ball(8), %llu with sum > |g|, %llu with strict decrease; generators with "
                  "two positive sections: %llu",
                  name, (unsigned long long)checked, (unsigned long long)bad, (unsigned long long)strict,
                  (unsigned long long)gen_bad));
  }
  return {ok, "sum |g_i| <= |g| on Ball(8) and at most one positive section per generator (FG, Grigorchuk)"};
}

struct FgData {
  FamilySpec spec = fabrykowski_gupta();
  std::unique_ptr<Atlas> atlas;
  std::unique_ptr<Compression> comp;
  IncompressibilityReport report;
};

FgData& fg10() {
  static FgData d = [] {
    FgData x;
    x.atlas = std::make_unique<Atlas>(x.spec);
    x.comp = std::make_unique<Compression>(*x.atlas);
    x.report = approximate_I_infty(*x.comp, 0, 10, 6);
    return x;
  }();
  return d;
}

Outcome nesting_and_generators() {
  FgData& d = fg10();
  const IncompressibilityReport& r = d.report;
  for (int n = 0; n <= 10; ++n) detail(format("FG n=%2d |I_k|, k=0..6: %s", n, join(r.counts[n]).c_str()));
  detail(format("FG stabilization depth: %s", r.stabilization_depth ? std::to_string(*r.stabilization_depth).c_str() : "none"));
  for (const auto& p : r.problems) detail("problem: " + p);

  bool gens = true;
  std::uint64_t tested = 0;
  for (auto& [name, spec] : standard_catalog()) {
    Atlas atlas(spec);
    std::vector<std::string> outside;
    for (std::size_t idx = 0; idx < spec.level_count(); ++idx) {
      for (Letter u = 0; u < spec.unit_count(); ++u) {
        ++tested;
        if (!generator_in_I(atlas, idx, Word({0, u, 0}), 6, 1)) outside.push_back(spec.units[u].name);
      }
      tested += spec.level(idx).zero_generators.size();  // length 0: in every I_k
    }
    gens &= outside.empty();
    if (!outside.empty()) detail(name + ": generators outside I_6: " + outside.front() + " ...");
  }
  detail(format("generators tested in I_6 across all catalog groups and levels: %llu", (unsigned long long)tested));
  const bool ok = r.nesting_ok && r.hereditary_ok && gens;
  return {ok, format("FG n <= 10, k <= 6: nesting %s, hereditary %s; all catalog generators in I_6: %s",
                     r.nesting_ok ? "ok" : "FAILED", r.hereditary_ok ? "ok" : "FAILED", gens ? "yes" : "NO")};
}

Outcome two_run_law() {
  bool ok = true;
  FgData& d = fg10();
  const TernaryAudit fa = audit_ternary(d.spec, 0, d.atlas->table(0).spheres, &d.report.depth, 6);
  ok &= fa.applicable && fa.law_violations == 0;
  detail(format("FG n <= 10: %llu elements of I_6 parsed, %llu violate the law; %llu law violators, all "
                "compressible: %s",
                (unsigned long long)fa.checked, (unsigned long long)fa.law_violations,
                (unsigned long long)fa.violators_outside, fa.converse_violations == 0 ? "yes" : "NO"));
  ok &= fa.converse_violations == 0;

  for (int a1 = 0; a1 < 3; ++a1) {
    const FamilySpec spec = sunic(3, 2, {a1});
    Atlas atlas(spec);
    const IncompressibleSpheres inc = enumerate_incompressible(atlas, 0, 6, 5, 3);
    const TernaryAudit a = audit_ternary(spec, 0, inc.spheres, nullptr, 6);
    const WindowAudit w = audit_ternary_windows(atlas, 0, 6, 3);
    ok &= a.applicable && a.law_violations == 0 && w.violations == 0;
    std::vector<std::uint64_t> counts;
    for (const Sphere& s : inc.spheres) counts.push_back(s.size());
    detail(format("%s: I_6(n), n <= 5 = [%s], %llu parsed, %llu violations; all %llu geodesic 3-unit words in I_6 "
                  "obey the law (%llu violations), which covers every n",
                  spec.name.c_str(), join(counts).c_str(), (unsigned long long)a.checked,
                  (unsigned long long)a.law_violations, (unsigned long long)w.in_I, (unsigned long long)w.violations));
  }

  // b b^a b: the first-level sections lose one unit.
  Compression& c = *d.comp;
  const NodeId g = d.atlas->store().intern(parse_element(d.spec, 0, "b a b a^2 b"));
  const int len = *d.atlas->length(0, g);
  const int sum = c.section_length_sum(0, g, 1);
  const bool witness = len == 3 && sum == 2 && !c.member(0, g, 1);
  ok &= witness;
  detail(format("witness b b^a b: length %d, first-level section lengths sum to %d, in I_1: %s", len, sum,
                c.member(0, g, 1) ? "yes" : "no"));
  return {ok, "two-run law on I_6 for FG (n <= 10) and sunic(3,2,a1) (n <= 5 directly, all n by 3-unit windows); "
              "b b^a b compressible at level 1"};
}

Outcome polynomial_bound() {
  bool ok = true;
  FgData& d = fg10();
  std::vector<std::uint64_t> fg_counts;
  for (const auto& row : d.report.counts) fg_counts.push_back(row[6]);
  const int l_fg = kernel_depths(d.spec)[0];
  const BoundCheck b = check_polynomial_bound(fg_counts, l_fg, d.spec.spinal->b_size());
  ok &= b.holds && b.l == 0 && b.c_l == 13122 && b.exponent == 4;
  detail(format("FG: l=%d C_l=%s exponent=%d; |I_6(n)|, n=1..10 = %s; holds: %s", b.l, to_string_u128(b.c_l).c_str(),
                b.exponent, join(std::vector<std::uint64_t>(fg_counts.begin() + 1, fg_counts.end())).c_str(),
                b.holds ? "yes" : "NO"));

  // sunic(3,2,a1): exact to n = 5, then |I(n+1)| <= |I(n)| |S1| |G0| by prefix closure.
  for (int a1 = 0; a1 < 3; ++a1) {
    const FamilySpec spec = sunic(3, 2, {a1});
    Atlas atlas(spec);
    const IncompressibleSpheres inc = enumerate_incompressible(atlas, 0, 6, 5, 3);
    std::vector<std::uint64_t> counts;
    for (const Sphere& s : inc.spheres) counts.push_back(s.size());
    const std::uint64_t step = spec.unit_count() * spec.level(0).zero_subgroup.size();
    const int l = kernel_depths(spec)[0];
    const BoundCheck exact = check_polynomial_bound(counts, l, spec.spinal->b_size());
    bool cert = true;
    unsigned __int128 est = counts.back();
    for (int n = 6; n <= 10; ++n) {
      est *= step;
      cert &= est <= mul_u128(exact.c_l, pow_u128(n, exact.exponent));
    }
    ok &= exact.holds && cert;
    detail(format("%s: l=%d C_l=%s exponent=%d; exact n <= 5 holds: %s; n = 6..10 via |I(n)| <= %llu^(n-5) "
                  "|I(5)|: %s",
                  spec.name.c_str(), l, to_string_u128(exact.c_l).c_str(), exact.exponent, exact.holds ? "yes" : "NO",
                  (unsigned long long)step, cert ? "yes" : "NO"));
  }
  return {ok, "|I_6(n)| <= C_l n^((3^(l+2)-1)/2) for n in [1, 10] (FG exact; sunic exact to 5, certified to 10)"};
}

Outcome criterion_machinery() {
  FgData& d = fg10();
  const Rational eps = parse_epsilon("0.45");
  const auto t0 = std::chrono::steady_clock::now();
  const CriterionReport r = run_criterion(*d.comp, 0, 8, 6, eps);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  detail(format("eps=%s, 6/eps=%d, l(6/eps)=%d%s, uniform level %d (%.1f s)", eps.to_string().c_str(), r.small_radius,
                r.level.value, r.level.early_exit ? " (exact)" : "", r.uniform_level, secs));
  for (const SphereCriterion& s : r.spheres) {
    detail(format("n=%d |Omega|=%llu large=%llu small=%llu maxN=%d%s factor_viol=%llu level_viol=%llu "
                  "max_ratio=%.3f pairs_in_I6=%llu",
                  s.n, (unsigned long long)s.total, (unsigned long long)s.large, (unsigned long long)s.small, s.max_N,
                  s.checks_apply ? " [checked]" : "", (unsigned long long)s.factor_violations,
                  (unsigned long long)s.level_violations, s.max_reduction_ratio, (unsigned long long)s.pairs_in_IK));
  }
  const bool ok = r.ok() && !r.insufficient_n;
  return {ok, format("FG eps=0.45 N=8: partition %s, |S(g)| > eps n/8 %s, level-l sums < (8-eps)n/8 %s",
                     r.partition_ok ? "exact" : "BROKEN", r.factor_bound_ok ? "holds" : "FAILS",
                     r.level_reduction_ok ? "hold" : "FAIL")};
}

Outcome wreath() {
  bool ok = true;
  for (const char* name : {"fabrykowski_gupta", "first_grigorchuk"}) {
    const FamilySpec spec = catalog(name);
    Atlas atlas(spec);
    for (std::size_t idx = 0; idx < spec.level_count(); ++idx) {
      const auto g0 = atlas.ensure(idx, 8).gamma();
      const auto g1 = atlas.ensure(spec.next_index(idx), 8).gamma();
      bool all = true;
      WreathCheck last;
      for (int n = 0; n <= 8; ++n) {
        last = check_wreath_inequality(g0, g1, spec.degree, n);
        all &= last.holds;
      }
      ok &= all;
      detail(format("%s level %zu: n <= 8 %s (n=8: %s <= %s)", name, idx, all ? "holds" : "FAILS",
                    to_string_u128(last.lhs).c_str(), to_string_u128(last.rhs).c_str()));
    }
  }
  return {ok, "gamma_nu(n) <= d! sum prod gamma_{nu+1}(r_i) for n <= 8, every level of one period (FG, Grigorchuk)"};
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / ("ssg_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cfg = "--config " + kConfigs + "fabrykowski_gupta.json";
  bool ok = true;
  const std::string a = (dir / "a").string(), b = (dir / "b").string();
  ok &= run("spheres " + cfg + " --max-radius 8 --threads 1 --out " + a + ".csv") == 0;
  ok &= run("spheres " + cfg + " --max-radius 8 --threads 4 --out " + b + ".csv") == 0;
  const bool spheres_same = ok && slurp(a + ".csv") == slurp(b + ".csv");
  ok &= run("incompressible " + cfg + " --max-radius 7 --threads 1 --out " + a) == 0;
  ok &= run("incompressible " + cfg + " --max-radius 7 --threads 4 --out " + b) == 0;
  const bool inc_same = ok && slurp(a + ".csv") == slurp(b + ".csv");
  detail(format("spheres CSV (N=8) threads 1 vs 4: %s; incompressible CSV (N=7): %s",
                spheres_same ? "identical" : "DIFFERENT", inc_same ? "identical" : "DIFFERENT"));

  FgData& d = fg10();
  PersistedTable t;
  t.group_hash = group_hash(load_config(kConfigs + "fabrykowski_gupta.json"));
  t.table = d.atlas->table(0);
  trim(t, 10);
  t.flag_depth = 6;
  t.flags = flags_from_depths(d.report.depth, 6);
  const std::string path = cache_path(dir.string(), t.group_hash, 0, 10);
  save_table(path, t);
  const PersistedTable u = load_table(path);
  bool same = u.flags == t.flags && u.group_hash == t.group_hash && !u.truncated;
  for (int n = 0; n <= 10 && same; ++n) {
    same &= u.table.spheres[n].letters == t.table.spheres[n].letters;
    same &= u.table.spheres[n].parent == t.table.spheres[n].parent;
    std::uint64_t in6 = 0;
    for (auto f : u.flags[n]) in6 += (f >> 5) & 1;
    same &= in6 == d.report.counts[n][6];
  }
  save_table((dir / "again.tbl").string(), u);
  const bool bitexact = slurp(path) == slurp(dir / "again.tbl");
  detail(format("FG table n <= 10 with I_1..I_6 flags: reload %s, re-save %s", same ? "identical" : "DIFFERENT",
                bitexact ? "bit-exact" : "DIFFERENT"));
  fs::remove_all(dir);
  return {spheres_same && inc_same && same && bitexact, "thread-count independent CSV; table save/load round trip exact"};
}

Outcome negative_controls() {
  bool ok = true;
  const std::vector<std::pair<std::string, std::string>> cases{{"ggs_gcd_violation.json", "gcd"},
                                                               {"spinal_kernel_violation.json", "kernel"},
                                                               {"non_transitive_root.json", "transitivity"}};
  for (const auto& [file, check] : cases) {
    std::string got;
    try {
      const FamilySpec spec = build_family(load_config(kConfigs + file));
      const ValidationReport r = validate(spec);
      if (!r.ok()) got = r.issues.front().check;
    } catch (const CheckFailed& e) {
      got = e.check();
    }
    const int code = run("define --config " + kConfigs + file);
    const bool hit = got == check && code == 1;
    ok &= hit;
    detail(format("%s: rejected by '%s', define exit %d", file.c_str(), got.empty() ? "(accepted)" : got.c_str(), code));
  }
  return {ok, "gcd, kernel and transitivity violations rejected by the named check"};
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, oracle_equivalence}, {2, ball_bound_check}, {3, non_expansion},          {4, nesting_and_generators},
      {5, two_run_law},        {6, polynomial_bound}, {7, criterion_machinery},    {8, wreath},
      {9, determinism},        {10, negative_controls}};
  int failed = 0, documented = 0;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& [id, fn] : criteria) {
    g_detail.clear();
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << o.summary
              << format(" [%.1fs]", secs) << (o.documented ? " (documented)" : "") << "\n";
    for (const auto& line : g_detail) std::cout << "    " << line << "\n";
    std::cout.flush();
    if (!o.pass) (o.documented ? documented : failed)++;
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << format("%d passed, %d failed (%d documented) in %.0f s\n", 10 - failed - documented,
                      failed + documented, documented, total);
  return failed == 0 ? 0 : 1;
}
