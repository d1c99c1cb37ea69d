#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <unordered_set>

#include "common.hpp"
#include "leaf_oracle.hpp"
#include "ssg/growth.hpp"

using namespace ssg;
using testing_support::catalog_group;

TEST_CASE("sphere zero is the rooted subgroup") {
  for (auto& [name, spec] : standard_catalog()) {
    INFO(name);
    Atlas atlas(spec);
    for (std::size_t idx = 0; idx < spec.level_count(); ++idx) {
      const Sphere& s0 = atlas.ensure(idx, 0).spheres[0];
      CHECK(s0.size() == spec.level(idx).zero_subgroup.size());
    }
  }
}

TEST_CASE("FG sphere one against a direct word count") {
  // a^i b^j a^k with j in {1, 2}: 18 words, all distinct by their action.
  const FamilySpec fg = fabrykowski_gupta();
  oracle::LeafAction o(fg, 0, 6);
  CHECK(o.sphere_sizes(1) == std::vector<std::uint64_t>{3, 18});
  Atlas atlas(fg);
  CHECK(atlas.ensure(0, 1).sphere_size(1) == 18);
}

TEST_CASE("spheres are disjoint and lengths match the radius") {
  for (const char* name : {"fabrykowski_gupta", "first_grigorchuk", "nekrashevych_D(01)"}) {
    INFO(name);
    const FamilySpec spec = catalog_group(name);
    Atlas atlas(spec);
    const SphereTable& t = atlas.ensure(0, 6);
    std::unordered_set<NodeId> seen;
    for (int n = 0; n <= 6; ++n) {
      for (std::size_t i = 0; i < t.spheres[n].size(); ++i) {
        CHECK(seen.insert(t.spheres[n].nodes[i]).second);
        CHECK(t.spheres[n].word(i).units() == static_cast<std::size_t>(n));
        REQUIRE(atlas.length(0, t.spheres[n].nodes[i]) == n);
      }
    }
    const auto gamma = t.gamma();
    for (std::size_t n = 1; n < gamma.size(); ++n) CHECK(gamma[n] == gamma[n - 1] + t.sphere_size(static_cast<int>(n)));
  }
}

TEST_CASE("parent links rebuild each element") {
  const FamilySpec fg = fabrykowski_gupta();
  Atlas atlas(fg);
  const SphereTable& t = atlas.ensure(0, 4);
  for (int n = 1; n <= 4; ++n) {
    const Sphere& s = t.spheres[n];
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Word w = s.word(i);
      const Word p = t.spheres[n - 1].word(s.parent[i]);
      const auto wl = w.letters();
      const auto pl = p.letters();
      // The parent is the word with its last unit and rooted letter removed.
      REQUIRE(wl.size() == pl.size() + 2);
      for (std::size_t k = 0; k < pl.size(); ++k) REQUIRE(wl[k] == pl[k]);
    }
  }
}

TEST_CASE("non-expansion with exact child lengths") {
  for (const char* name : {"fabrykowski_gupta", "first_grigorchuk"}) {
    INFO(name);
    const FamilySpec spec = catalog_group(name);
    Atlas atlas(spec);
    const int radius = 5;
    const SphereTable& t = atlas.ensure(0, radius);
    for (int n = 0; n <= radius; ++n) {
      for (std::size_t i = 0; i < t.spheres[n].size(); ++i) {
        const Decomposition d = decompose(spec, 0, t.spheres[n].word(i));
        int sum = 0;
        for (const Word& w : d.sections) sum += atlas.pseudolength(Element{1, w}, radius);
        REQUIRE(sum <= n);
      }
    }
  }
}

TEST_CASE("roots over Ball(2) act transitively") {
  for (auto& [name, spec] : standard_catalog()) {
    if (name == "neumann6") continue;
    INFO(name);
    Atlas atlas(spec);
    const SphereTable& t = atlas.ensure(0, 2);
    std::vector<Perm> roots;
    for (int n = 0; n <= 2; ++n)
      for (std::size_t i = 0; i < t.spheres[n].size(); ++i) roots.push_back(decompose(spec, 0, t.spheres[n].word(i)).root);
    CHECK(is_transitive(roots, spec.degree));
  }
}

TEST_CASE("kappa estimates on synthetic tables") {
  const KappaEstimate flat = kappa_estimates({4, 4, 4, 4});
  for (std::size_t n = 0; n + 1 < 4; ++n) CHECK(flat.ratio[n] == Catch::Approx(1.0));

  // Free product of Z/3 with Z/3: |Omega(n)| = 3 * 6^n with G0 of order 3 and two units.
  std::vector<std::uint64_t> free{3};
  for (int n = 1; n <= 8; ++n) free.push_back(free.back() * 6);
  const KappaEstimate k = kappa_estimates(free);
  CHECK(k.ratio[5] == Catch::Approx(6.0));
  CHECK(k.root[8] == Catch::Approx(std::pow(3.0 * std::pow(6.0, 8), 1.0 / 8)));

  const FamilySpec fgs = fabrykowski_gupta();
  Atlas atlas(fgs);
  const KappaEstimate fg = kappa_estimates(atlas.ensure(0, 6).sphere_sizes());
  for (std::size_t n = 1; n <= 6; ++n) {
    CHECK(fg.root[n] > 1.0);
    CHECK(fg.ratio[n - 1] <= 6.0);  // |S1| |G0|
  }
}

TEST_CASE("submultiplicativity") {
  const FamilySpec fgs = fabrykowski_gupta();
  Atlas atlas(fgs);
  std::vector<std::uint64_t> gamma = atlas.ensure(0, 6).gamma();
  CHECK(check_submultiplicative(gamma));
  gamma[5] = gamma[2] * gamma[3] + 1;  // corrupted
  CHECK_FALSE(check_submultiplicative(gamma));
}

TEST_CASE("wreath counting inequality") {
  for (const char* name : {"fabrykowski_gupta", "first_grigorchuk", "ggs(3,(1,1))"}) {
    INFO(name);
    const FamilySpec spec = catalog_group(name);
    Atlas atlas(spec);
    for (std::size_t idx = 0; idx < spec.level_count(); ++idx) {
      const auto g0 = atlas.ensure(idx, 6).gamma();
      const auto g1 = atlas.ensure(spec.next_index(idx), 6).gamma();
      for (int n = 0; n <= 6; ++n) CHECK(check_wreath_inequality(g0, g1, spec.degree, n).holds);
    }
  }
  // n = 0: gamma(0) <= d! gamma'(0)^d.
  const WreathCheck zero = check_wreath_inequality({3}, {3}, 3, 0);
  CHECK(zero.rhs == 6 * 27);
  // A level that is far too large for its successor is caught.
  CHECK_FALSE(check_wreath_inequality({1, 1000000}, {1, 2}, 2, 1).holds);
}

TEST_CASE("ball bound") {
  CHECK(ball_bound(3, 4, 0) == 3);
  CHECK(ball_bound(3, 4, 2) == 27 * 16);
  CHECK(to_string_u128(ball_bound(2, 3, 100)) == "170141183460469231731687303715884105727");
  for (auto& [name, spec] : standard_catalog()) {
    INFO(name);
    Atlas atlas(spec);
    const int radius = name == "neumann6" ? 1 : 3;
    const auto sizes = atlas.ensure(0, radius).sphere_sizes();
    const std::uint64_t g0 = spec.level(0).zero_subgroup.size();
    unsigned __int128 summed = 0;
    std::uint64_t ball = 0;
    for (int n = 0; n <= radius; ++n) {
      ball += sizes[n];
      summed += ball_bound(g0, spec.unit_count(), n);
      CHECK(sizes[n] <= ball_bound(g0, spec.unit_count(), n));
      CHECK(ball <= summed);
    }
  }
  // The ball itself can exceed |G0|^(n+1) |S1|^n: every word of length one is
  // distinct in FG, so Ball(1) has 3 + 18 elements against a bound of 18.
  const FamilySpec fg = fabrykowski_gupta();
  Atlas atlas(fg);
  const auto gamma = atlas.ensure(0, 2).gamma();
  CHECK(gamma[1] == 21);
  CHECK(ball_bound(3, 2, 1) == 18);
  CHECK(gamma[2] <= ball_bound(3, 2, 2));
}

TEST_CASE("truncation on the element cap") {
  GrowthOptions opt;
  opt.max_elements = 500;
  const FamilySpec fgs = fabrykowski_gupta();
  Atlas atlas(fgs, opt);
  const SphereTable& t = atlas.ensure(0, 8);
  CHECK(t.truncated);
  CHECK(t.max_radius() < 8);
  // Complete spheres below the partial last one.
  REQUIRE(t.max_radius() == 4);
  auto sizes = t.sphere_sizes();
  CHECK(std::vector<std::uint64_t>(sizes.begin(), sizes.begin() + 4) == std::vector<std::uint64_t>{3, 18, 72, 288});
  CHECK(t.gamma().back() <= 500);
}

TEST_CASE("results do not depend on the thread count") {
  const FamilySpec spec = fabrykowski_gupta();
  GrowthOptions one, four;
  four.threads = 4;
  Atlas a(spec, one), b(spec, four);
  const SphereTable& ta = a.ensure(0, 6);
  const SphereTable& tb = b.ensure(0, 6);
  for (int n = 0; n <= 6; ++n) {
    CHECK(ta.spheres[n].letters == tb.spheres[n].letters);
    CHECK(ta.spheres[n].parent == tb.spheres[n].parent);
  }
}
