#include <catch2/catch_amalgamated.hpp>

#include <functional>

#include "common.hpp"
#include "leaf_oracle.hpp"
#include "ssg/errors.hpp"
#include "ssg/growth.hpp"
#include "ssg/tree.hpp"

using namespace ssg;
using testing_support::catalog_group;

namespace {

std::string failed_check(const std::function<void()>& f) {
  try {
    f();
  } catch (const CheckFailed& e) {
    return e.check();
  }
  return "";
}

std::vector<std::uint64_t> sizes(const FamilySpec& s, int n) {
  Atlas atlas(s);
  return atlas.ensure(0, n).sphere_sizes();
}

}  // namespace

TEST_CASE("ggs requires gcd(eps, d) = 1") {
  CHECK(failed_check([] { ggs(4, {2, 0, 2}); }) == "gcd");
  CHECK(failed_check([] { ggs(3, {0, 0}); }) == "gcd");
  CHECK(failed_check([] { ggs(4, {2, 1, 0}); }).empty());
  CHECK_THROWS_AS(ggs(3, {1}), DomainError);
}

TEST_CASE("spinal constructor checks kernel and transitivity") {
  const Perm s = Perm::cycle(2, std::vector<int>{1, 2});
  SpinalData k;
  k.degree = 2;
  k.b_orders = {2, 2};
  k.period = {OmegaLevel{Homomorphism{s, Perm(2)}}};  // second generator in every kernel
  CHECK(failed_check([&] { spinal(k); }) == "kernel");

  SpinalData t;
  t.degree = 3;
  t.b_orders = {3};
  t.a_generators = {Perm::cycle(3, std::vector<int>{1, 2})};
  const Perm a = Perm::cycle(3, std::vector<int>{1, 2, 3});
  t.period = {OmegaLevel{Homomorphism{a}, Homomorphism{Perm(3)}}};
  CHECK(failed_check([&] { spinal(t); }) == "transitivity");
}

TEST_CASE("catalog families are well formed") {
  for (auto& [name, spec] : standard_catalog()) {
    INFO(name);
    CHECK(spec.name == name);
    CHECK(validate(spec).ok());
    if (spec.spinal) {
      for (int k : kernel_depths(spec)) CHECK(k >= 0);
    } else {
      for (int k : kernel_depths(spec)) CHECK(k == -1);
    }
  }
}

TEST_CASE("Neumann's example") {
  const FamilySpec n = neumann6();
  CHECK(n.degree == 6);
  CHECK(n.unit_count() == 360);
  CHECK(max_zero_subgroup(n) == 1);
  CHECK(n.level_count() == 1);
}

TEST_CASE("ternary spinal recognition") {
  CHECK(is_ternary_spinal(fabrykowski_gupta()));
  CHECK(is_ternary_spinal(catalog_group("sunic(3,2,[1])")));
  CHECK(is_ternary_spinal(catalog_group("ggs(3,(1,1))")) == false);  // omega_2 is not trivial
  CHECK_FALSE(is_ternary_spinal(first_grigorchuk()));
  CHECK_FALSE(is_ternary_spinal(neumann6()));
}

TEST_CASE("sunic periods") {
  CHECK(sunic_period(2, 2, {1}) == 3);
  CHECK(catalog_group("sunic(2,2,[1])").level_count() == 3);
  for (int a1 = 0; a1 < 3; ++a1) {
    const FamilySpec s = sunic(3, 2, {a1});
    CHECK(static_cast<int>(s.level_count()) == sunic_period(3, 2, {a1}));
  }
}

TEST_CASE("frozen sphere sizes, confirmed by the leaf oracle") {
  CHECK(sizes(fabrykowski_gupta(), 6) == std::vector<std::uint64_t>{3, 18, 72, 288, 1152, 4296, 14976});
  CHECK(sizes(first_grigorchuk(), 6) == std::vector<std::uint64_t>{2, 12, 34, 80, 190, 432, 976});
  CHECK(sizes(ggs(3, {1, 1}), 6) == std::vector<std::uint64_t>{3, 18, 72, 270, 954, 3366, 11592});
  CHECK(sizes(nekrashevych_D({}, {0, 1}), 6) == std::vector<std::uint64_t>{2, 8, 22, 60, 154, 388, 960});
}

TEST_CASE("isomorphic parametrizations share sphere sizes") {
  CHECK(sizes(sunic(3, 1, {}), 6) == sizes(fabrykowski_gupta(), 6));
  CHECK(sizes(sunic(2, 2, {1}), 6) == sizes(first_grigorchuk(), 6));
}

TEST_CASE("catalog sphere sizes agree with the leaf oracle") {
  for (auto& [name, spec] : standard_catalog()) {
    if (name == "neumann6") continue;  // 6^3 leaves, checked at radius 2 below
    INFO(name);
    const int depth = spec.degree == 2 ? 9 : 6;
    const int radius = spec.degree == 2 ? 5 : 4;
    oracle::LeafAction o(spec, 0, depth);
    CHECK(sizes(spec, radius) == o.sphere_sizes(radius));
  }
  const FamilySpec n = neumann6();
  oracle::LeafAction o(n, 0, 4);
  CHECK(sizes(n, 2) == o.sphere_sizes(2));
}

TEST_CASE("Nekrashevych generators are involutions") {
  for (const char* name : {"nekrashevych_D(0)", "nekrashevych_D(1)", "nekrashevych_D(01)"}) {
    const FamilySpec s = catalog_group(name);
    for (std::size_t idx = 0; idx < s.level_count(); ++idx) {
      for (Letter u = 0; u < s.unit_count(); ++u) {
        CHECK(s.units[u].inverse == u);
        // Built without fusion so the square is not cancelled by the reducer.
        const FamilySpec plain = s.without_fusion();
        WordBuilder b(plain);
        b.push_unit(u);
        b.push_unit(u);
        const Word sq = b.take();
        CHECK(sq.units() == 2);
        CHECK(is_identity(plain, idx, sq));
      }
      for (const ZeroGenerator& z : s.level(idx).zero_generators) CHECK(s.zero_perm(z.element).order() == 2);
    }
  }
}

TEST_CASE("spinal generators decompose along the defining recursion") {
  const FamilySpec s = catalog_group("sunic(3,2,[1])");
  const SpinalInfo& info = *s.spinal;
  for (std::size_t idx = 0; idx < s.level_count(); ++idx) {
    for (Letter u = 0; u < s.unit_count(); ++u) {
      const Decomposition d = decompose(s, idx, Word({0, u, 0}));
      CHECK(d.root.is_identity());
      for (std::size_t j = 0; j + 1 < 3; ++j) {
        const Perm w = info.image(idx, j, u + 1);
        REQUIRE(d.sections[j].is_zero());
        CHECK(s.zero_perm(d.sections[j].zero_at(0)) == w);
      }
      CHECK(d.sections[2] == Word({0, u, 0}));
    }
  }
}
