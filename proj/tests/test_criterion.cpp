#include <catch2/catch_amalgamated.hpp>

#include "common.hpp"
#include "ssg/criterion.hpp"
#include "ssg/errors.hpp"

using namespace ssg;
using testing_support::catalog_group;
using testing_support::el;

TEST_CASE("rational parsing") {
  const Rational a = parse_rational("0.45");
  CHECK(a.num == 9);
  CHECK(a.den == 20);
  CHECK(a.to_string() == "9/20");
  const Rational b = parse_rational("6/14");
  CHECK(b.num == 3);
  CHECK(b.den == 7);
  CHECK(parse_rational("1").den == 1);
  for (const char* bad : {"", "abc", "1/0", "1/", "/2", "0.4.5", "-"}) {
    INFO(bad);
    CHECK_THROWS_AS(parse_rational(bad), DomainError);
  }
}

TEST_CASE("epsilon range") {
  CHECK(parse_epsilon("1/3").den == 3);
  CHECK(parse_epsilon("0.49").num == 49);
  for (const char* bad : {"0.5", "0.6", "0", "1/2", "-0.1"}) {
    INFO(bad);
    CHECK_THROWS_AS(parse_epsilon(bad), DomainError);
  }
}

TEST_CASE("threshold predicates at eps = 9/20") {
  const Rational e = parse_epsilon("0.45");
  CHECK(is_large(4, 8, e));  // 4 > 3.6
  CHECK_FALSE(is_large(3, 8, e));
  CHECK(is_small_factor(13, e));  // 6 / eps = 13.33
  CHECK_FALSE(is_small_factor(14, e));
  CHECK(beyond_threshold(7, e));  // 3 / eps = 6.67
  CHECK_FALSE(beyond_threshold(6, e));
  CHECK(small_factor_bound_holds(1, 8, e));  // eps n / 8 = 0.45
  CHECK_FALSE(small_factor_bound_holds(0, 8, e));
  CHECK(level_reduction_holds(7, 8, e));  // (8 - eps) / 8 * 8 = 7.55
  CHECK_FALSE(level_reduction_holds(8, 8, e));
}

TEST_CASE("pairing factors") {
  const FamilySpec fg = fabrykowski_gupta();
  Atlas atlas(fg);
  Compression c(atlas);
  const Rational e = parse_epsilon("1/3");
  atlas.ensure(0, 4);
  const Word b = el(fg, "b").word, ab = el(fg, "a b").word;

  CHECK(pair_factors(c, 0, {b}, e, 6).lengths.empty());
  const PairedFactors one = pair_factors(c, 0, {b, ab}, e, 6);
  CHECK(one.lengths == std::vector<int>{2});
  CHECK(one.small == std::vector<std::size_t>{1});
  CHECK(one.depths == std::vector<int>{6});  // b a b is incompressible
  const PairedFactors three = pair_factors(c, 0, {b, ab, b, ab, b}, e, 6);
  CHECK(three.lengths.size() == 2);

  // b (a b a^2) b: the compressible product of the length reduction example.
  const PairedFactors red = pair_factors(c, 0, {el(fg, "b a b a^2").word, b}, e, 6);
  CHECK(red.depths == std::vector<int>{0});
}

TEST_CASE("all-large pairs are flagged by the small-factor check") {
  // Synthetic factors of length 10: with eps = 1/3 every pair has length
  // 20 > 18, so S(g) is empty and the bound |S(g)| > eps n / 8 fails. The
  // proof excludes this for minimal factorizations.
  const FamilySpec fg = fabrykowski_gupta();
  Atlas atlas(fg);
  Compression c(atlas);
  const Rational e = parse_epsilon("1/3");
  const Word w = el(fg, "b a b a b a b a b a b a b a b a b a b a").word;
  REQUIRE(w.units() == 10);
  const PairedFactors p = pair_factors(c, 0, {w, w, w, w}, e, 0);
  CHECK(p.small.empty());
  CHECK(p.large == std::vector<std::size_t>{1, 2});
  CHECK_FALSE(small_factor_bound_holds(p.small.size(), 40, e));
}

TEST_CASE("partition of FG spheres at eps = 1/3") {
  const FamilySpec fg = fabrykowski_gupta();
  Atlas atlas(fg);
  Compression c(atlas);
  const Rational e = parse_epsilon("1/3");
  const CriterionReport r = run_criterion(c, 0, 6, 6, e);
  const Factorizations f(c, 0, 6, 6);
  const auto sizes = atlas.table(0).sphere_sizes();
  CHECK(r.partition_ok);
  for (const SphereCriterion& s : r.spheres) {
    INFO(s.n);
    CHECK(s.large + s.small == sizes[s.n]);
    std::uint64_t large = 0;
    for (std::size_t i = 0; i < sizes[s.n]; ++i) large += 3 * f.N(s.n, i) > s.n;
    CHECK(s.large == large);
    if (s.n >= 1 && s.n < 3) CHECK(s.small == 0);  // eps n < 1 <= N(g)
    CHECK(s.pairs_in_IK == 0);
  }
  CHECK(r.ok());
  CHECK(r.small_radius == 18);
}

TEST_CASE("insufficient n is reported") {
  const FamilySpec g = first_grigorchuk();
  Atlas atlas(g);
  Compression c(atlas);
  const CriterionReport r = run_criterion(c, 0, 5, 6, parse_epsilon("0.45"));
  CHECK(r.insufficient_n);
  for (const SphereCriterion& s : r.spheres) CHECK_FALSE(s.checks_apply);
  CHECK(r.ok());
}

TEST_CASE("first Grigorchuk criterion at eps = 0.45") {
  const FamilySpec g = first_grigorchuk();
  Atlas atlas(g);
  Compression c(atlas);
  const CriterionReport r = run_criterion(c, 0, 8, 6, parse_epsilon("0.45"));
  CHECK_FALSE(r.insufficient_n);
  CHECK(r.ok());
  CHECK(r.spheres[7].checks_apply);
  CHECK(r.spheres[8].checks_apply);
  for (const SphereCriterion& s : r.spheres) {
    CHECK(s.factor_violations == 0);
    CHECK(s.level_violations == 0);
  }
}

TEST_CASE("theorem hypotheses") {
  const FamilySpec fg = fabrykowski_gupta();
  Atlas atlas(fg);
  const HypothesesReport h = theorem_hypotheses(atlas, 5, 6);
  CHECK(h.ok());
  CHECK(h.A == 4);
  CHECK(h.bound_applicable);
  REQUIRE(h.levels.size() == 1);
  REQUIRE(h.levels[0].bound);
  CHECK(h.levels[0].bound->c_l == 13122);
  CHECK(h.levels[0].counts == std::vector<std::uint64_t>{3, 18, 72, 216, 576, 1296});

  const FamilySpec g = first_grigorchuk();
  Atlas ga(g);
  const HypothesesReport hg = theorem_hypotheses(ga, 4, 6);
  CHECK(hg.generators_ok);
  CHECK(hg.uniform_bound_ok);
  CHECK_FALSE(hg.bound_applicable);
  CHECK(hg.levels.size() == 3);
  CHECK(hg.envelope.size() == 5);
}
