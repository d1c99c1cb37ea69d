#include <catch2/catch_amalgamated.hpp>

#include "common.hpp"
#include "leaf_oracle.hpp"
#include "ssg/errors.hpp"
#include "ssg/growth.hpp"

using namespace ssg;
using testing_support::catalog_group;
using testing_support::el;

namespace {

const FamilySpec& fg() {
  static const FamilySpec spec = fabrykowski_gupta();
  return spec;
}

}  // namespace

TEST_CASE("multiply: identity and orders") {
  const FamilySpec& s = fg();
  const Element g = el(s, "b a b^2 a");
  CHECK(multiply(s, identity_element(0), g) == g);
  CHECK(is_identity(s, el(s, "a a a")));
  CHECK(el(s, "a a a").word.is_trivial());
  CHECK(is_identity(s, el(s, "b b b")));
  CHECK_FALSE(is_identity(s, el(s, "b")));
  CHECK_THROWS_AS(multiply(s, el(s, "a", 0), el(s, "a", 1)), DomainError);
}

TEST_CASE("decompose: rooted letters and b") {
  const FamilySpec& s = fg();
  const ElementDecomposition da = decompose(s, el(s, "a"));
  CHECK(da.root == Perm::cycle(3, std::vector<int>{1, 2, 3}));
  for (const Element& x : da.sections) CHECK(x.word.is_trivial());

  // b = (a, 1, b)
  const ElementDecomposition db = decompose(s, el(s, "b"));
  CHECK(db.root.is_identity());
  CHECK(equals(s, db.sections[0], el(s, "a", 1)));
  CHECK(db.sections[1].word.is_trivial());
  CHECK(equals(s, db.sections[2], el(s, "b", 1)));
  CHECK(db.sections[2].level == 1);
}

TEST_CASE("decompose: Neumann generator keeps itself at its fixed point") {
  const FamilySpec s = neumann6();
  const Letter u = 7;
  const Decomposition d = decompose(s, 0, Word({0, u, 0}));
  int self = 0;
  for (const Word& w : d.sections) {
    if (w.is_trivial()) continue;
    CHECK(w == Word({0, u, 0}));
    ++self;
  }
  CHECK(self == 1);
  CHECK_FALSE(d.root.is_identity());
}

TEST_CASE("section_at follows the pinned product rule") {
  const FamilySpec& s = fg();
  const Element b = el(s, "b");
  CHECK(section_at(s, b, std::vector<int>{}) == b);
  const std::vector<int> v3{2};
  CHECK(equals(s, section_at(s, b, v3), el(s, "b", 1)));
  const std::vector<int> v1{0};
  CHECK(equals(s, section_at(s, el(s, "b b"), v1), el(s, "a a", 1)));
}

TEST_CASE("equals: b * b^a against its explicit decomposition (ab, a, b)") {
  const FamilySpec& s = fg();
  const Element g = el(s, "b a b a^2");
  const ElementDecomposition d = decompose(s, g);
  CHECK(d.root.is_identity());
  CHECK(equals(s, d.sections[0], el(s, "a b", 1)));
  CHECK(equals(s, d.sections[1], el(s, "a", 1)));
  CHECK(equals(s, d.sections[2], el(s, "b", 1)));
  CHECK(equals(s, g, g));
  CHECK_FALSE(equals(s, el(s, "a"), el(s, "a^2")));
}

TEST_CASE("invert") {
  const FamilySpec& s = fg();
  CHECK(invert(s, identity_element(0)).word.is_trivial());
  CHECK(equals(s, invert(s, el(s, "a")), el(s, "a^2")));
  const Element ba = el(s, "b a");
  CHECK(equals(s, invert(s, ba), el(s, "a^2 b^2")));
  CHECK(is_identity(s, multiply(s, ba, invert(s, ba))));
}

TEST_CASE("portrait examples") {
  const FamilySpec& s = fg();
  const Portrait pi = portrait(s, identity_element(0), 3);
  for (const auto& layer : pi.layers)
    for (const Perm& p : layer) CHECK(p.is_identity());

  const Portrait pa = portrait(s, el(s, "a"), 2);
  CHECK(pa.layers[0][0] == Perm::cycle(3, std::vector<int>{1, 2, 3}));
  for (const Perm& p : pa.layers[1]) CHECK(p.is_identity());

  // b = (a, 1, b): layer 1 is (a, id, id); layer 2 under vertex 3 is again (a, id, id).
  const Portrait pb = portrait(s, el(s, "b"), 3);
  const Perm a = Perm::cycle(3, std::vector<int>{1, 2, 3});
  CHECK(pb.layers[0][0].is_identity());
  CHECK(pb.layers[1] == std::vector<Perm>{a, Perm(3), Perm(3)});
  CHECK(pb.layers[2][6] == a);
  CHECK(pb.layers[2][7].is_identity());
  for (int i = 0; i < 6; ++i) CHECK(pb.layers[2][i].is_identity());
}

TEST_CASE("action consistency with the leaf oracle for elements of length <= 3") {
  for (const char* name : {"fabrykowski_gupta", "first_grigorchuk", "ggs(3,(1,1))", "nekrashevych_D(01)",
                           "sunic(3,2,[1])"}) {
    const FamilySpec s = catalog_group(name);
    Atlas atlas(s);
    atlas.ensure(0, 3);
    const int depth = s.degree == 2 ? 5 : 4;
    oracle::LeafAction o(s, 0, depth);
    for (int n = 0; n <= 3; ++n) {
      const Sphere& sp = atlas.table(0).spheres[n];
      for (std::size_t i = 0; i < sp.size(); i += std::max<std::size_t>(1, sp.size() / 40)) {
        const Element g{0, sp.word(i)};
        const Portrait p = portrait(s, g, depth);
        // Leaf action from the raw letters of the word, last letter first.
        RawWord raw;
        for (std::size_t k = 0; k < g.word.letters().size(); ++k) {
          const Letter l = g.word.letters()[k];
          if (k % 2) {
            raw.push_back(RawLetter::of_unit(l));
          } else {
            raw.push_back(RawLetter::of_perm(s.zero_perm(l)));
          }
        }
        const auto leaf = o.word_action(0, raw, depth);
        for (std::size_t v = 0; v < leaf.size(); ++v) {
          std::vector<int> vertex(depth);
          std::size_t x = v;
          for (int k = depth - 1; k >= 0; --k) {
            vertex[k] = static_cast<int>(x % s.degree);
            x /= s.degree;
          }
          const std::vector<int> image = p.act(vertex);
          std::size_t code = 0;
          for (int y : image) code = code * s.degree + y;
          REQUIRE(code == leaf[v]);
        }
      }
    }
  }
}

TEST_CASE("portrait of a product composes the portraits") {
  const FamilySpec& s = fg();
  Atlas atlas(s);
  atlas.ensure(0, 2);
  const int depth = 4;
  std::vector<Element> elems;
  for (int n = 0; n <= 2; ++n)
    for (std::size_t i = 0; i < atlas.table(0).spheres[n].size(); i += 7) elems.push_back({0, atlas.table(0).spheres[n].word(i)});
  auto act = [&](const Portrait& p, std::vector<int> v) { return p.act(v); };
  for (const Element& u : elems) {
    const Portrait pu = portrait(s, u, depth);
    for (const Element& v : elems) {
      const Portrait pv = portrait(s, v, depth);
      const Portrait puv = portrait(s, multiply(s, u, v), depth);
      for (int code = 0; code < 81; ++code) {
        std::vector<int> vertex{code / 27, (code / 9) % 3, (code / 3) % 3, code % 3};
        REQUIRE(act(puv, vertex) == act(pu, act(pv, vertex)));
      }
    }
  }
}

TEST_CASE("is_identity: trivial cases and budget") {
  const FamilySpec& s = fg();
  CHECK(is_identity(s, identity_element(0)));
  CHECK_FALSE(is_identity(s, el(s, "a")));
  const FamilySpec g = first_grigorchuk();
  CHECK(is_identity(g, el(g, "b c d")));
  CHECK(is_identity(g, el(g, "a d a d a d a d")));
  CHECK_FALSE(is_identity(g, el(g, "a d a d")));
}

TEST_CASE("format and parse round trip") {
  const FamilySpec& s = fg();
  const Element g = el(s, "b a b^2 a^2 b");
  CHECK(equals(s, parse_element(s, 0, format_word(s, 0, g.word)), g));
  CHECK_THROWS_AS(parse_element(s, 0, "q"), DomainError);
}
