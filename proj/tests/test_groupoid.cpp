#include "doctest.h"
#include "orbi/groupoid.hpp"
#include "orbi/kernels.hpp"

using namespace orbi;

namespace {

// Z2 => * with compose(g, g) overwritten to g.
FiniteGroupoid corrupted_z2() {
  FiniteGroupoid g({"*"}, {"e", "g"}, {0, 0}, {0, 0}, {0}, {0, 1});
  g.set_compose(0, 0, 0);
  g.set_compose(0, 1, 1);
  g.set_compose(1, 0, 1);
  g.set_compose(1, 1, 1);
  return g;
}

}  // namespace

TEST_CASE("group as groupoid is valid") {
  auto g = group_as_groupoid(FiniteGroup::cyclic(2));
  CHECK(g.num_objects() == 1);
  CHECK(g.num_arrows() == 2);
  CHECK(validate_groupoid(g).valid());
}

TEST_CASE("Z6 x| Z3 is valid and matches the action rule") {
  auto ag = cyclic_double_action(3);
  CHECK(validate_groupoid(ag).valid());
  auto g = ag.to_finite();
  CHECK(g.num_arrows() == 18);
  CHECK(validate_groupoid(g).valid());
  int composable = 0;
  for (int a = 0; a < 6; ++a)
    for (int y = 0; y < 3; ++y) {
      const int s = g.action_arrow(a, y);
      CHECK(g.target(s) == (y + a % 3) % 3);
      for (int b = 0; b < 6; ++b) {
        const int t = g.action_arrow(b, g.target(s));
        ++composable;
        CHECK(g.compose(t, s) == g.action_arrow((a + b) % 6, y));
      }
    }
  CHECK(composable == 108);
}

TEST_CASE("corrupted table names the failing arrows") {
  auto rep = validate_groupoid(corrupted_z2());
  REQUIRE_FALSE(rep.valid());
  CHECK(rep.has("inverse"));
  bool named = false;
  for (const auto& v : rep.violations) named = named || v.detail.find("compose(g, g)") != std::string::npos;
  CHECK(named);
}

TEST_CASE("associativity violations are reported as triples") {
  // Z3 => * with one product swapped breaks associativity.
  auto g = group_as_groupoid(FiniteGroup::cyclic(3));
  g.set_compose(1, 1, 0);
  auto rep = validate_groupoid(g);
  CHECK(rep.has("associativity"));
  CHECK(kernels::associativity_violations(g, kernels::Exec::serial) ==
        kernels::associativity_violations(g, kernels::Exec::parallel));
}

TEST_CASE("action homomorphism violations") {
  auto ag = cyclic_double_action(3);
  std::swap(ag.permutations[1], ag.permutations[2]);
  CHECK(validate_groupoid(ag).has("homomorphism"));
  auto rc = rotation_circle(2, 6.283185307179586, 8);
  rc.isometries[1].sign = -1;
  CHECK_FALSE(validate_groupoid(rc).valid());
}

TEST_CASE("orbits") {
  CHECK(orbits(cyclic_double_action(3)).count() == 1);
  CHECK(orbits(cyclic_double_action(3)).orbits[0].size() == 3);
  CHECK(orbits(unit_groupoid({"p", "q", "r"})).count() == 3);
  auto rc = rotation_circle(2, 6.283185307179586, 8);
  auto part = orbits(rc);
  CHECK(part.sampled);
  CHECK(part.count() == 16);
  for (const auto& o : part.orbits) {
    REQUIRE(o.size() == 2);
    CHECK(o[1] - o[0] == 16);
  }
}

TEST_CASE("isotropy") {
  auto ag = cyclic_double_action(3);
  auto iso = isotropy(ag, "0");
  CHECK(iso.rank() == 2);
  CHECK(iso.elements == std::vector<int>{0, 3});
  CHECK(isotropy(group_as_groupoid(FiniteGroup::cyclic(2)), 0).rank() == 2);
  auto nt = negation_torus({6.283185307179586, 6.283185307179586}, 8);
  CHECK(isotropy(nt, std::vector<double>{0.0, 0.0}).rank() == 2);
  CHECK(isotropy(nt, std::vector<double>{3.141592653589793, 0.0}).rank() == 2);
  CHECK(isotropy(nt, std::vector<double>{1.0, 0.0}).rank() == 1);
  CHECK_THROWS_AS(isotropy(ag, "7"), Error);
}

TEST_CASE("effectiveness") {
  auto z2 = is_effective(group_as_groupoid(FiniteGroup::cyclic(2)));
  CHECK_FALSE(z2.effective);
  REQUIRE(z2.witness);
  CHECK(z2.witness->first == 0);
  CHECK(z2.witness->second == 1);
  auto z6 = is_effective(cyclic_double_action(3).to_finite());
  CHECK_FALSE(z6.effective);
  auto g = cyclic_double_action(3).to_finite();
  CHECK(g.action_element(z6.witness->second) - g.action_element(z6.witness->first) == 3);
  CHECK(is_effective(rotation_circle(2, 6.283185307179586, 8)).effective);
  // Z4 acting through rotation by a * pi: elements 0 and 2 coincide.
  CHECK_FALSE(is_effective(rotation_circle(4, 6.283185307179586, 8, 2)).effective);
}

TEST_CASE("germs") {
  auto ag = cyclic_double_action(3);
  auto germ = germ_of(ag, 2, 1);
  CHECK(germ.target_point == 0);
  auto g = ag.to_finite();
  for (int x = 0; x < g.num_objects(); ++x) CHECK(germ_of(g, g.unit(x)).is_identity());
  auto rc = rotation_circle(2, 6.283185307179586, 8);
  auto rot = germ_of(rc, 1);
  REQUIRE(rot.isometry);
  CHECK(rot.isometry->shift[0] == Rational(1, 2));
  CHECK_FALSE(rot.is_identity());
}

TEST_CASE("Cech groupoids") {
  auto z2 = group_as_groupoid(FiniteGroup::cyclic(2));
  auto c0 = cech_groupoid(z2, trivial_cover(z2));
  CHECK(c0.groupoid.num_objects() == 1);
  CHECK(c0.groupoid.num_arrows() == 2);
  CHECK(validate_groupoid(c0.groupoid).valid());

  auto g = cyclic_double_action(3).to_finite();
  CechCover cover{{{0, 1}, {1, 2}, {2, 0}}};
  auto c = cech_groupoid(g, cover);
  CHECK(c.groupoid.num_objects() == 6);
  int expected = 0;
  for (const auto& na : cover.sheets)
    for (const auto& nb : cover.sheets)
      for (int a = 0; a < 6; ++a)
        for (int y : nb) {
          const int ty = (y + a % 3) % 3;
          expected += std::find(na.begin(), na.end(), ty) != na.end();
        }
  CHECK(expected == 72);
  CHECK(c.groupoid.num_arrows() == expected);
  CHECK(validate_groupoid(c.groupoid).valid());
  CHECK(orbits(c.groupoid).count() == orbits(g).count());

  auto u = unit_groupoid({"p", "q"});
  auto cu = cech_groupoid(u, CechCover{{{0}, {1}}});
  CHECK(cu.groupoid.num_objects() == 2);
  CHECK(cu.groupoid.num_arrows() == 2);
  CHECK_THROWS_AS(cech_groupoid(u, CechCover{{{0}, {}}}), Error);
}

TEST_CASE("torus catalog") {
  auto nt = negation_torus({6.283185307179586, 6.283185307179586}, 4);
  CHECK(validate_groupoid(nt).valid());
  auto fin = nt.to_finite();
  CHECK(fin.num_objects() == 256);
  CHECK(validate_groupoid(fin).valid());
  auto tt = translation_torus({2, 1}, {6.283185307179586, 6.283185307179586}, 4);
  CHECK(validate_groupoid(tt).valid());
  CHECK(orbits(tt).count() == 128);
}
