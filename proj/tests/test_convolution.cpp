#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "orbi/convolution.hpp"

using namespace orbi;

namespace {

constexpr double kPi = std::numbers::pi;
const Twist kZero{Rational(0), Rational(0)};

GaussRat small(std::mt19937& rng) {
  std::uniform_int_distribution<int> u(-4, 4);
  return GaussRat(Rational(u(rng)), Rational(u(rng)));
}

ArrowFunction random_arrow_function(const FiniteGroupoid& g, std::mt19937& rng) {
  ArrowFunction f(g.num_arrows());
  for (auto& v : f) v = small(rng);
  return f;
}

ModeFunction exp_mode(const FlatGeometry& g, int cutoff, Mode k) {
  ModeFunction f = ModeFunction::zero(g, cutoff);
  f.at(k) = 1.0;
  return f;
}

ModeFunction random_function(const FlatGeometry& g, int cutoff, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ModeFunction f = ModeFunction::zero(g, cutoff);
  for (auto& c : f.coeffs) c = cplx(u(rng), u(rng));
  return f;
}

Generator random_generator(const ActionGroupoid& g, int cutoff, std::mt19937& rng) {
  Generator f;
  f.name = "random";
  for (int a = 0; a < g.group.order(); ++a) f.parts.push_back(random_function(geometry_of(g.base), cutoff, rng));
  return f;
}

}  // namespace

TEST_CASE("finite convolution products") {
  const FiniteGroupoid z2 = group_as_groupoid(FiniteGroup::cyclic(2));
  const int e = z2.unit(0), g = 1 - e;
  CHECK(convolve(z2, arrow_delta(z2, g), arrow_delta(z2, g)) == arrow_delta(z2, e));

  const FiniteGroupoid act = cyclic_double_action(3).to_finite();
  REQUIRE(act.num_arrows() == 18);
  for (int a = 0; a < 6; ++a)
    for (int y = 0; y < 3; ++y)
      for (int b = 0; b < 6; ++b)
        for (int z = 0; z < 3; ++z) {
          // (a, y) o (b, z) is defined when y = b . z = z + (b mod 3)
          ArrowFunction expected(18);
          if (y == (z + b) % 3) expected[((a + b) % 6) * 3 + z] = GaussRat(1);
          CHECK(convolve(act, arrow_delta(act, a * 3 + y), arrow_delta(act, b * 3 + z)) == expected);
        }

  std::mt19937 rng(50);
  const ArrowFunction unit = convolution_unit(act);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f1 = random_arrow_function(act, rng), f2 = random_arrow_function(act, rng),
               f3 = random_arrow_function(act, rng);
    CHECK(convolve(act, convolve(act, f1, f2), f3) == convolve(act, f1, convolve(act, f2, f3)));
    CHECK(convolve(act, unit, f1) == f1);
    CHECK(convolve(act, f1, unit) == f1);
  }
  CHECK_THROWS_AS(convolve(act, arrow_delta(z2, g), arrow_delta(act, 0)), Error);
}

TEST_CASE("finite representation on sections") {
  const Bitorsor h = a2_bitorsor(3);
  const FiniteGroupoid& z2 = h.left;
  const auto triv = bundle_from_cocycle(constant_cocycle(z2, 1));
  const FiniteValues psi{GaussRat(Rational(3, 2), Rational(-1))};
  CHECK(act(triv, convolution_unit(z2), psi) == psi);
  ArrowFunction both(2, GaussRat(1));
  CHECK(act(triv, both, psi) == FiniteValues{psi[0] * GaussRat(2)});

  // induced sign bundle on Z6 x| Z3 and the regular representation of Z2
  const auto sign = bundle_from_cocycle(character_cocycle(z2, {GaussRat(1), GaussRat(-1)}));
  std::mt19937 rng(7);
  for (const auto& b : {induced_bundle(h, sign), bundle_from_cocycle(permutation_cocycle_z2(z2))}) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto f1 = random_arrow_function(b.base, rng), f2 = random_arrow_function(b.base, rng);
      FiniteValues v(static_cast<size_t>(b.base.num_objects()) * b.rank);
      for (auto& x : v) x = small(rng);
      CHECK(act(b, convolve(b.base, f1, f2), v) == act(b, f1, act(b, f2, v)));
    }
  }
}

TEST_CASE("faithfulness probe") {
  const FiniteGroupoid z2 = group_as_groupoid(FiniteGroup::cyclic(2));
  const auto r1 = faithfulness_probe(bundle_from_cocycle(constant_cocycle(z2, 1)));
  CHECK_FALSE(r1.faithful);
  CHECK_FALSE(r1.effective);
  CHECK(r1.kernel_dimension == 1);
  REQUIRE(r1.witness.has_value());
  // delta_g - delta_e up to sign
  CHECK((*r1.witness)[0] == -(*r1.witness)[1]);
  CHECK_FALSE((*r1.witness)[0].is_zero());
  CHECK(r1.agrees_with_effectiveness());

  const FiniteGroupoid act = cyclic_double_action(3).to_finite();
  const auto r2 = faithfulness_probe(bundle_from_cocycle(constant_cocycle(act, 1)));
  CHECK(r2.kernel_dimension == 9);
  REQUIRE(r2.witness.has_value());
  std::vector<int> support;
  for (int a = 0; a < 18; ++a)
    if (!(*r2.witness)[a].is_zero()) support.push_back(a);
  REQUIRE(support.size() == 2);
  // same germ: same source, elements differing by 3
  CHECK(act.source(support[0]) == act.source(support[1]));
  CHECK(act.target(support[0]) == act.target(support[1]));
  CHECK(std::abs(support[0] / 3 - support[1] / 3) == 3);
  CHECK(r2.agrees_with_effectiveness());

  // 2-isomorphic presentation of the same groupoid
  const Bitorsor h = a2_bitorsor(3);
  CHECK(faithfulness_probe(bundle_from_cocycle(constant_cocycle(h.right, 1))).kernel_dimension == 9);

  // the regular representation separates the arrows of Z2 => *
  const auto r3 = faithfulness_probe(bundle_from_cocycle(permutation_cocycle_z2(z2)));
  CHECK(r3.faithful);
  CHECK_FALSE(r3.agrees_with_effectiveness());

  const auto circle = rotation_circle(2, 2.0 * kPi, 8);
  const auto r4 = faithfulness_probe(circle, trivial_bundle(circle), 3, 8);
  CHECK(r4.exact);
  CHECK(r4.faithful);
  CHECK(r4.effective);
  CHECK(r4.kernel_dimension == 0);

  const auto noneff = rotation_circle(4, 2.0 * kPi, 8, 2);
  const auto r5 = faithfulness_probe(noneff, trivial_bundle(noneff), 3, 8);
  CHECK_FALSE(r5.faithful);
  CHECK_FALSE(r5.effective);
  CHECK(r5.kernel_dimension == 2 * 7);
  REQUIRE(r5.witness.has_value());
  CHECK(r5.witness_text.find("(2, ") != std::string::npos);

  // a rotation by a third of a turn needs the numerical path
  const auto z3 = rotation_circle(3, 2.0 * kPi, 6);
  const auto r6 = faithfulness_probe(z3, trivial_bundle(z3), 2, 6);
  CHECK_FALSE(r6.exact);
  CHECK(r6.faithful);
}

TEST_CASE("Fourier convolution representation") {
  const auto rep1 = build_clifford(1);
  const auto z2 = rotation_circle(2, 2.0 * kPi, 12);
  const FlatGeometry geom = geometry_of(z2.base);
  std::mt19937 rng(17);
  for (const auto& lift : spin_lift_search(z2, rep1, kZero)) {
    const DiracSpec spec = make_dirac_spec(z2, lift, 12);
    for (int trial = 0; trial < 5; ++trial) {
      const Generator f1 = random_generator(z2, 2, rng), f2 = random_generator(z2, 2, rng);
      CHECK(representation_defect(spec, f1, f2, 4) < 1e-12);
    }
    // f supported on the half turn with value 1: (f . psi)(theta) = h psi(theta - pi)
    const Generator shift = element_generator(z2, "shift", 1, exp_mode(geom, 0, {0, 0}));
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(spec.modes().size());
    ModeFunction pf = ModeFunction::zero(geom, 12);
    for (int k = -5; k <= 5; ++k) {
      const cplx c(std::sin(k + 0.3), std::cos(2.0 * k));
      psi(spec.modes().index({k, 0})) = c;
      pf.at({k, 0}) = c;
    }
    const Eigen::VectorXcd out = act(spec, shift, psi);
    ModeFunction of = ModeFunction::zero(geom, 12);
    for (int i = 0; i < of.modes.size(); ++i) of.coeffs[i] = out(i);
    const cplx h = lift.twist[1].to_complex();
    for (double th : {0.1, 1.0, 2.5, 4.0, 6.0}) {
      CHECK(std::abs(evaluate_at(of, {th})[0] - h * evaluate_at(pf, {th - kPi})[0]) < 1e-12);
    }
    const Generator wide = element_generator(z2, "wide", 0, exp_mode(geom, 8, {8, 0}));
    CHECK_THROWS_AS(act(spec, wide, psi), Error);
  }

  const auto rep2 = build_clifford(2);
  const auto pillow = negation_torus({2.0 * kPi, 2.0 * kPi}, 8);
  const auto plift = spin_lift_search(pillow, rep2, kZero, true).front();
  const DiracSpec ps = make_dirac_spec(pillow, plift, 8);
  for (int trial = 0; trial < 3; ++trial) {
    const Generator f1 = random_generator(pillow, 1, rng), f2 = random_generator(pillow, 1, rng);
    CHECK(representation_defect(ps, f1, f2, 3) < 1e-12);
  }
}

TEST_CASE("convolution spectral triple") {
  const auto rep1 = build_clifford(1);
  const auto z2 = rotation_circle(2, 2.0 * kPi, 16);
  const FlatGeometry geom = geometry_of(z2.base);
  const DiracSpec spec = make_dirac_spec(z2, spin_lift_search(z2, rep1, kZero).front(), 16);
  const Generator e2 = element_generator(z2, "e2", z2.group.identity(), exp_mode(geom, 2, {2, 0}));
  const Generator unit = convolution_unit(z2, geom, 0);
  const Generator half = element_generator(z2, "half", 1, exp_mode(geom, 1, {1, 0}));
  const auto rep = convolution_triple_report(spec, {e2, unit, half});
  REQUIRE(rep.generators.size() == 3);
  CHECK(std::abs(rep.generators[0].norm - 2.0) < 1e-12);
  CHECK(rep.generators[1].norm == 0.0);
  CHECK(rep.generators[2].norm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.generators[2].drift <= 1e-9);
  CHECK(rep.notes.empty());

  const auto rep2 = build_clifford(2);
  const auto pillow = negation_torus({2.0 * kPi, 2.0 * kPi}, 10);
  const FlatGeometry pg = geometry_of(pillow.base);
  const DiracSpec ps = make_dirac_spec(pillow, spin_lift_search(pillow, rep2, kZero, true).front(), 10);
  ModeFunction c = ModeFunction::zero(pg, 1);
  c.at({1, 0}) = 0.5;
  c.at({-1, 0}) = 0.5;
  const auto pr = convolution_triple_report(
      ps, {element_generator(pillow, "cos", 0, c), element_generator(pillow, "flip", 1, exp_mode(pg, 1, {0, 1}))});
  REQUIRE(pr.chirality_anticommutator.has_value());
  CHECK(*pr.chirality_anticommutator <= 1e-12);
  for (const auto& g : pr.generators) {
    REQUIRE(g.chirality_commutator.has_value());
    CHECK(*g.chirality_commutator <= 1e-12);
  }

  const auto noneff = rotation_circle(4, 2.0 * kPi, 12, 2);
  const DiracSpec ns = make_dirac_spec(noneff, spin_lift_search(noneff, rep1, kZero).front(), 12);
  const auto nr = convolution_triple_report(ns, {convolution_unit(noneff, geom, 0)});
  REQUIRE(nr.notes.size() == 1);
  CHECK(nr.notes[0].find("representation not faithful") != std::string::npos);
}
