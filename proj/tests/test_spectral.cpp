#include <chrono>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "orbi/spectral.hpp"

using namespace orbi;

namespace {

constexpr double kPi = std::numbers::pi;
const Twist kZero{Rational(0), Rational(0)};
const Twist kHalf{Rational(1, 2), Rational(0)};

DiracSpec circle_spec(int m, int cutoff, Twist delta = kZero, int lift = 0, int step = 1) {
  auto g = rotation_circle(m, 2.0 * kPi, cutoff, step);
  auto lifts = spin_lift_search(g, build_clifford(1), delta);
  return make_dirac_spec(g, lifts.at(lift), cutoff);
}

DiracSpec pillowcase_spec(int cutoff, int lift = 0) {
  auto g = negation_torus({2.0 * kPi, 2.0 * kPi}, cutoff);
  auto lifts = spin_lift_search(g, build_clifford(2), kZero, true);
  return make_dirac_spec(g, lifts.at(lift), cutoff);
}

ModeFunction exp_mode(const FlatGeometry& g, int l, int axis = 0) {
  ModeFunction f = ModeFunction::zero(g, std::max(2, std::abs(l)));
  Mode k{0, 0};
  k[axis] = l;
  f.at(k) = 1.0;
  return f;
}

}  // namespace

TEST_CASE("flat Dirac spectra") {
  auto d = assemble_dirac(circle_spec(1, 8));
  REQUIRE(d.blocks.size() == 17);
  for (int i = 0; i < 17; ++i) CHECK(d.blocks[i](0, 0) == cplx(i - 8.0, 0.0));
  auto dh = assemble_dirac(circle_spec(1, 8, kHalf));
  for (int i = 0; i < 17; ++i) {
    CHECK(dh.blocks[i](0, 0).real() == doctest::Approx(i - 8.0 + 0.5).epsilon(1e-15));
    CHECK(dh.blocks[i](0, 0) != cplx(0.0, 0.0));
  }
  CHECK(d.hermiticity_residual == 0.0);

  auto tor = translation_torus({1, 1}, {2.0 * kPi, 2.0 * kPi}, 8);
  auto spec = make_dirac_spec(tor, untwisted_lift(tor, build_clifford(2), kZero), 8);
  auto dt = assemble_dirac(spec);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dt.blocks[spec.modes().index({3, 4})]);
  CHECK(es.eigenvalues()(0) == doctest::Approx(-5.0).epsilon(1e-14));
  CHECK(es.eigenvalues()(1) == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("invalid lifts are rejected") {
  auto g = rotation_circle(2, 2.0 * kPi, 8);
  CHECK_THROWS_AS(make_dirac_spec(g, untwisted_lift(g, build_clifford(1), kHalf), 8), Error);
  CHECK_THROWS_AS(make_dirac_spec(g, untwisted_lift(g, build_clifford(1), kZero), 4), Error);

  // negation lifted without the spin rotation: U_g D U_g^-1 = -D
  auto pillow = negation_torus({2.0 * kPi, 2.0 * kPi}, 8);
  DiracSpec forced;
  forced.groupoid = pillow;
  forced.rep = build_clifford(2);
  forced.lift = untwisted_lift(pillow, forced.rep, kZero);
  forced.lift.matrix[1] = ExactMatrix::identity(2);
  forced.cutoff = 8;
  CHECK_THROWS_WITH_AS(assemble_dirac(forced), doctest::Contains("lift/action mismatch"), Error);

  // k -> -k - 1 leaves the symmetric truncation for a twisted spin structure
  const Twist twisted{Rational(1, 2), Rational(0)};
  auto lifts = spin_lift_search(pillow, forced.rep, twisted, true);
  REQUIRE_FALSE(lifts.empty());
  forced.lift = lifts[0];
  CHECK_THROWS_AS(assemble_dirac(forced), Error);
}

TEST_CASE("invariant projectors") {
  auto spec = circle_spec(2, 8);
  auto p = invariant_projector(spec);
  Eigen::MatrixXcd pd = Eigen::MatrixXcd(p);
  for (int i = 0; i < 17; ++i) {
    const int k = i - 8;
    CHECK(pd(i, i) == cplx(k % 2 == 0 ? 1.0 : 0.0, 0.0));
  }
  CHECK((pd * pd - pd).cwiseAbs().maxCoeff() == 0.0);

  auto trivial = circle_spec(1, 8);
  CHECK(Eigen::MatrixXcd(invariant_projector(trivial)).isIdentity(0.0));

  for (int lift : {0, 1}) {
    auto ps = pillowcase_spec(8, lift);
    Eigen::MatrixXcd pp = Eigen::MatrixXcd(invariant_projector(ps));
    const int n_modes = 17 * 17;
    // trace formula: (tr 1 + tr U_g) / 2 with tr U_g = tr rho_s(g) = 0 at the fixed mode
    CHECK(pp.trace().real() == doctest::Approx(n_modes).epsilon(1e-14));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(pp);
    int rank = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) rank += es.eigenvalues()(i) > 0.5;
    CHECK(rank == n_modes);
    auto d = assemble_dirac(ps);
    CHECK(frobenius(SparseC(invariant_projector(ps) * d.matrix - d.matrix * invariant_projector(ps))) == 0.0);
  }
}

TEST_CASE("orbifold integration") {
  auto g = rotation_circle(2, 2.0 * kPi, 8);
  const int n = sample_grid_size(g.base);
  std::vector<cplx> one(n, 1.0);
  CHECK(std::abs(orbifold_integral(single_chart_measure(g), one) - kPi) < 1e-10);

  std::vector<cplx> f(n);
  for (int i = 0; i < n; ++i) f[i] = 1.0 + std::cos(2.0 * 2.0 * kPi * i / n);
  ModeFunction rho = ModeFunction::zero(geometry_of(g.base), 2);
  rho.at({0, 0}) = 0.5;
  rho.at({2, 0}) = 0.25;
  rho.at({-2, 0}) = 0.25;
  const cplx a = orbifold_integral(single_chart_measure(g), f);
  const cplx b = orbifold_integral(two_chart_measure(g, rho), f);
  const cplx c = orbifold_integral(fundamental_domain_measure(g), f);
  CHECK(std::abs(a - kPi) < 1e-10);
  CHECK(std::abs(a - b) < 1e-10);
  CHECK(std::abs(a - c) < 1e-10);

  ModeFunction odd = ModeFunction::zero(geometry_of(g.base), 2);
  odd.at({1, 0}) = 0.5;
  CHECK_THROWS_AS(two_chart_measure(g, odd), Error);

  auto z2 = group_as_groupoid(FiniteGroup::cyclic(2));
  CHECK(std::abs(orbifold_integral(finite_measure(z2), {1.0}) - 1.0) < 1e-15);

  auto broken = single_chart_measure(g);
  broken.charts[0].rho[3] = 0.5;
  CHECK(partition_defect(broken) > 0.1);
  CHECK_THROWS_AS(orbifold_integral(broken, one), Error);

  // pillowcase: the four fixed points carry weight 1/2 in the fundamental domain
  auto pillow = negation_torus({2.0 * kPi, 2.0 * kPi}, 6);
  const int pn = sample_grid_size(pillow.base);
  std::vector<cplx> pf(pn * pn);
  for (int i = 0; i < pn; ++i)
    for (int j = 0; j < pn; ++j) pf[i * pn + j] = 1.0 + std::cos(2.0 * kPi * (i + 2 * j) / pn);
  CHECK(std::abs(orbifold_integral(single_chart_measure(pillow), pf) - 2.0 * kPi * kPi) < 1e-10);
  CHECK(std::abs(orbifold_integral(fundamental_domain_measure(pillow), pf) - 2.0 * kPi * kPi) < 1e-10);

  // non-effective Z4 acting through a half turn: kernel Z2, weight 2/4
  auto ne = rotation_circle(4, 2.0 * kPi, 8, 2);
  CHECK(std::abs(orbifold_integral(single_chart_measure(ne), one) - kPi) < 1e-10);
  CHECK(std::abs(orbifold_integral(fundamental_domain_measure(ne), one) - kPi) < 1e-10);
}

TEST_CASE("quotient spectra of free rotations") {
  for (int m : {2, 4}) {
    const auto t0 = std::chrono::steady_clock::now();
    auto spec = circle_spec(m, 32);
    auto ind = induced_dirac(spec, 2);
    CHECK(ind.matched());
    CHECK(ind.delta_down == kZero);
    // invariant modes k = m j, eigenvalue k; downstairs eigenvalue j * 2 pi / (2 pi / m)
    std::vector<double> oracle;
    for (int k = -30; k <= 30; ++k)
      if (k % m == 0) oracle.push_back(k);
    REQUIRE(ind.up_spectrum.size() == oracle.size());
    for (size_t i = 0; i < oracle.size(); ++i) {
      CHECK(std::abs(ind.up_spectrum[i] - oracle[i]) < 1e-9);
      CHECK(std::abs(ind.down_spectrum[i] - oracle[i]) < 1e-9);
    }
    CHECK(ind.unitarity_residual < 1e-10);
    CHECK(ind.conjugation_residual < 1e-9);
    CHECK(ind.representative_defect < 1e-10);
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 10.0);
  }
  // sign lift: odd modes survive and the quotient needs the twisted spin structure
  auto ind = induced_dirac(circle_spec(2, 16, kZero, 1), 2);
  CHECK(ind.matched());
  CHECK(ind.delta_down == kHalf);

  CHECK_THROWS_AS(covering_of(rotation_circle(4, 2.0 * kPi, 8, 2)), Error);
  CHECK_THROWS_AS(covering_of(negation_torus({1.0, 1.0}, 8)), Error);
}

TEST_CASE("spin structure correspondence under coverings") {
  for (int m : {2, 4}) {
    auto sc = spin_correspondence(rotation_circle(m, 2.0 * kPi, 8), 8, 2);
    CHECK(sc.upstairs.size() == 2);
    CHECK(sc.downstairs.size() == 2);
    CHECK(sc.bijective);
    CHECK(sc.tangent_cocycles_agree);
  }
  auto sc = spin_correspondence(translation_torus({2, 1}, {2.0 * kPi, 2.0 * kPi}, 8), 8, 2);
  CHECK(sc.upstairs.size() == 4);
  CHECK(sc.downstairs.size() == 4);
  CHECK(sc.bijective);
  CHECK(sc.tangent_cocycles_agree);
}

TEST_CASE("commutator norms on the interior band") {
  auto spec = circle_spec(1, 16);
  const auto geom = spec.geometry();
  std::vector<Generator> gens;
  for (int l : {1, 2, 3}) gens.push_back(function_generator(spec.groupoid, "e" + std::to_string(l), exp_mode(geom, l)));
  ModeFunction c = ModeFunction::zero(geom, 2);
  c.at({0, 0}) = 3.0;
  gens.push_back(function_generator(spec.groupoid, "const", c));
  auto rep = check_spectral_triple(spec, gens);
  for (int l = 0; l < 3; ++l) {
    CHECK(std::abs(rep.generators[l].norm - (l + 1)) < 1e-12);
    CHECK(rep.generators[l].drift <= 1e-9);
    CHECK(rep.generators[l].symbol_residual < 1e-12);
  }
  CHECK(rep.generators[3].norm == 0.0);
  CHECK(rep.growth_exponent == doctest::Approx(1.0).epsilon(0.15));
  CHECK(rep.hermiticity_residual == 0.0);
}

TEST_CASE("divergence identity on invariant spinors") {
  CHECK(divergence_residual(circle_spec(2, 32), 2, 4, 11u) <= 1e-10);
  CHECK(divergence_residual(circle_spec(2, 32, kZero, 1), 2, 4, 12u) <= 1e-10);
  CHECK(divergence_residual(pillowcase_spec(10), 2, 2, 13u) <= 1e-10);
}

TEST_CASE("pillowcase chirality and summability") {
  auto spec = pillowcase_spec(24);
  const auto geom = spec.geometry();
  ModeFunction f = ModeFunction::zero(geom, 2);
  f.at({1, 0}) = 0.5;
  f.at({-1, 0}) = 0.5;  // cos x is negation invariant
  ModeFunction h = ModeFunction::zero(geom, 2);
  h.at({1, 1}) = 0.5;
  h.at({-1, -1}) = 0.5;
  auto rep = check_spectral_triple(spec, {function_generator(spec.groupoid, "cos x", f),
                                          function_generator(spec.groupoid, "cos(x+y)", h)});
  REQUIRE(rep.chirality_square_exact.has_value());
  CHECK(*rep.chirality_square_exact);
  CHECK(*rep.chirality_anticommutator <= 1e-12);
  for (const auto& g : rep.generators) {
    CHECK(*g.chirality_commutator <= 1e-12);
    CHECK(g.projector_residual <= 1e-12);
    CHECK(g.symbol_residual <= 1e-12);
  }
  CHECK(std::abs(rep.growth_exponent - 2.0) / 2.0 <= 0.15);
}
