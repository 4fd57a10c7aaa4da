#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "orbi/clifford.hpp"
#include "orbi/fourier.hpp"
#include "orbi/kernels.hpp"

using namespace orbi;

namespace {

ModeFunction random_function(const FlatGeometry& g, int cutoff, Twist delta, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ModeFunction f = ModeFunction::zero(g, cutoff, delta);
  for (auto& c : f.coeffs) c = cplx(u(rng), u(rng));
  return f;
}

const Twist kHalf{Rational(1, 2), Rational(0)};

}  // namespace

TEST_CASE("grid evaluation and DFT round trip") {
  FlatGeometry circle{1, {2.0 * std::numbers::pi, 0.0}};
  FlatGeometry torus{2, {2.0 * std::numbers::pi, 3.0}};
  for (Twist t : {Twist{Rational(0), Rational(0)}, kHalf}) {
    auto f = random_function(circle, 8, t, 1);
    auto back = from_grid(circle, {32, 1}, evaluate(f, {32, 1}), 8, t);
    CHECK(max_abs_diff(f, back) < 1e-12);
    auto g = random_function(torus, 5, t, 2);
    auto vals = evaluate(g, {20, 20});
    CHECK(max_abs_diff(g, from_grid(torus, {20, 20}, vals, 5, t)) < 1e-12);
    // separable path against the pointwise kernel
    auto direct = evaluate_at(g, grid_points(torus, {20, 20}));
    double worst = 0.0;
    for (size_t i = 0; i < vals.size(); ++i) worst = std::max(worst, std::abs(vals[i] - direct[i]));
    CHECK(worst < 1e-11);
  }
}

TEST_CASE("mode products and derivatives against the grid") {
  FlatGeometry circle{1, {2.0 * std::numbers::pi, 0.0}};
  auto a = random_function(circle, 4, {Rational(0), Rational(0)}, 3);
  auto b = random_function(circle, 4, kHalf, 4);
  auto ab = multiply(a, b, 8);
  auto va = evaluate(a, {40, 1}), vb = evaluate(b, {40, 1}), vab = evaluate(ab, {40, 1});
  double worst = 0.0;
  for (size_t i = 0; i < va.size(); ++i) worst = std::max(worst, std::abs(va[i] * vb[i] - vab[i]));
  CHECK(worst < 1e-12);

  // d/dx cos(2x) = -2 sin(2x), via centered differences
  ModeFunction c = ModeFunction::zero(circle, 4);
  c.at({2, 0}) = 0.5;
  c.at({-2, 0}) = 0.5;
  auto dc = derivative(c, 0);
  const double h = 1e-5;
  for (double x : {0.1, 1.3, 4.0}) {
    auto v = evaluate_at(dc, {x});
    CHECK(v[0].real() == doctest::Approx(-2.0 * std::sin(2.0 * x)).epsilon(1e-12));
    CHECK(v[0].real() == doctest::Approx((std::cos(2 * (x + h)) - std::cos(2 * (x - h))) / (2 * h)).epsilon(1e-8));
  }
}

TEST_CASE("kernel serial and parallel paths agree") {
  FlatGeometry torus{2, {2.0, 5.0}};
  auto f = random_function(torus, 6, {Rational(0), Rational(1, 2)}, 5);
  std::vector<double> freqs;
  for (int i = 0; i < f.modes.size(); ++i) {
    Mode k = f.modes.mode(i);
    freqs.push_back(k[0] * 2.0 * std::numbers::pi / 2.0);
    freqs.push_back((k[1] + 0.5) * 2.0 * std::numbers::pi / 5.0);
  }
  auto pts = grid_points(torus, {13, 17});
  auto s = kernels::evaluate_modes(f.coeffs, freqs, pts, 2, kernels::Exec::serial);
  auto p = kernels::evaluate_modes(f.coeffs, freqs, pts, 2, kernels::Exec::parallel);
  CHECK(s == p);

  std::vector<Eigen::MatrixXcd> blocks;
  std::mt19937 rng(9);
  std::normal_distribution<double> n;
  for (int b = 0; b < 40; ++b) {
    Eigen::MatrixXcd m(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = cplx(n(rng), n(rng));
    blocks.push_back(m + m.adjoint());
  }
  CHECK(kernels::block_eigenvalues(blocks, kernels::Exec::serial) ==
        kernels::block_eigenvalues(blocks, kernels::Exec::parallel));

  Eigen::MatrixXcd a = Eigen::MatrixXcd::Random(30, 20), b = Eigen::MatrixXcd::Random(20, 25);
  CHECK((kernels::multiply(a, b, kernels::Exec::serial) - kernels::multiply(a, b, kernels::Exec::parallel))
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("Clifford modules") {
  auto c1 = build_clifford(1);
  CHECK(c1.spin_dim() == 1);
  CHECK(c1.gamma[0].is_identity());
  CHECK_FALSE(c1.chirality.has_value());

  auto c2 = build_clifford(2);
  CHECK(validate_clifford(c2).valid());
  const GaussRat i = GaussRat::i();
  CHECK(c2.gamma[0] == ExactMatrix::from_rows({{0, 1}, {1, 0}}));
  CHECK(c2.gamma[1] == ExactMatrix::from_rows({{0, -i}, {i, 0}}));
  CHECK(*c2.chirality == ExactMatrix::from_rows({{1, 0}, {0, -1}}));
  CHECK((*c2.chirality * *c2.chirality).is_identity());
  CHECK_THROWS_AS(build_clifford(3), Error);

  auto broken = c2;
  broken.gamma[1] = c2.gamma[0];
  CHECK(validate_clifford(broken).has("clifford"));
}

TEST_CASE("spin lift search") {
  auto rep1 = build_clifford(1);
  const Twist zero{Rational(0), Rational(0)};
  auto z2 = rotation_circle(2, 2.0 * std::numbers::pi, 8);
  auto lifts = spin_lift_search(z2, rep1, zero);
  REQUIRE(lifts.size() == 2);
  CHECK(lifts[0].twist[1] == GaussRat(1));
  CHECK(lifts[1].twist[1] == GaussRat(-1));
  // exp(-2 pi i (k + 1/2) / 2) squares to -1: no sign lift, two fourth-root lifts
  CHECK(spin_lift_search(z2, rep1, kHalf).empty());
  CHECK(spin_lift_search(z2, rep1, kHalf, true).size() == 2);

  auto z4 = rotation_circle(4, 2.0 * std::numbers::pi, 8);
  CHECK(spin_lift_search(z4, rep1, zero).size() == 2);
  CHECK(spin_lift_search(z4, rep1, kHalf).empty());

  auto trivial = rotation_circle(1, 2.0 * std::numbers::pi, 8);
  CHECK(spin_lift_search(trivial, rep1, zero).size() == 1);
  CHECK(spin_lift_search(trivial, rep1, kHalf).size() == 1);

  auto rep2 = build_clifford(2);
  auto pillow = negation_torus({2.0 * std::numbers::pi, 2.0 * std::numbers::pi}, 8);
  // (gamma^1 gamma^2)^2 = -1, so h(g)^2 = -1
  CHECK(spin_lift_search(pillow, rep2, zero).empty());
  auto plifts = spin_lift_search(pillow, rep2, zero, true);
  REQUIRE(plifts.size() == 2);
  const ExactMatrix& w = *rep2.chirality;
  for (const auto& l : plifts) {
    CHECK((l.matrix[1] == w || l.matrix[1] == w.scaled(GaussRat(-1))));
    CHECK(l.matrix[1] * w == w * l.matrix[1]);
    CHECK(validate_spin_lift(pillow, rep2, l).valid());
  }

  auto bad = untwisted_lift(z2, rep1, kHalf);
  CHECK(validate_spin_lift(z2, rep1, bad).has("cocycle"));
}
