#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "orbi/io.hpp"

using namespace orbi;
using io::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

bool same_groupoid(const FiniteGroupoid& a, const FiniteGroupoid& b) {
  if (a.object_labels() != b.object_labels() || a.arrow_labels() != b.arrow_labels()) return false;
  if (a.action_group_order() != b.action_group_order()) return false;
  for (int x = 0; x < a.num_objects(); ++x)
    if (a.unit(x) != b.unit(x)) return false;
  for (int t = 0; t < a.num_arrows(); ++t) {
    if (a.source(t) != b.source(t) || a.target(t) != b.target(t) || a.inverse(t) != b.inverse(t)) return false;
    for (int s : a.into(a.source(t)))
      if (a.compose(t, s) != b.compose(t, s)) return false;
  }
  return true;
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("rationals") {
  CHECK(io::to_string(Rational(-3, 6)) == "-1/2");
  CHECK(io::to_string(Rational(4)) == "4");
  CHECK(io::parse_rational(json("7/21"), "x") == Rational(1, 3));
  CHECK(io::parse_rational(json(5), "x") == Rational(5));
  CHECK(error_of([] { io::parse_rational(json("1/0"), "a.b"); }).rfind("a.b: malformed", 0) == 0);
  CHECK(!error_of([] { io::parse_rational(json("1/2x"), "x"); }).empty());
}

TEST_CASE("parse errors carry line and column") {
  const std::string text = "{\n  \"a\": 1,\n  \"b\": [1, 2,, 3]\n}\n";
  const std::string msg = error_of([&] { io::parse(text, "cfg.json"); });
  CHECK(msg.rfind("cfg.json:3:", 0) == 0);
  CHECK(msg.find(":3:14:") != std::string::npos);
  CHECK(error_of([] { io::check_version(json::object(), "doc"); }) == "doc: schema_version: missing field");
  CHECK(!error_of([] { io::check_version(json{{"schema_version", 2}}, "doc"); }).empty());
}

TEST_CASE("finite groupoid round trip") {
  for (const auto& g : {cyclic_double_action(3).to_finite(), group_as_groupoid(FiniteGroup::cyclic(4)),
                        cech_groupoid(cyclic_double_action(3).to_finite(), CechCover{{{0, 1}, {1, 2}, {2, 0}}}).groupoid}) {
    const json j = io::to_json(g);
    const auto back = io::finite_groupoid_from_json(io::parse(j.dump(2)));
    CHECK(same_groupoid(g, back));
    CHECK(io::to_json(back) == j);
  }
  json bad = io::to_json(group_as_groupoid(FiniteGroup::cyclic(2)));
  bad["arrows"][1]["source"] = "zero";
  CHECK(error_of([&] { io::finite_groupoid_from_json(bad); }) == "groupoid.arrows[1].source: expected an integer");
  bad = io::to_json(group_as_groupoid(FiniteGroup::cyclic(2)));
  bad.erase("inverse");
  CHECK(error_of([&] { io::finite_groupoid_from_json(bad); }) == "groupoid.inverse: missing field");
}

TEST_CASE("action groupoid round trip") {
  for (const auto& g : {cyclic_double_action(5), rotation_circle(4, 2.0 * kPi, 8, 3), negation_torus({1.5, 2.25}, 6),
                        translation_torus({2, 3}, {2.0 * kPi, kPi / 3.0}, 5)}) {
    const json j = io::to_json(g);
    const auto back = io::action_groupoid_from_json(io::parse(j.dump()));
    CHECK(back.group.table == g.group.table);
    CHECK(back.permutations == g.permutations);
    CHECK(back.isometries == g.isometries);
    CHECK(back.base.index() == g.base.index());
    CHECK(io::to_json(back).dump() == j.dump());
    CHECK(validate_groupoid(back).valid());
  }
  json bad = io::to_json(rotation_circle(2, 1.0, 4));
  bad["isometries"][1]["shift"][0] = "1/q";
  CHECK(error_of([&] { io::action_groupoid_from_json(bad); }) ==
        "groupoid.isometries[1].shift[0]: malformed rational '1/q'");
}

TEST_CASE("groupoid description file") {
  io::GroupoidFile f{cyclic_double_action(3), {CechCover{{{0, 1}, {1, 2}, {2, 0}}}}, {}};
  const json j = io::to_json(f);
  CHECK(j["schema_version"] == io::schema_version);
  const auto back = io::groupoid_file_from_json(io::parse(j.dump()));
  REQUIRE(back.covers.size() == 1);
  CHECK(back.covers[0].sheets == f.covers[0].sheets);
  CHECK(io::to_json(back) == j);

  io::GroupoidFile c{rotation_circle(2, 2.0 * kPi, 4), {}, {ArcCover{{{0.0, 0.3}, {0.5, 0.3}}}}};
  const auto cb = io::groupoid_file_from_json(io::to_json(c));
  REQUIRE(cb.arcs.size() == 1);
  CHECK(cb.arcs[0].arcs == c.arcs[0].arcs);

  json bad = j;
  bad["covers"][0]["sheets"][2] = json::array({2, 9});
  CHECK(error_of([&] { io::groupoid_file_from_json(bad); }) == "document.covers[0].sheets[2]: object 9 out of range");
}

TEST_CASE("bitorsor and cocycle round trip") {
  const Bitorsor h = a2_bitorsor(3);
  const auto back = io::bitorsor_from_json(io::parse(io::to_json(h).dump()));
  CHECK(back.carrier == h.carrier);
  CHECK(back.rho == h.rho);
  CHECK(back.alpha == h.alpha);
  for (int q = 0; q < h.size(); ++q) {
    for (int s = 0; s < h.left.num_arrows(); ++s) CHECK(back.act_left(s, q) == h.act_left(s, q));
    for (int t = 0; t < h.right.num_arrows(); ++t) CHECK(back.act_right(q, t) == h.act_right(q, t));
  }
  CHECK(validate_generalized_hom(back).valid());

  Cocycle c = induce_cocycle(h, permutation_cocycle_z2(h.left), SectionFamily{{0, 1, 2}});
  c.entries[0] = ExactMatrix::from_rows({{GaussRat(Rational(1, 3), Rational(-2, 7)), 0}, {0, GaussRat::i()}});
  const auto cb = io::cocycle_from_json(io::parse(io::to_json(c).dump()));
  CHECK(cb.rank == 2);
  CHECK(cb.entries == c.entries);
}

TEST_CASE("mode functions and generators round trip bit for bit") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto g = rotation_circle(2, 2.0 * kPi, 6);
  const FlatGeometry geom = geometry_of(g.base);
  ModeFunction f = ModeFunction::zero(geom, 6, {Rational(1, 2), Rational(0)});
  for (auto& c : f.coeffs) c = {u(rng), u(rng) / 3.0};
  const auto fb = io::mode_function_from_json(io::parse(io::to_json(f).dump()));
  CHECK(fb.coeffs == f.coeffs);
  CHECK(fb.delta == f.delta);
  CHECK(fb.geom.circumference == f.geom.circumference);

  ModeFunction t = ModeFunction::zero(FlatGeometry{2, {1.0, kPi}}, 3);
  t.at({-3, 2}) = {0.1, 1e-300};
  const auto tb = io::mode_function_from_json(io::to_json(t));
  CHECK(tb.coeffs == t.coeffs);

  Generator gen;
  gen.name = "mixed";
  gen.parts = {ModeFunction::zero(geom, 3), ModeFunction::zero(geom, 3)};
  gen.parts[1].at({2, 0}) = {0.25, -1.0 / 3.0};
  gen.parts[0].at({0, 0}) = 1.0;
  const json gj = io::to_json(gen);
  CHECK(gj["terms"].size() == 2);
  CHECK(gj["terms"][1]["element"] == 1);
  const auto gb = io::generator_from_json(io::parse(gj.dump()));
  CHECK(gb.name == gen.name);
  REQUIRE(gb.parts.size() == 2);
  CHECK(gb.parts[1].coeffs == gen.parts[1].coeffs);

  json bad = gj;
  bad["terms"][0]["mode"] = json::array({7});
  CHECK(error_of([&] { io::generator_from_json(bad); }) == "generator.terms[0].mode: mode exceeds the cutoff");
}

TEST_CASE("arrow functions and reports") {
  const auto g = cyclic_double_action(3).to_finite();
  ArrowFunction f = arrow_delta(g, 4, GaussRat(Rational(2, 3), Rational(1)));
  f[7] = GaussRat(-5);
  const json j = io::to_json(g, f);
  CHECK(j["terms"].size() == 2);
  CHECK(j["terms"][0]["label"] == g.arrow_label(4));
  CHECK(io::arrow_function_from_json(io::parse(j.dump())) == f);

  ValidationReport r;
  r.add("torsor", "carrier point 3");
  r.add("action", "q . (tau kappa)");
  const auto rb = io::validation_from_json(io::to_json(r));
  REQUIRE(rb.violations.size() == 2);
  CHECK(rb.violations[1].detail == "q . (tau kappa)");
  CHECK(io::to_json(r)["valid"] == false);

  SpectralTripleReport s;
  s.dimension = 2;
  s.cutoff = 8;
  s.eigenvalues = {-1.0, 0.1 + 0.2, std::sqrt(2.0)};
  s.chirality_square_exact = true;
  s.chirality_anticommutator = 1e-17;
  s.generators.push_back({"cos x", 2, 1.0, 1.0, 0.0, 3e-16, 0.0, 2e-17});
  s.notes = {"note"};
  const json sj = io::to_json(s);
  CHECK(io::to_json(io::triple_report_from_json(io::parse(sj.dump()))) == sj);
  CHECK(io::triple_report_from_json(sj).eigenvalues == s.eigenvalues);
}
