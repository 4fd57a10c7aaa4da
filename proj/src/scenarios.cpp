#include "orbi/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "orbi/kernels.hpp"

namespace orbi::scenario {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
const Twist kZero{Rational(0), Rational(0)};

// ---------------------------------------------------------------- context

class Context {
 public:
  Context(const Config& cfg, json params, std::map<std::string, double> tol, Report& report)
      : cfg_(cfg), params_(std::move(params)), tol_(std::move(tol)), report_(report) {}

  const std::string& kind() const { return cfg_.kind; }
  double tol(const std::string& key) const { return tol_.at(key); }
  void spectrum(const std::string& label, const std::vector<double>& v) { report_.spectra.push_back({label, v}); }

  bool has(const std::string& key) const { return params_.contains(key); }
  int param(const std::string& key) const { return params_.at(key).get<int>(); }
  double real_param(const std::string& key) const { return params_.at(key).get<double>(); }
  bool params_bool(const std::string& key) const { return params_.at(key).get<bool>(); }

  int n() const { return param("N"); }
  int modes() const { return param("modes"); }
  int buffer() const { return param("buffer"); }

  const Bitorsor& bitorsor() {
    if (!h_) h_ = a2_bitorsor(n());
    return *h_;
  }

  CechCover cover_y() const {
    CechCover c;
    for (int y = 0; y < n(); ++y) c.sheets.push_back({y, (y + 1) % n()});
    return c;
  }

  const ActionGroupoid& action() {
    if (action_) return *action_;
    if (kind() == "circle") {
      action_ = rotation_circle(param("m"), real_param("circumference"), modes(), param("step"));
    } else if (kind() == "torus") {
      const auto& c = params_.at("circumferences");
      action_ = negation_torus({c[0].get<double>(), c[1].get<double>()}, modes());
    } else if (kind() == "groupoid-file") {
      const auto& g = file().groupoid;
      if (!std::holds_alternative<ActionGroupoid>(g)) throw Error("the groupoid file holds a finite groupoid");
      action_ = std::get<ActionGroupoid>(g);
    } else {
      throw Error("no action groupoid for kind " + kind());
    }
    return *action_;
  }

  const io::GroupoidFile& file() {
    if (!file_) file_ = io::read_groupoid_file(params_.at("groupoid").get<std::string>());
    return *file_;
  }

  FiniteGroupoid finite() {
    if (kind() == "groupoid-file") {
      const auto& g = file().groupoid;
      if (const auto* f = std::get_if<FiniteGroupoid>(&g)) return *f;
      return std::get<ActionGroupoid>(g).to_finite();
    }
    return action().to_finite();
  }

  bool finite_based() {
    if (kind() == "a2") return true;
    if (kind() == "groupoid-file") {
      const auto& g = file().groupoid;
      return std::holds_alternative<FiniteGroupoid>(g) || !std::get<ActionGroupoid>(g).is_fourier_flavor();
    }
    return false;
  }

  std::vector<SpinLift> lifts(const ActionGroupoid& g) const {
    const int dim = base_dimension(g.base);
    return spin_lift_search(g, build_clifford(dim), kZero, dim == 2);
  }

  DiracSpec spec_at(int cutoff) {
    const ActionGroupoid& g = action();
    const auto all = lifts(g);
    const int lift = has("lift") ? param("lift") : 0;
    if (lift < 0 || lift >= static_cast<int>(all.size()))
      throw Error("lift index " + std::to_string(lift) + " out of range (" + std::to_string(all.size()) + " lifts)");
    return make_dirac_spec(g, all[lift], cutoff);
  }

  const DiracSpec& spec() {
    if (!spec_) spec_ = spec_at(modes());
    return *spec_;
  }

  const InducedDirac& induced() {
    if (!induced_) induced_ = induced_dirac(spec(), buffer());
    return *induced_;
  }

  // Plane wave e^{i l theta} on the first axis.
  ModeFunction wave(int cutoff, int l, int axis = 0) const {
    ModeFunction f = ModeFunction::zero(geometry_of(action_->base), cutoff);
    Mode k{0, 0};
    k[axis] = l;
    f.at(k) = 1.0;
    return f;
  }

  // Smallest l >= 1 with cos(l theta_1) invariant.
  int invariant_frequency() {
    const ActionGroupoid& g = action();
    for (int l = 1; l <= cutoff_of(g.base); ++l) {
      ModeFunction c = ModeFunction::zero(geometry_of(g.base), l);
      c.at({l, 0}) = 0.5;
      c.at({-l, 0}) = 0.5;
      if (check_invariance(g, c).invariant(1e-12)) return l;
    }
    throw Error("no invariant cosine within the cutoff");
  }

  int nontrivial_element() {
    const ActionGroupoid& g = action();
    for (int a = 0; a < g.group.order(); ++a)
      if (a != g.group.identity()) return a;
    return g.group.identity();
  }

  const std::vector<Generator>& generators() {
    if (!generators_.empty()) return generators_;
    const ActionGroupoid& g = action();
    if (kind() == "torus") {
      ModeFunction f = ModeFunction::zero(geometry_of(g.base), 2);
      f.at({1, 0}) = 0.5;
      f.at({-1, 0}) = 0.5;
      ModeFunction h = ModeFunction::zero(geometry_of(g.base), 2);
      h.at({1, 1}) = 0.5;
      h.at({-1, -1}) = 0.5;
      generators_ = {function_generator(g, "cos x", f), function_generator(g, "cos(x+y)", h)};
    } else {
      const int l0 = invariant_frequency();
      for (int j = 1; j <= 3 && j * l0 <= modes() / 4; ++j)
        generators_.push_back(function_generator(g, "e^{i" + std::to_string(j * l0) + "theta}", wave(j * l0, j * l0)));
      if (g.group.order() > 1)
        generators_.push_back(element_generator(
            g, "e^{i" + std::to_string(l0) + "theta} at element " + std::to_string(nontrivial_element()),
            nontrivial_element(), wave(l0, l0)));
    }
    return generators_;
  }

  // Frequency l of each generator (norm of [D, pi(f)] is |l| 2 pi / L).
  std::vector<int> generator_frequencies() {
    std::vector<int> out;
    for (const auto& gen : generators()) {
      int l = 0;
      for (const auto& p : gen.parts)
        for (int i = 0; i < p.modes.size(); ++i)
          if (p.coeffs[i] != cplx(0.0, 0.0)) l = std::max(l, p.modes.sup_norm(i));
      out.push_back(l);
    }
    return out;
  }

  const SpectralTripleReport& triple() {
    if (!triple_) triple_ = convolution_triple_report(spec(), generators(), buffer());
    return *triple_;
  }

 private:
  const Config& cfg_;
  json params_;
  std::map<std::string, double> tol_;
  Report& report_;
  std::optional<Bitorsor> h_;
  std::optional<ActionGroupoid> action_;
  std::optional<io::GroupoidFile> file_;
  std::optional<DiracSpec> spec_;
  std::optional<InducedDirac> induced_;
  std::optional<SpectralTripleReport> triple_;
  std::vector<Generator> generators_;
};

using CheckFn = std::function<void(Context&, CheckResult&)>;

struct CheckDef {
  CheckInfo info;
  CheckFn run;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << v;
  return os.str();
}

void expect(CheckResult& r, bool ok, const std::string& what) {
  if (ok) return;
  r.passed = false;
  if (!r.detail.empty()) r.detail += "; ";
  r.detail += what;
}

Cocycle sign_cocycle(const FiniteGroupoid& z2) { return character_cocycle(z2, {GaussRat(1), GaussRat(-1)}); }

// Right action replaced by q . (a, y) = q + a: breaks the torsor axioms.
Bitorsor mutated(const Bitorsor& good) {
  Bitorsor h(good.left, good.right, good.carrier, good.rho, good.alpha);
  const int mod = static_cast<int>(good.carrier.size());
  for (int q = 0; q < h.size(); ++q) {
    for (int s : h.left.out_of(h.rho[q])) h.set_left(s, q, good.act_left(s, q));
    for (int t : h.right.into(h.alpha[q])) h.set_right(q, t, (q + h.right.action_element(t)) % mod);
  }
  return h;
}

// Brute force: every Theta-arrow sigma with sigma . (beta(s tau) . tau^-1) = beta(t tau).
std::vector<int> transporters(const Bitorsor& h, const SectionFamily& beta, int tau) {
  const int moved = h.act_right(beta.point[h.right.source(tau)], h.right.inverse(tau));
  std::vector<int> out;
  for (int sigma = 0; sigma < h.left.num_arrows(); ++sigma)
    if (h.left.source(sigma) == h.rho[moved] && h.act_left(sigma, moved) == beta.point[h.right.target(tau)])
      out.push_back(sigma);
  return out;
}

SectionFamily base_sections(const Bitorsor& h) {
  SectionFamily b;
  for (int y = 0; y < h.right.num_objects(); ++y)
    for (int q = 0; q < h.size(); ++q)
      if (h.alpha[q] == y) {
        b.point.push_back(q);
        break;
      }
  return b;
}

// The other point of each alpha-fibre on even objects.
SectionFamily shifted_sections(const Bitorsor& h) {
  SectionFamily b = base_sections(h);
  for (int y = 0; y < static_cast<int>(b.point.size()); y += 2)
    for (int q = h.size() - 1; q >= 0; --q)
      if (h.alpha[q] == y && q != b.point[y]) {
        b.point[y] = q;
        break;
      }
  return b;
}

GaussRat small(std::mt19937& rng) {
  std::uniform_int_distribution<int> u(-5, 5);
  return GaussRat(Rational(u(rng)), Rational(u(rng), 1 + std::abs(u(rng))));
}

FiniteValues random_combination(const ExactMatrix& basis, std::mt19937& rng) {
  FiniteValues v(basis.rows());
  for (int c = 0; c < basis.cols(); ++c) {
    const GaussRat a = small(rng);
    for (int r = 0; r < basis.rows(); ++r) v[r] += a * basis(r, c);
  }
  return v;
}

ModeFunction random_function(const FlatGeometry& g, int cutoff, Twist delta, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ModeFunction f = ModeFunction::zero(g, cutoff, delta);
  for (auto& c : f.coeffs) c = cplx(u(rng), u(rng));
  return f;
}

// ---------------------------------------------------------------- bitorsor checks

void bitorsor_validation(Context& c, CheckResult& r) {
  const Bitorsor& h = c.bitorsor();
  const auto gen = validate_generalized_hom(h, TorsorMode::generalized);
  const auto bi = validate_generalized_hom(h, TorsorMode::bitorsor);
  r.metrics = {{"carrier", h.size()}, {"violations", bi.violations.size()}};
  expect(r, gen.valid(), "generalized homomorphism axioms fail");
  expect(r, bi.valid(), bi.valid() ? "" : "bitorsor axioms fail: " + bi.violations.front().detail);
}

void mutation_witness(Context& c, CheckResult& r) {
  const auto rep = validate_generalized_hom(mutated(c.bitorsor()));
  expect(r, !rep.valid(), "mutated right action was accepted");
  if (!rep.valid()) {
    r.metrics = {{"kind", rep.violations.front().kind}, {"witness", rep.violations.front().detail}};
    expect(r, !rep.violations.front().detail.empty(), "violation has no witness");
  }
}

void fibre_partition(Context& c, CheckResult& r) {
  const Bitorsor& h = c.bitorsor();
  json per = json::array();
  for (int y = 0; y < h.right.num_objects(); ++y) {
    const auto rep = fibre_partition_report(h, y);
    std::vector<int> sizes;
    for (const auto& b : rep.blocks) sizes.push_back(static_cast<int>(b.points.size()));
    per.push_back({{"object", y}, {"isotropy_rank", rep.xi_isotropy_rank}, {"block_sizes", sizes}});
    expect(r, rep.consistent(), "fibre over object " + std::to_string(y) + " is inconsistent");
  }
  r.metrics = {{"fibres", per}};
}

void weak_equivalence(Context& c, CheckResult& r) {
  const auto w = weak_equivalence_pair(c.bitorsor());
  r.metrics = {{"middle_objects", w.middle.num_objects()}, {"middle_arrows", w.middle.num_arrows()}};
  expect(r, w.report.valid(), "middle groupoid invalid");
  expect(r, w.left_surjective && w.right_surjective, "projection not essentially surjective");
  expect(r, w.left_cartesian && w.right_cartesian, "projection not cartesian");
  expect(r, w.left_functor && w.right_functor, "projection not a functor");
}

void induced_sign_cocycle(Context& c, CheckResult& r) {
  const Bitorsor& h = c.bitorsor();
  const Cocycle sign = sign_cocycle(h.left);
  const SectionFamily beta = base_sections(h);
  const Cocycle ind = induce_cocycle(h, sign, beta);
  int mismatches = 0, minus = 0;
  for (int tau = 0; tau < h.right.num_arrows(); ++tau) {
    const auto cand = transporters(h, beta, tau);
    if (cand.size() != 1) {
      expect(r, false, "arrow " + h.right.arrow_label(tau) + " has " + std::to_string(cand.size()) + " transporters");
      continue;
    }
    if (ind.entries[tau] != sign.entries[cand.front()]) ++mismatches;
    if (sign.entries[cand.front()](0, 0) == GaussRat(-1)) ++minus;
  }
  r.metrics = {{"arrows", h.right.num_arrows()}, {"mismatches", mismatches}, {"minus_entries", minus}};
  expect(r, validate_cocycle(ind).valid(), "induced cocycle fails the cocycle law");
  expect(r, mismatches == 0, std::to_string(mismatches) + " entries differ from the brute-force oracle");
}

void section_independence(Context& c, CheckResult& r) {
  const Bitorsor& h = c.bitorsor();
  const SectionFamily b1 = base_sections(h), b2 = shifted_sections(h);
  for (const auto& cocycle : {sign_cocycle(h.left), permutation_cocycle_z2(h.left)}) {
    const Cocycle g1 = induce_cocycle(h, cocycle, b1), g2 = induce_cocycle(h, cocycle, b2);
    const auto cb = cohomologous(g1, g2);
    expect(r, cb.found(), "no coboundary between the section families (rank " + std::to_string(cocycle.rank) + ")");
    if (cb.found()) expect(r, twist(g1, cb.lambda).entries == g2.entries, "coboundary does not twist g1 into g2");
  }
  r.metrics = {{"sections_1", b1.point}, {"sections_2", b2.point}};
}

void composition_round_trip(Context& c, CheckResult& r) {
  const Bitorsor& h = c.bitorsor();
  const auto left = find_two_morphism(compose_homs(h, inverse(h)), identity_bitorsor(h.left));
  const auto right = find_two_morphism(compose_homs(inverse(h), h), identity_bitorsor(h.right));
  r.metrics = {{"left_nodes", left.nodes}, {"right_nodes", right.nodes}};
  expect(r, left.found(), "h o h^-1 is not 2-isomorphic to the identity: " + left.reason);
  expect(r, right.found(), "h^-1 o h is not 2-isomorphic to the identity: " + right.reason);
}

void cech_localization(Context& c, CheckResult& r) {
  if (c.kind() == "groupoid-file") {
    const auto& file = c.file();
    int checked = 0;
    for (size_t i = 0; i < file.covers.size(); ++i) {
      const auto cb = cech_bitorsor(c.finite(), file.covers[i]);
      expect(r, validate_generalized_hom(cb.bitorsor).valid(), "cover " + std::to_string(i) + " localization invalid");
      ++checked;
    }
    for (size_t i = 0; i < file.arcs.size(); ++i) {
      const auto cg = cech_groupoid(c.action(), file.arcs[i]);
      expect(r, validate_groupoid(cg.groupoid).valid(), "arc cover " + std::to_string(i) + " Cech groupoid invalid");
      ++checked;
    }
    r.metrics = {{"covers", checked}};
    return;
  }
  const Bitorsor& h = c.bitorsor();
  const auto loc = localize_cech(h, trivial_cover(h.left), c.cover_y());
  const auto cy = cech_bitorsor(h.right, c.cover_y());
  const auto rep = validate_generalized_hom(loc.bitorsor);
  r.metrics = {{"localized_carrier", loc.bitorsor.size()}, {"cech_carrier", cy.bitorsor.size()}};
  expect(r, rep.valid(), rep.valid() ? "" : "localized bitorsor invalid: " + rep.violations.front().detail);
  expect(r, validate_generalized_hom(cy.bitorsor).valid(), "canonical Cech bitorsor invalid");
}

void cech_recombination(Context& c, CheckResult& r) {
  const Bitorsor& h = c.bitorsor();
  const auto loc = localize_cech(h, trivial_cover(h.left), c.cover_y());
  const auto cx = cech_bitorsor(h.left, trivial_cover(h.left));
  const auto cy = cech_bitorsor(h.right, c.cover_y());
  const auto back = compose_homs(compose_homs(cx.bitorsor, loc.bitorsor), inverse(cy.bitorsor));
  expect(r, find_two_morphism(back, h).found(), "localization does not recombine to h");
  const auto cc = compose_homs(compose_homs(cy.bitorsor, inverse(cy.bitorsor)), cy.bitorsor);
  expect(r, find_two_morphism(cc, cy.bitorsor).found(), "C o C^-1 o C is not 2-isomorphic to C");
}

void cech_induction(Context& c, CheckResult& r) {
  const Bitorsor& h = c.bitorsor();
  const auto loc = localize_cech(h, trivial_cover(h.left), c.cover_y());
  const Cocycle g = restrict_to_cech(sign_cocycle(h.left), loc.left);
  std::vector<int> base(c.n());
  for (int y = 0; y < c.n(); ++y) base[y] = base_sections(h).point[y];
  const auto beta = make_sections(loc, base, std::vector<int>(c.n(), 0));
  const Cocycle ind = induce_cocycle(loc, g, beta);
  const Cocycle global = induce_cocycle(h, sign_cocycle(h.left), base_sections(h));
  int mismatches = 0;
  for (int t = 0; t < loc.right.groupoid.num_arrows(); ++t)
    if (ind.entries[t] != global.entries[loc.right.arrow_base[t]]) ++mismatches;
  r.metrics = {{"cech_arrows", loc.right.groupoid.num_arrows()}, {"mismatches", mismatches}};
  expect(r, validate_cocycle(ind).valid(), "localized induced cocycle invalid");
  expect(r, mismatches == 0, "localized induction differs from the global one");
  const auto beta2 = make_sections(loc, shifted_sections(h).point, std::vector<int>(c.n(), 0));
  expect(r, cohomologous(ind, induce_cocycle(loc, g, beta2)).found(), "shifted sections not cohomologous");
}

void bundle_reconstruction(Context& c, CheckResult& r) {
  const Bitorsor& h = c.bitorsor();
  for (const auto& cocycle : {sign_cocycle(h.left), permutation_cocycle_z2(h.left)}) {
    const auto ind = induced_bundle(h, bundle_from_cocycle(cocycle));
    const auto cech = cech_groupoid(h.right, c.cover_y());
    const auto rb = reconstruct(restrict_to_cech(ind.as_cocycle(), cech), cech);
    expect(r, rb.action == ind.action,
           "rank " + std::to_string(cocycle.rank) + " bundle not recovered from its Cech cocycle");
    expect(r, validate_cocycle(ind.as_cocycle()).valid(), "induced bundle cocycle invalid");
  }
}

void finite_transport(Context& c, CheckResult& r) {
  const Bitorsor& h = c.bitorsor();
  std::mt19937 rng(11);
  int trials = 0, failures = 0;
  auto tally = [&](bool ok) {
    ++trials;
    failures += ok ? 0 : 1;
  };
  for (int t = 0; t < 20; ++t) {
    const FiniteValues f(h.left.num_objects(), small(rng)), g(h.left.num_objects(), small(rng));
    const FiniteValues pf = pushforward_function(h, f);
    tally(!invariance_witness(h.right, pf).has_value());
    tally(pullback_function(h, pf) == f);
    FiniteValues fg(f.size());
    for (size_t i = 0; i < f.size(); ++i) fg[i] = f[i] * g[i];
    const FiniteValues pg = pushforward_function(h, g);
    FiniteValues prod(pf.size());
    for (size_t i = 0; i < pf.size(); ++i) prod[i] = pf[i] * pg[i];
    tally(pushforward_function(h, fg) == prod);
  }
  for (const auto& e : {bundle_from_cocycle(constant_cocycle(h.left, 1)), bundle_from_cocycle(permutation_cocycle_z2(h.left)),
                        bundle_from_cocycle(sign_cocycle(h.left))}) {
    const auto down = induced_bundle(h, e);
    const ExactMatrix basis = invariant_sections(e);
    expect(r, invariant_sections(down).cols() == basis.cols(), "invariant section spaces differ in dimension");
    for (int t = 0; t < 20; ++t) {
      const FiniteValues psi = random_combination(basis, rng);
      const FiniteValues out = pushforward_section(h, e, psi);
      tally(!invariance_witness(down, out).has_value());
      tally(pullback_section(h, e, out) == psi);
      const FiniteValues f{small(rng)};
      tally(pushforward_section(h, e, multiply(f, psi, e.rank)) == multiply(pushforward_function(h, f), out, e.rank));
    }
  }
  r.metrics = {{"comparisons", trials}, {"failures", failures}};
  expect(r, failures == 0, std::to_string(failures) + " exact transport comparisons failed");
}

void inner_product(Context& c, CheckResult& r) {
  const Bitorsor& h = c.bitorsor();
  const auto e = bundle_from_cocycle(permutation_cocycle_z2(h.left));
  const FiniteInnerProduct ip{std::vector<Rational>(h.left.num_objects(), Rational(2))};
  expect(r, validate_inner_product(e, ip).valid(), "upstairs inner product not invariant");
  const auto down = induce_inner_product(h, ip);
  expect(r, validate_inner_product(induced_bundle(h, e), down).valid(), "induced inner product not invariant");
  std::mt19937 rng(4);
  const ExactMatrix basis = invariant_sections(e);
  for (int t = 0; t < 10; ++t) {
    const FiniteValues a = random_combination(basis, rng), b = random_combination(basis, rng);
    expect(r,
           pairing(down, e.rank, pushforward_section(h, e, a), pushforward_section(h, e, b)) ==
               pushforward_function(h, pairing(ip, e.rank, a, b)),
           "pairing not preserved");
  }
}

void tangent_cocycle_check(Context& c, CheckResult& r) {
  const ActionGroupoid g = c.kind() == "a2" ? rotation_circle(c.param("m"), 2.0 * kPi, 8)
                                            : rotation_circle(c.param("m"), c.real_param("circumference"), 8,
                                                              c.param("step"));
  const Bitorsor cov = covering_bitorsor(g);
  const Cocycle down = induce_cocycle(cov, tangent_cocycle(g), SectionFamily{fibre_representatives(cov)});
  // the quotient is a unit groupoid; its tangent cocycle is the identity on R^n
  const Cocycle quotient = constant_cocycle(cov.right, base_dimension(g.base));
  int mismatches = 0;
  for (int a = 0; a < cov.right.num_arrows(); ++a)
    if (down.entries[a] != quotient.entries[a]) ++mismatches;
  r.metrics = {{"arrows", cov.right.num_arrows()}, {"mismatches", mismatches}};
  expect(r, mismatches == 0, "induced tangent cocycle differs from the quotient's");
}

// ---------------------------------------------------------------- groupoid checks

void groupoid_validation(Context& c, CheckResult& r) {
  ValidationReport rep;
  if (c.kind() == "groupoid-file" && std::holds_alternative<FiniteGroupoid>(c.file().groupoid))
    rep = validate_groupoid(std::get<FiniteGroupoid>(c.file().groupoid));
  else
    rep = validate_groupoid(c.action());
  const FiniteGroupoid f = c.finite();
  const auto assoc = kernels::associativity_violations(f);
  r.metrics = {{"objects", f.num_objects()}, {"arrows", f.num_arrows()}, {"associativity_violations", assoc.size()}};
  expect(r, rep.valid(), rep.valid() ? "" : rep.violations.front().kind + ": " + rep.violations.front().detail);
  expect(r, assoc.empty(), "composition table is not associative");
}

void effectiveness(Context& c, CheckResult& r) {
  if (c.kind() == "a2") {
    const Bitorsor& h = c.bitorsor();
    const auto l = is_effective(h.left), rr = is_effective(h.right);
    r.metrics = {{"left_effective", l.effective}, {"right_effective", rr.effective}, {"witness", rr.witness_text}};
    expect(r, l.effective == rr.effective, "effectiveness differs across the Morita equivalence");
    return;
  }
  const EffectivenessResult e =
      c.finite_based() && c.kind() == "groupoid-file" ? is_effective(c.finite()) : is_effective(c.action());
  r.metrics = {{"effective", e.effective}, {"witness", e.witness_text}};
  if (!e.effective) expect(r, !e.witness_text.empty(), "non-effective without a witness");
  if (c.has("effective")) expect(r, e.effective == c.params_bool("effective"), "effectiveness differs from the expected value");
}

void faithfulness(Context& c, CheckResult& r) {
  std::vector<FaithfulnessResult> results;
  if (c.kind() == "a2") {
    const Bitorsor& h = c.bitorsor();
    results.push_back(faithfulness_probe(bundle_from_cocycle(constant_cocycle(h.left, 1))));
    results.push_back(faithfulness_probe(bundle_from_cocycle(constant_cocycle(h.right, 1))));
  } else if (c.finite_based()) {
    results.push_back(faithfulness_probe(bundle_from_cocycle(constant_cocycle(c.finite(), 1))));
  } else {
    const ActionGroupoid& g = c.action();
    const int cut = std::min(8, cutoff_of(g.base));
    results.push_back(faithfulness_probe(g, trivial_bundle(g), std::min(3, cut), cut));
  }
  json per = json::array();
  for (const auto& f : results) {
    per.push_back({{"kernel_dimension", f.kernel_dimension},
                   {"effective", f.effective},
                   {"exact", f.exact},
                   {"witness", f.witness_text}});
    expect(r, f.agrees_with_effectiveness(), "faithfulness disagrees with effectiveness");
    if (!f.faithful) expect(r, f.witness.has_value(), "nonzero kernel without a witness");
    if (c.has("effective")) expect(r, f.faithful == c.params_bool("effective"), "faithfulness differs from the expected value");
  }
  r.metrics = {{"probes", per}};
}

void convolution_laws(Context& c, CheckResult& r) {
  const FiniteGroupoid g = c.kind() == "a2" ? c.bitorsor().right : c.finite();
  std::mt19937 rng(21);
  std::uniform_int_distribution<int> pick(0, g.num_arrows() - 1);
  auto random_fn = [&] {
    ArrowFunction f(g.num_arrows());
    for (int k = 0; k < 3; ++k) f[pick(rng)] += small(rng);
    return f;
  };
  const ArrowFunction unit = convolution_unit(g);
  int failures = 0;
  for (int t = 0; t < 20; ++t) {
    const ArrowFunction a = random_fn(), b = random_fn(), d = random_fn();
    failures += convolve(g, convolve(g, a, b), d) != convolve(g, a, convolve(g, b, d));
    failures += convolve(g, unit, a) != a || convolve(g, a, unit) != a;
  }
  const auto bundle = c.kind() == "a2" ? induced_bundle(c.bitorsor(), bundle_from_cocycle(sign_cocycle(c.bitorsor().left)))
                                       : bundle_from_cocycle(constant_cocycle(g, 1));
  for (int t = 0; t < 20; ++t) {
    const ArrowFunction a = random_fn(), b = random_fn();
    FiniteValues psi(static_cast<size_t>(g.num_objects()) * bundle.rank);
    for (auto& v : psi) v = small(rng);
    failures += act(bundle, convolve(g, a, b), psi) != act(bundle, a, act(bundle, b, psi));
  }
  r.metrics = {{"failures", failures}};
  expect(r, failures == 0, std::to_string(failures) + " convolution identities failed");
}

// ---------------------------------------------------------------- Fourier checks

void integration(Context& c, CheckResult& r) {
  const ActionGroupoid& g = c.action();
  const FlatGeometry geom = geometry_of(g.base);
  const int n = sample_grid_size(g.base);
  int kernel = 0;
  for (const auto& iso : g.isometries) kernel += iso.normalized().is_identity();
  const double expected = geom.volume() * kernel / g.group.order();
  const int l = c.invariant_frequency();
  ModeFunction f = ModeFunction::zero(geom, l);
  f.at({0, 0}) = 1.0;
  f.at({l, 0}) = 0.5;
  f.at({-l, 0}) = 0.5;
  const std::vector<cplx> one(evaluate(f, {n, n}).size(), 1.0);
  const std::vector<cplx> vals = evaluate(f, {n, n});
  ModeFunction rho = ModeFunction::zero(geom, l);
  rho.at({0, 0}) = 0.5;
  rho.at({l, 0}) = 0.25;
  rho.at({-l, 0}) = 0.25;
  const cplx i1 = orbifold_integral(single_chart_measure(g), one);
  const cplx a = orbifold_integral(single_chart_measure(g), vals);
  const cplx b = orbifold_integral(two_chart_measure(g, rho), vals);
  const cplx d = orbifold_integral(fundamental_domain_measure(g), vals);
  const double chart = std::max(std::abs(a - b), std::abs(a - d));
  r.metrics = {{"integral_of_one", i1.real()}, {"expected", expected}, {"chart_spread", chart}};
  expect(r, std::abs(i1 - expected) <= c.tol("integral"), "integral of 1 is " + fmt(i1.real()));
  expect(r, std::abs(a - expected) <= c.tol("integral"), "integral of 1 + cos is " + fmt(a.real()));
  expect(r, chart <= c.tol("integral"), "chart decompositions disagree by " + fmt(chart));
}

void covering_spectra(Context& c, CheckResult& r) {
  const InducedDirac& ind = c.induced();
  c.spectrum("upstairs-invariant", ind.up_spectrum);
  c.spectrum("quotient", ind.down_spectrum);
  r.metrics = {{"delta_down", io::to_string(ind.delta_down[0])},
               {"count", ind.up_spectrum.size()},
               {"gap", ind.spectrum_gap}};
  expect(r, ind.delta_found, "no quotient spin structure reproduces the invariant spectrum");
  expect(r, ind.up_spectrum.size() == ind.down_spectrum.size(), "spectra differ in size");
  expect(r, ind.spectrum_gap <= c.tol("spectrum"), "spectra differ by " + fmt(ind.spectrum_gap));
}

void quotient_isomorphism(Context& c, CheckResult& r) {
  const InducedDirac& ind = c.induced();
  r.metrics = {{"unitarity", ind.unitarity_residual},
               {"conjugation", ind.conjugation_residual},
               {"representatives", ind.representative_defect}};
  expect(r, ind.unitarity_residual <= c.tol("unitarity"), "U is not unitary: " + fmt(ind.unitarity_residual));
  expect(r, ind.conjugation_residual <= c.tol("spectrum"), "U D U* differs from D_#: " + fmt(ind.conjugation_residual));
  expect(r, ind.representative_defect <= c.tol("unitarity"), "fibre representatives disagree");
}

void divergence(Context& c, CheckResult& r) {
  const int cut = c.has("divergence_modes") ? c.param("divergence_modes") : c.modes();
  const double res = divergence_residual(cut == c.modes() ? c.spec() : c.spec_at(cut), c.buffer(), 4, 11u);
  r.metrics = {{"residual", res}, {"cutoff", cut}};
  expect(r, res <= c.tol("divergence"), "symmetry residual " + fmt(res));
}

void commutators(Context& c, CheckResult& r) {
  const auto& rep = c.triple();
  const auto freq = c.generator_frequencies();
  const double unit = 2.0 * kPi / geometry_of(c.action().base).circumference[0];
  json per = json::array();
  for (size_t i = 0; i < rep.generators.size(); ++i) {
    const auto& g = rep.generators[i];
    const double expected = freq[i] * unit;
    per.push_back({{"name", g.name}, {"norm", g.norm}, {"expected", expected}, {"drift", g.drift}});
    expect(r, std::abs(g.norm - expected) <= c.tol("commutator"), g.name + " commutator norm " + fmt(g.norm));
    expect(r, g.drift <= c.tol("drift"), g.name + " drifts by " + fmt(g.drift));
    expect(r, g.symbol_residual <= c.tol("commutator"), g.name + " differs from its symbol");
  }
  r.metrics = {{"generators", per}};
}

void growth_exponent(Context& c, CheckResult& r) {
  const auto& rep = c.triple();
  c.spectrum("invariant", rep.eigenvalues);
  const double dim = rep.dimension;
  const double rel = std::abs(rep.growth_exponent - dim) / dim;
  r.metrics = {{"exponent", rep.growth_exponent}, {"dimension", rep.dimension}, {"relative_error", rel}};
  expect(r, rel <= c.tol("growth"), "counting exponent " + fmt(rep.growth_exponent));
}

void hermiticity(Context& c, CheckResult& r) {
  const auto& rep = c.triple();
  r.metrics = {{"hermiticity", rep.hermiticity_residual},
               {"invariance", rep.invariance_residual},
               {"projector_idempotency", rep.projector_idempotency},
               {"projector_commutator", rep.projector_commutator}};
  expect(r, rep.hermiticity_residual <= c.tol("commutator"), "D is not Hermitian");
  expect(r, rep.invariance_residual <= c.tol("commutator"), "D does not commute with the action");
  expect(r, rep.projector_idempotency <= c.tol("commutator"), "projector is not idempotent");
  expect(r, rep.projector_commutator <= c.tol("commutator"), "projector does not commute with D");
  for (const auto& g : rep.generators)
    expect(r, g.projector_residual <= c.tol("commutator"), g.name + " does not preserve invariant spinors");
}

void chirality(Context& c, CheckResult& r) {
  const auto& rep = c.triple();
  const bool square = rep.chirality_square_exact.value_or(false);
  const double anti = rep.chirality_anticommutator.value_or(INFINITY);
  double comm = 0.0;
  for (const auto& g : rep.generators) comm = std::max(comm, g.chirality_commutator.value_or(INFINITY));
  r.metrics = {{"square_exact", square}, {"anticommutator", anti}, {"max_commutator", comm}};
  expect(r, square, "omega^2 != 1");
  expect(r, anti <= c.tol("chirality"), "{omega, D} = " + fmt(anti));
  expect(r, comm <= c.tol("chirality"), "[omega, pi(f)] = " + fmt(comm));
}

void triple_flag(Context& c, CheckResult& r) {
  const auto& rep = c.triple();
  const bool flagged = std::any_of(rep.notes.begin(), rep.notes.end(),
                                   [](const std::string& s) { return s.rfind("representation not faithful", 0) == 0; });
  const bool effective = is_effective(c.action()).effective;
  r.metrics = {{"flagged", flagged}, {"effective", effective}, {"notes", rep.notes}};
  expect(r, flagged != effective, flagged ? "effective groupoid flagged" : "non-effective groupoid not flagged");
}

void representation_law(Context& c, CheckResult& r) {
  const int cut = std::min(12, c.modes());
  const DiracSpec spec = cut == c.modes() ? c.spec() : c.spec_at(cut);
  const ActionGroupoid& g = spec.groupoid;
  const FlatGeometry geom = spec.geometry();
  std::mt19937 rng(9);
  double worst = 0.0;
  for (int t = 0; t < 3; ++t) {
    Generator f1, f2;
    f1.name = "f1";
    f2.name = "f2";
    for (int a = 0; a < g.group.order(); ++a) {
      f1.parts.push_back(random_function(geom, 2, kZero, rng));
      f2.parts.push_back(random_function(geom, 2, kZero, rng));
    }
    worst = std::max(worst, representation_defect(spec, f1, f2, c.buffer() + 2));
  }
  r.metrics = {{"defect", worst}, {"cutoff", cut}};
  expect(r, worst <= c.tol("representation"), "pi(f1 * f2) - pi(f1) pi(f2) = " + fmt(worst));
}

void fourier_transport(Context& c, CheckResult& r) {
  const int cut = c.has("transport_modes") ? c.param("transport_modes") : 8;
  const ActionGroupoid g = rotation_circle(c.param("m"), c.real_param("circumference"), cut, c.param("step"));
  const FlatGeometry geom = geometry_of(g.base);
  const auto lift = c.lifts(g).at(c.has("lift") ? c.param("lift") : 0);
  std::mt19937 rng(3);
  double round = 0.0, module = 0.0;
  for (const FourierBundle& b : {trivial_bundle(g), spinor_bundle(g, build_clifford(1), lift)}) {
    const auto t = make_transport(g, b);
    for (int trial = 0; trial < 20; ++trial) {
      const ModeFunction f = average(g, random_function(geom, cut, kZero, rng));
      round = std::max(round, max_abs_diff(pullback_function(t, pushforward_function(t, f), cut), f));
      FieldSection psi{random_function(geom, cut, b.delta, rng)};
      psi = average(g, b, psi);
      const FieldSection out = pushforward_section(t, psi);
      round = std::max(round, max_abs_diff(pullback_section(t, out, cut), psi));
      const ModeFunction h = average(g, random_function(geom, cut / 2, kZero, rng));
      const FieldSection lhs = pushforward_section(t, multiply(h, psi, cut + cut / 2));
      const FieldSection rhs = multiply(pushforward_function(t, h), out, lhs[0].modes.cutoff);
      module = std::max(module, max_abs_diff(lhs, rhs));
    }
  }
  r.metrics = {{"round_trip", round}, {"module_law", module}};
  expect(r, round <= c.tol("transport"), "round trip error " + fmt(round));
  expect(r, module <= c.tol("module_law"), "module law error " + fmt(module));
}

void spin_correspondence_check(Context& c, CheckResult& r) {
  const ActionGroupoid g = rotation_circle(c.param("m"), c.real_param("circumference"), 8, c.param("step"));
  const auto sc = spin_correspondence(g, 8, 2);
  r.metrics = {{"upstairs", sc.upstairs.size()}, {"downstairs", sc.downstairs.size()}};
  expect(r, sc.bijective, "spin lifts do not biject: " + sc.detail);
  expect(r, sc.tangent_cocycles_agree, "tangent cocycles differ");
}

// ---------------------------------------------------------------- tables

const std::vector<CheckDef>& check_table() {
  static const std::vector<CheckDef> table = {
      {{"bitorsor-validation", "generalized homomorphism and bitorsor axioms", {"a2"}}, bitorsor_validation},
      {{"mutation-witness", "a corrupted right action is rejected with a witness", {"a2"}}, mutation_witness},
      {{"fibre-partition", "alpha-fibre blocks match the isotropy rank", {"a2"}}, fibre_partition},
      {{"weak-equivalence", "the middle groupoid projects by weak equivalences", {"a2"}}, weak_equivalence},
      {{"induced-sign-cocycle", "induced sign cocycle against brute-force transporters", {"a2"}}, induced_sign_cocycle},
      {{"section-independence", "section families give cohomologous cocycles", {"a2"}}, section_independence},
      {{"composition-round-trip", "h o h^-1 and h^-1 o h are 2-isomorphic to identities", {"a2"}}, composition_round_trip},
      {{"cech-localization", "localized bitorsors validate", {"a2", "groupoid-file"}}, cech_localization},
      {{"cech-recombination", "localization composes back to the original", {"a2"}}, cech_recombination},
      {{"cech-induction", "induction commutes with localization", {"a2"}}, cech_induction},
      {{"bundle-reconstruction", "bundles are recovered from Cech cocycles", {"a2"}}, bundle_reconstruction},
      {{"finite-transport", "exact transport of invariant functions and sections", {"a2"}}, finite_transport},
      {{"inner-product", "induced inner products and pairings", {"a2"}}, inner_product},
      {{"tangent-cocycle", "induced tangent cocycle equals the quotient's", {"a2", "circle"}}, tangent_cocycle_check},
      {{"groupoid-validation", "groupoid axioms and associativity", {"circle", "torus", "groupoid-file"}},
       groupoid_validation},
      {{"effectiveness", "germ injectivity with a witness", {"a2", "circle", "torus", "groupoid-file"}}, effectiveness},
      {{"faithfulness", "convolution kernel agrees with effectiveness", {"a2", "circle", "torus", "groupoid-file"}},
       faithfulness},
      {{"convolution-laws", "associativity, unit and representation law", {"a2", "groupoid-file"}}, convolution_laws},
      {{"integration", "orbifold integral and chart independence", {"circle", "torus"}}, integration},
      {{"covering-spectra", "invariant spectrum equals the quotient spectrum", {"circle"}}, covering_spectra},
      {{"quotient-isomorphism", "unitary intertwining the invariant and quotient operators", {"circle"}},
       quotient_isomorphism},
      {{"divergence", "symmetry of D on invariant spinors", {"circle", "torus"}}, divergence},
      {{"commutators", "commutator norms and their stability", {"circle"}}, commutators},
      {{"growth-exponent", "eigenvalue counting exponent", {"circle", "torus"}}, growth_exponent},
      {{"hermiticity", "Hermitian invariant D and projector", {"circle", "torus"}}, hermiticity},
      {{"chirality", "grading squares to one and anticommutes with D", {"torus"}}, chirality},
      {{"triple-flag", "non-effective groupoids are flagged", {"circle", "torus"}}, triple_flag},
      {{"representation-law", "pi(f1 * f2) = pi(f1) pi(f2) on the interior band", {"circle", "torus"}},
       representation_law},
      {{"fourier-transport", "transport through the rotation quotient", {"circle"}}, fourier_transport},
      {{"spin-correspondence", "spin lifts biject with quotient spin structures", {"circle"}},
       spin_correspondence_check},
  };
  return table;
}

const CheckDef* find_check(const std::string& name) {
  for (const auto& d : check_table())
    if (d.info.name == name) return &d;
  return nullptr;
}

json defaults_for(const std::string& kind) {
  if (kind == "a2") return {{"N", 3}, {"m", 2}};
  if (kind == "circle")
    return {{"m", 2}, {"step", 1}, {"modes", 32}, {"buffer", 2}, {"lift", 0}, {"circumference", 2.0 * kPi},
            {"transport_modes", 8}};
  if (kind == "torus")
    return {{"modes", 24}, {"buffer", 2}, {"lift", 0}, {"divergence_modes", 10},
            {"circumferences", json::array({2.0 * kPi, 2.0 * kPi})}};
  if (kind == "groupoid-file") return json::object();
  throw Error("unknown scenario kind '" + kind + "'");
}

Config builtin(std::string name, std::string kind, std::string description, std::vector<std::string> checks,
               json params = json::object()) {
  Config c;
  c.name = std::move(name);
  c.kind = std::move(kind);
  c.description = std::move(description);
  c.checks = std::move(checks);
  c.params = defaults_for(c.kind);
  c.params.merge_patch(params);
  return c;
}

void validate_params(const Config& c, const std::string& where) {
  auto positive = [&](const char* key, int lo) {
    if (!c.params.contains(key)) return;
    const json& v = c.params[key];
    if (!v.is_number_integer() || v.get<int>() < lo)
      throw Error(where + ": params." + key + ": expected an integer >= " + std::to_string(lo));
  };
  positive("N", 1);
  positive("m", 1);
  positive("step", 0);
  positive("modes", 4);
  positive("buffer", 0);
  positive("lift", 0);
  positive("transport_modes", 2);
  positive("divergence_modes", 4);
  if (c.params.contains("modes") && c.params.contains("buffer") &&
      c.params["buffer"].get<int>() >= c.params["modes"].get<int>())
    throw Error(where + ": params.buffer: must be smaller than params.modes");
  if (c.params.contains("circumference") &&
      (!c.params["circumference"].is_number() || c.params["circumference"].get<double>() <= 0.0))
    throw Error(where + ": params.circumference: expected a positive number");
  if (c.params.contains("effective") && !c.params["effective"].is_boolean())
    throw Error(where + ": params.effective: expected a boolean");
  if (c.kind == "groupoid-file") {
    if (!c.params.contains("groupoid") || !c.params["groupoid"].is_string())
      throw Error(where + ": params.groupoid: expected the path of a groupoid file");
    const std::string path = c.params["groupoid"].get<std::string>();
    if (!fs::exists(path)) throw Error(where + ": params.groupoid: file '" + path + "' does not exist");
    const auto file = io::read_groupoid_file(path);
    const ValidationReport rep = std::visit([](const auto& g) { return validate_groupoid(g); }, file.groupoid);
    if (!rep.valid())
      throw Error(where + ": params.groupoid: '" + path + "' does not validate: " + rep.violations.front().kind + ": " +
                  rep.violations.front().detail);
  }
}

void validate_checks(const Config& c, const std::string& where) {
  for (size_t i = 0; i < c.checks.size(); ++i) {
    const std::string field = where + ": checks[" + std::to_string(i) + "]";
    const CheckDef* d = find_check(c.checks[i]);
    if (!d) throw Error(field + ": unknown check '" + c.checks[i] + "'");
    if (std::find(d->info.kinds.begin(), d->info.kinds.end(), c.kind) == d->info.kinds.end())
      throw Error(field + ": check '" + c.checks[i] + "' does not apply to kind '" + c.kind + "'");
  }
}

}  // namespace

const std::vector<CheckInfo>& registered_checks() {
  static const std::vector<CheckInfo> infos = [] {
    std::vector<CheckInfo> out;
    for (const auto& d : check_table()) out.push_back(d.info);
    return out;
  }();
  return infos;
}

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> tol = {
      {"chirality", 1e-12},  {"commutator", 1e-12}, {"divergence", 1e-10}, {"drift", 1e-9},
      {"growth", 0.15},      {"integral", 1e-10},   {"module_law", 1e-12}, {"representation", 1e-12},
      {"spectrum", 1e-9},    {"transport", 1e-10},  {"unitarity", 1e-10},
  };
  return tol;
}

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

Registry::Registry() {
  entries_ = {
      builtin("a2-example", "a2",
              "Z2 => * against Z_2N x| Z_N: bitorsor axioms, fibres, weak equivalence, cocycles, composition",
              {"bitorsor-validation", "mutation-witness", "fibre-partition", "weak-equivalence", "induced-sign-cocycle",
               "composition-round-trip", "cech-localization", "finite-transport", "effectiveness", "faithfulness",
               "convolution-laws"}),
      builtin("free-rotation-circle", "circle",
              "free Z_m rotation of the circle: quotient spectra, integration, commutators, coverings",
              {"groupoid-validation", "covering-spectra", "quotient-isomorphism", "integration", "divergence",
               "commutators", "growth-exponent", "hermiticity", "effectiveness", "faithfulness", "triple-flag",
               "representation-law", "fourier-transport", "tangent-cocycle", "spin-correspondence"}),
      builtin("pillowcase-torus", "torus", "Z2 negation of the square torus: chirality, summability, integration",
              {"groupoid-validation", "chirality", "growth-exponent", "hermiticity", "integration", "divergence",
               "effectiveness", "faithfulness", "triple-flag", "representation-law"}),
      builtin("noneffective-circle", "circle", "Z4 rotating the circle by half turns: kernel witnesses and flags",
              {"groupoid-validation", "effectiveness", "faithfulness", "triple-flag", "integration", "hermiticity"},
              {{"m", 4}, {"step", 2}, {"modes", 12}, {"effective", false}}),
      builtin("cech-localization", "a2", "Cech localization of the Z2 => * bitorsor and bundle reconstruction",
              {"cech-localization", "cech-recombination", "cech-induction", "bundle-reconstruction"}),
      builtin("cocycle-transport", "a2", "cocycle induction, section independence and transport of sections",
              {"induced-sign-cocycle", "section-independence", "cech-induction", "finite-transport", "inner-product",
               "tangent-cocycle"}),
  };
}

bool Registry::contains(const std::string& name) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const Config& c) { return c.name == name; });
}

const Config& Registry::find(const std::string& name) const {
  for (const auto& c : entries_)
    if (c.name == name) return c;
  std::string known;
  for (const auto& c : entries_) known += (known.empty() ? "" : ", ") + c.name;
  throw Error("unknown scenario '" + name + "' (known: " + known + ")");
}

const Config& Registry::add_file(const std::string& path) {
  Config c = load_config(path, *this);
  if (contains(c.name)) throw Error(path + ": name: scenario '" + c.name + "' is already registered");
  entries_.push_back(std::move(c));
  return entries_.back();
}

void Registry::add_directory(const std::string& dir) {
  if (!fs::is_directory(dir)) throw Error(dir + ": not a directory");
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) add_file(f);
}

Config config_from_json(const json& doc, const Registry& reg, const std::string& origin) {
  io::check_version(doc, origin);
  auto str = [&](const char* key) -> std::optional<std::string> {
    if (!doc.contains(key)) return std::nullopt;
    if (!doc[key].is_string()) throw Error(origin + ": " + key + ": expected a string");
    return doc[key].get<std::string>();
  };
  for (const auto& [key, v] : doc.items()) {
    static const std::set<std::string> known = {"schema_version", "name",   "description", "base",
                                                "kind",           "checks", "params",      "tolerances"};
    if (!known.count(key)) throw Error(origin + ": " + key + ": unknown field");
  }
  Config c;
  const auto base = str("base");
  const auto kind = str("kind");
  if (base && kind) throw Error(origin + ": base: give either base or kind, not both");
  if (base) {
    try {
      c = reg.find(*base);
    } catch (const Error& e) {
      throw Error(origin + ": base: " + e.what());
    }
  } else if (kind) {
    try {
      c.params = defaults_for(*kind);
    } catch (const Error& e) {
      throw Error(origin + ": kind: " + e.what());
    }
    c.kind = *kind;
  } else {
    throw Error(origin + ": base: missing field (or kind)");
  }
  const auto name = str("name");
  if (!name || name->empty()) throw Error(origin + ": name: missing field");
  c.name = *name;
  if (const auto d = str("description")) c.description = *d;
  c.origin = origin;
  if (doc.contains("checks")) {
    if (!doc["checks"].is_array()) throw Error(origin + ": checks: expected an array");
    c.checks.clear();
    for (size_t i = 0; i < doc["checks"].size(); ++i) {
      if (!doc["checks"][i].is_string()) throw Error(origin + ": checks[" + std::to_string(i) + "]: expected a string");
      c.checks.push_back(doc["checks"][i].get<std::string>());
    }
  }
  if (doc.contains("params")) {
    if (!doc["params"].is_object()) throw Error(origin + ": params: expected an object");
    c.params.merge_patch(doc["params"]);
  }
  if (doc.contains("tolerances")) {
    if (!doc["tolerances"].is_object()) throw Error(origin + ": tolerances: expected an object");
    for (const auto& [key, v] : doc["tolerances"].items()) {
      if (!default_tolerances().count(key)) throw Error(origin + ": tolerances." + key + ": unknown tolerance");
      if (!v.is_number() || v.get<double>() <= 0.0)
        throw Error(origin + ": tolerances." + key + ": expected a positive number");
      c.tolerances[key] = v.get<double>();
    }
  }
  if (c.kind == "groupoid-file" && c.params.contains("groupoid") && c.params["groupoid"].is_string()) {
    fs::path p = c.params["groupoid"].get<std::string>();
    if (p.is_relative()) p = fs::path(origin).parent_path() / p;
    c.params["groupoid"] = p.lexically_normal().string();
  }
  validate_params(c, origin);
  validate_checks(c, origin);
  return c;
}

Config load_config(const std::string& path, const Registry& reg) {
  return config_from_json(io::read_file(path), reg, path);
}

Report run_scenario(const Config& cfg, const RunOptions& opt) {
  Config c = cfg;
  if (opt.modes) c.params["modes"] = *opt.modes;
  if (opt.buffer) c.params["buffer"] = *opt.buffer;
  const std::string where = cfg.origin == "builtin" ? "scenario " + cfg.name : cfg.origin;
  validate_params(c, where);
  validate_checks(c, where);
  std::map<std::string, double> tol = default_tolerances();
  for (const auto& [key, v] : c.tolerances) {
    const double d = default_tolerances().at(key);
    if (v > 10.0 * d && !opt.force)
      throw Error(where + ": tolerances." + key + ": " + fmt(v) + " loosens the default " + fmt(d) +
                  " by more than 10x; pass --force to allow it");
    tol[key] = v;
  }
  Report rep;
  rep.scenario = c.name;
  rep.kind = c.kind;
  rep.params = c.params;
  rep.tolerances = tol;
  Context ctx(c, c.params, tol, rep);
  for (const auto& name : c.checks) {
    CheckResult r;
    r.name = name;
    r.passed = true;
    try {
      find_check(name)->run(ctx, r);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    rep.checks.push_back(std::move(r));
  }
  return rep;
}

std::string report_json(const Report& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}, {"metrics", c.metrics}});
  json spectra = json::array();
  for (const auto& s : r.spectra) spectra.push_back({{"label", s.label}, {"count", s.values.size()}});
  json doc{{"schema_version", io::schema_version},
           {"scenario", r.scenario},
           {"kind", r.kind},
           {"params", r.params},
           {"tolerances", r.tolerances},
           {"passed", r.passed()},
           {"checks", checks},
           {"spectra", spectra}};
  return doc.dump(2) + "\n";
}

std::string spectra_csv(const Report& r) {
  std::ostringstream os;
  os << "label,index,eigenvalue\n";
  char buf[64];
  for (const auto& s : r.spectra)
    for (size_t i = 0; i < s.values.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", s.values[i]);
      os << s.label << ',' << i << ',' << buf << '\n';
    }
  return os.str();
}

std::string summary_md(const Report& r) {
  std::ostringstream os;
  int failed = 0;
  for (const auto& c : r.checks) failed += !c.passed;
  os << "# " << r.scenario << "\n\n";
  os << "kind: " << r.kind << "  \n";
  os << "params: `" << r.params.dump() << "`\n\n";
  if (r.checks.empty()) {
    os << "No checks were requested.\n";
    return os.str();
  }
  os << (r.checks.size() - failed) << " of " << r.checks.size() << " checks passed.\n\n";
  os << "| check | result | detail |\n|---|---|---|\n";
  for (const auto& c : r.checks) {
    std::string detail = c.detail;
    std::replace(detail.begin(), detail.end(), '|', '/');
    os << "| " << c.name << " | " << (c.passed ? "PASS" : "FAIL") << " | " << detail << " |\n";
  }
  if (!r.spectra.empty()) {
    os << "\nspectra.csv: ";
    for (size_t i = 0; i < r.spectra.size(); ++i)
      os << (i ? ", " : "") << r.spectra[i].label << " (" << r.spectra[i].values.size() << ")";
    os << "\n";
  }
  return os.str();
}

void write_outputs(const Report& r, const std::string& dir) {
  fs::create_directories(dir);
  auto put = [&](const char* name, const std::string& text) {
    const fs::path p = fs::path(dir) / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(p.string() + ": cannot write");
    out << text;
  };
  put("report.json", report_json(r));
  put("spectra.csv", spectra_csv(r));
  put("summary.md", summary_md(r));
}

}  // namespace orbi::scenario
