// Acceptance run: one PASS/FAIL line per criterion, each compared against an
// oracle computed here rather than by the library routine under test.
// Exit status 1 when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "orbi/convolution.hpp"

using namespace orbi;

namespace {

constexpr double kPi = 3.14159265358979323846;
const Twist kZero{Rational(0), Rational(0)};

struct Outcome {
  bool ok = true;
  std::ostringstream why;
  void need(bool cond, const std::string& what) {
    if (!cond) {
      if (ok) why << what;
      ok = false;
    }
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

GaussRat small(std::mt19937& rng) {
  std::uniform_int_distribution<int> u(-6, 6);
  return GaussRat(Rational(u(rng), 1 + std::abs(u(rng))), Rational(u(rng)));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SpinLift first_lift(const ActionGroupoid& g) {
  const int dim = base_dimension(g.base);
  return spin_lift_search(g, build_clifford(dim), kZero, dim == 2).at(0);
}

// Lift with trivial twist on every element.
SpinLift trivial_lift(const ActionGroupoid& g) {
  const int dim = base_dimension(g.base);
  for (const auto& l : spin_lift_search(g, build_clifford(dim), kZero, dim == 2))
    if (std::all_of(l.twist.begin(), l.twist.end(), [](const GaussRat& h) { return h == GaussRat(1); })) return l;
  throw Error("no trivial lift");
}

// ---------------------------------------------------------------- 1

// For each x, the right action is simply transitive on rho^-1(x); likewise on the left over alpha.
bool torsor_oracle(const Bitorsor& h) {
  for (int q = 0; q < h.size(); ++q)
    for (int p = 0; p < h.size(); ++p) {
      if (h.rho[q] == h.rho[p]) {
        int hits = 0;
        for (int t = 0; t < h.right.num_arrows(); ++t)
          if (h.right.target(t) == h.alpha[q] && h.act_right(q, t) == p) ++hits;
        if (hits != 1) return false;
      }
      if (h.alpha[q] == h.alpha[p]) {
        int hits = 0;
        for (int s = 0; s < h.left.num_arrows(); ++s)
          if (h.left.source(s) == h.rho[q] && h.act_left(s, q) == p) ++hits;
        if (hits != 1) return false;
      }
    }
  return true;
}

void criterion1(Outcome& o) {
  for (int n : {3, 5}) {
    const Bitorsor h = a2_bitorsor(n);
    const auto rep = validate_generalized_hom(h, TorsorMode::bitorsor);
    o.need(rep.valid(), "N=" + std::to_string(n) + " rejected");
    o.need(torsor_oracle(h), "N=" + std::to_string(n) + " torsor oracle fails");
    // swap the images of one right-action entry
    Bitorsor bad = h;
    const int t = h.right.into(h.alpha[0]).back();
    bad.set_right(0, t, (h.act_right(0, t) + 1) % h.size());
    const auto br = validate_generalized_hom(bad, TorsorMode::bitorsor);
    o.need(!br.valid() && !br.violations.front().detail.empty(), "mutation not detected with a witness");
    o.need(!torsor_oracle(bad), "oracle misses the mutation");
  }
}

// ---------------------------------------------------------------- 2

void criterion2(Outcome& o) {
  for (int n : {3, 5}) {
    const Bitorsor h = a2_bitorsor(n);
    for (int y = 0; y < n; ++y) {
      // isotropy of Z_{2N} x| Z_N at y: a with a = 0 mod N
      int rank = 0;
      for (int a = 0; a < 2 * n; ++a) rank += a % n == 0;
      std::set<int> fibre;
      for (int q = 0; q < 2 * n; ++q)
        if (q % n == y) fibre.insert(q);
      const auto rep = fibre_partition_report(h, y);
      o.need(rep.consistent(), "fibre over " + std::to_string(y) + " inconsistent");
      o.need(rep.xi_isotropy_rank == rank, "isotropy rank differs from oracle");
      std::set<int> covered;
      for (const auto& b : rep.blocks) {
        o.need(static_cast<int>(b.points.size()) == rank, "block size differs from the isotropy rank");
        covered.insert(b.points.begin(), b.points.end());
      }
      o.need(covered == fibre, "blocks do not partition the fibre");
    }
  }
}

// ---------------------------------------------------------------- 3

void criterion3(Outcome& o) {
  for (int n : {3, 5}) {
    const Bitorsor h = a2_bitorsor(n);
    std::vector<std::vector<int>> sheets;
    for (int y = 0; y < n; ++y) sheets.push_back({y, (y + 1) % n});
    const CechCover cover{sheets};
    const auto loc = localize_cech(h, trivial_cover(h.left), cover);
    o.need(validate_generalized_hom(loc.bitorsor, TorsorMode::bitorsor).valid(), "localized bitorsor invalid");
    o.need(torsor_oracle(loc.bitorsor), "localized bitorsor fails the torsor oracle");
    // carrier {(q, a, i) : alpha(q) in U_i}: two sheets per object, one left sheet
    o.need(loc.bitorsor.size() == 2 * n * 2, "localized carrier has the wrong size");
    const auto canon = cech_bitorsor(h.right, cover);
    o.need(validate_generalized_hom(canon.bitorsor).valid() && torsor_oracle(canon.bitorsor),
           "canonical Cech bitorsor invalid");
  }
  const auto z = cyclic_double_action(3).to_finite();
  const auto cb = cech_bitorsor(z, CechCover{{{0, 1}, {1, 2}, {2, 0}}});
  o.need(validate_generalized_hom(cb.bitorsor).valid() && torsor_oracle(cb.bitorsor), "Z6 x| Z3 localization invalid");
}

// ---------------------------------------------------------------- 4

void criterion4(Outcome& o) {
  for (int n : {3, 5}) {
    const Bitorsor h = a2_bitorsor(n);
    const Cocycle sign = character_cocycle(h.left, {GaussRat(1), GaussRat(-1)});
    SectionFamily beta;
    for (int y = 0; y < n; ++y) beta.point.push_back(y);
    const Cocycle ind = induce_cocycle(h, sign, beta);
    for (int a = 0; a < 2 * n; ++a)
      for (int y = 0; y < n; ++y) {
        const GaussRat expect(((y + a) % (2 * n)) >= n ? -1 : 1);
        const int arrow = a * n + y;
        o.need(ind.entries[arrow].rows() == 1 && ind.entries[arrow](0, 0) == expect,
               "entry (" + std::to_string(a) + ", " + std::to_string(y) + ") differs from the carry oracle");
      }
  }
  // sections {0,1,2} against {3,1,5} at N = 3; the points differ by the Z2 generator at y = 0, 2
  const Bitorsor h = a2_bitorsor(3);
  const Cocycle sign = character_cocycle(h.left, {GaussRat(1), GaussRat(-1)});
  const Cocycle g1 = induce_cocycle(h, sign, SectionFamily{{0, 1, 2}});
  const Cocycle g2 = induce_cocycle(h, sign, SectionFamily{{3, 1, 5}});
  const auto cb = cohomologous(g1, g2);
  o.need(cb.found(), "no coboundary found");
  if (!cb.found()) return;
  for (int t = 0; t < h.right.num_arrows(); ++t) {
    const GaussRat lt = cb.lambda[h.right.target(t)](0, 0), ls = cb.lambda[h.right.source(t)](0, 0);
    o.need(lt * g1.entries[t](0, 0) / ls == g2.entries[t](0, 0), "coboundary fails on arrow " + std::to_string(t));
  }
  const std::vector<GaussRat> oracle{GaussRat(-1), GaussRat(1), GaussRat(-1)};
  for (int t = 0; t < h.right.num_arrows(); ++t) {
    const GaussRat lt = oracle[h.right.target(t)], ls = oracle[h.right.source(t)];
    o.need(lt * g1.entries[t](0, 0) / ls == g2.entries[t](0, 0), "sign coboundary oracle fails");
  }
}

// ---------------------------------------------------------------- 5

void criterion5(Outcome& o) {
  std::mt19937 rng(17);
  const Bitorsor h = a2_bitorsor(3);
  double worst_fourier = 0.0, worst_module = 0.0;
  for (int t = 0; t < 20; ++t) {
    // invariant functions on Z2 => * are constants; the pushforward is the same constant on Z_N
    const GaussRat c = small(rng), d = small(rng);
    const FiniteValues pf = pushforward_function(h, {c});
    o.need(pf == FiniteValues(3, c), "pushforward of a constant differs from the oracle");
    o.need(pullback_function(h, pf) == FiniteValues{c}, "function round trip fails");
    o.need(pushforward_function(h, {c * d}) == multiply(pf, pushforward_function(h, {d}), 1), "finite module law");
    // regular representation: invariant sections are (u, u)
    const auto e = bundle_from_cocycle(permutation_cocycle_z2(h.left));
    const FiniteValues psi{c, c};
    o.need(!invariance_witness(e, psi), "(u, u) is not invariant");
    const FiniteValues out = pushforward_section(h, e, psi);
    o.need(!invariance_witness(induced_bundle(h, e), out), "pushed section not invariant");
    o.need(pullback_section(h, e, out) == psi, "section round trip fails");
    o.need(pushforward_section(h, e, multiply({d}, psi, 2)) == multiply(pushforward_function(h, {d}), out, 2),
           "section module law");
  }

  const int cut = 8;
  const ActionGroupoid g = rotation_circle(2, 2.0 * kPi, cut);
  const FlatGeometry geom = geometry_of(g.base);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const SpinLift& lift : spin_lift_search(g, build_clifford(1), kZero)) {
    const FourierBundle b = spinor_bundle(g, build_clifford(1), lift);
    const CoveringTransport tr = make_transport(g, b);
    const bool trivial = lift.twist[1] == GaussRat(1);
    for (int t = 0; t < 20; ++t) {
      // invariant data: even modes for the trivial lift, odd modes when the rotation acts by -1
      ModeFunction f = ModeFunction::zero(geom, cut), psi = ModeFunction::zero(geom, cut), w = ModeFunction::zero(geom, cut / 2);
      for (int k = -cut; k <= cut; ++k) {
        if (k % 2 == 0) f.at({k, 0}) = {u(rng), u(rng)};
        if ((k % 2 == 0) == trivial) psi.at({k, 0}) = {u(rng), u(rng)};
        if (k % 2 == 0 && std::abs(k) <= cut / 2) w.at({k, 0}) = {u(rng), u(rng)};
      }
      const ModeFunction pf = pushforward_function(tr, f);
      // circle(pi): e^{i k 2x} downstairs is e^{i 2k x} upstairs
      for (int k = -pf.modes.cutoff; k <= pf.modes.cutoff; ++k) {
        const cplx expect = std::abs(2 * k) <= cut ? f.at({2 * k, 0}) : cplx(0.0);
        worst_fourier = std::max(worst_fourier, std::abs(pf.at({k, 0}) - expect));
      }
      worst_fourier = std::max(worst_fourier, max_abs_diff(pullback_function(tr, pf, cut), f));
      const FieldSection out = pushforward_section(tr, FieldSection{psi});
      worst_fourier = std::max(worst_fourier, max_abs_diff(pullback_section(tr, out, cut), FieldSection{psi}));
      const FieldSection lhs = pushforward_section(tr, multiply(w, FieldSection{psi}, cut + cut / 2));
      const FieldSection rhs = multiply(pushforward_function(tr, w), out, lhs[0].modes.cutoff);
      worst_module = std::max(worst_module, max_abs_diff(lhs, rhs));
    }
  }
  o.need(worst_fourier <= 1e-10, "Fourier round trip error " + sci(worst_fourier));
  o.need(worst_module <= 1e-12, "module law error " + sci(worst_module));
  o.why << (o.ok ? "fourier " + sci(worst_fourier) + ", module " + sci(worst_module) : "");
}

// ---------------------------------------------------------------- 6

// hom_M(u, v) -> hom(p(u), p(v)) is a bijection for every pair, and every object is reached.
bool fully_faithful(const FiniteGroupoid& m, const FiniteGroupoid& target, const std::vector<int>& obj,
                    const std::vector<int>& arr) {
  for (int u = 0; u < m.num_objects(); ++u)
    for (int v = 0; v < m.num_objects(); ++v) {
      const auto here = m.hom(u, v);
      const auto there = target.hom(obj[u], obj[v]);
      std::set<int> image;
      for (int a : here) {
        if (target.source(arr[a]) != obj[u] || target.target(arr[a]) != obj[v]) return false;
        image.insert(arr[a]);
      }
      if (image.size() != here.size() || image != std::set<int>(there.begin(), there.end())) return false;
    }
  std::set<int> reached(obj.begin(), obj.end());
  for (int x = 0; x < target.num_objects(); ++x) {
    bool ok = false;
    for (int y : reached) ok = ok || !target.hom(x, y).empty();
    if (!ok) return false;
  }
  return true;
}

void criterion6(Outcome& o) {
  for (int n : {3, 5}) {
    const Bitorsor h = a2_bitorsor(n);
    const auto w = weak_equivalence_pair(h);
    o.need(w.ok(), "weak_equivalence_pair reports a failure");
    o.need(w.left_surjective && w.right_surjective && w.left_cartesian && w.right_cartesian, "flags not set");
    o.need(fully_faithful(w.middle, h.left, w.theta_object, w.theta_arrow), "projection to Z2 fails the oracle");
    o.need(fully_faithful(w.middle, h.right, w.xi_object, w.xi_arrow), "projection to Z2N x| ZN fails the oracle");
  }
}

// ---------------------------------------------------------------- 7

// Invariant modes of the Z_m rotation with trivial lift are k = 0 mod m; D e_k = k e_k.
std::vector<double> rotation_oracle(int m, int box) {
  std::vector<double> out;
  for (int k = -box; k <= box; ++k)
    if (k % m == 0) out.push_back(k);
  return out;
}

double gap(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

void covering_spectrum(Outcome& o, int m) {
  const int cut = 32, buffer = 2;
  const auto t0 = std::chrono::steady_clock::now();
  const ActionGroupoid g = rotation_circle(m, 2.0 * kPi, cut);
  const DiracSpec spec = make_dirac_spec(g, trivial_lift(g), cut);
  const InducedDirac ind = induced_dirac(spec, buffer);
  const auto oracle = rotation_oracle(m, cut - buffer);
  const double up = gap(ind.up_spectrum, oracle), down = gap(ind.down_spectrum, oracle);
  const double secs = seconds_since(t0);
  o.need(ind.delta_found && ind.delta_down[0] == Rational(0), "Z" + std::to_string(m) + " quotient spin structure");
  o.need(up <= 1e-9, "Z" + std::to_string(m) + " upstairs spectrum off by " + sci(up));
  o.need(down <= 1e-9, "Z" + std::to_string(m) + " quotient spectrum off by " + sci(down));
  o.need(secs < 10.0, "Z" + std::to_string(m) + " took " + sci(secs) + " s");
  o.why << "Z" << m << " " << sci(secs) << " s; ";
}

void criterion7(Outcome& o) {
  covering_spectrum(o, 2);
  covering_spectrum(o, 4);
}

// ---------------------------------------------------------------- 8

void criterion8(Outcome& o) {
  const ActionGroupoid g = rotation_circle(2, 2.0 * kPi, 16);
  const FlatGeometry geom = geometry_of(g.base);
  const int n = sample_grid_size(g.base);
  ModeFunction f = ModeFunction::zero(geom, 2);
  f.at({0, 0}) = 1.0;
  f.at({2, 0}) = 0.5;
  f.at({-2, 0}) = 0.5;
  ModeFunction rho = ModeFunction::zero(geom, 4);
  rho.at({0, 0}) = 0.5;
  rho.at({4, 0}) = 0.3;
  rho.at({-4, 0}) = 0.3;
  const std::vector<cplx> one(n, 1.0), vals = evaluate(f, {n, 1});
  double worst = 0.0, spread = 0.0;
  for (const auto& m : {single_chart_measure(g), two_chart_measure(g, rho), fundamental_domain_measure(g)}) {
    worst = std::max(worst, std::abs(orbifold_integral(m, one) - kPi));
    // int (1 + cos 2x) over the quotient is pi as well
    spread = std::max(spread, std::abs(orbifold_integral(m, vals) - kPi));
  }
  o.need(worst <= 1e-10, "integral of 1 off by " + sci(worst));
  o.need(spread <= 1e-10, "chart decompositions differ by " + sci(spread));
  o.why << "error " << sci(worst) << ", charts " << sci(spread);
}

// ---------------------------------------------------------------- 9

void criterion9(Outcome& o) {
  const int cut = 32, buffer = 2;
  for (int m : {2, 4}) {
    const ActionGroupoid g = rotation_circle(m, 2.0 * kPi, cut);
    for (const SpinLift& lift : spin_lift_search(g, build_clifford(1), kZero)) {
      const DiracSpec spec = make_dirac_spec(g, lift, cut);
      const double lib = divergence_residual(spec, buffer, 6, 5u);
      // <D psi, phi> - <psi, D phi> on random invariant spinors of the interior band
      const TruncatedDirac d = assemble_dirac(spec);
      const Eigen::MatrixXcd basis = invariant_basis(spec, uniform_box(cut - buffer));
      const Eigen::MatrixXcd dense(d.matrix);
      std::mt19937 rng(m);
      std::normal_distribution<double> nd;
      double own = 0.0;
      for (int t = 0; t < 6; ++t) {
        Eigen::VectorXcd a(basis.cols()), b(basis.cols());
        for (int i = 0; i < basis.cols(); ++i) {
          a(i) = {nd(rng), nd(rng)};
          b(i) = {nd(rng), nd(rng)};
        }
        const Eigen::VectorXcd psi = basis * a.normalized(), phi = basis * b.normalized();
        own = std::max(own, std::abs((dense * psi).dot(phi) - psi.dot(dense * phi)));
      }
      o.need(lib <= 1e-10, "library residual " + sci(lib));
      o.need(own <= 1e-10, "oracle residual " + sci(own));
    }
  }
  const ActionGroupoid p = negation_torus({2.0 * kPi, 2.0 * kPi}, cut);
  const double torus = divergence_residual(make_dirac_spec(p, first_lift(p), cut), buffer, 2, 5u);
  o.need(torus <= 1e-10, "pillowcase residual " + sci(torus));
  o.why << "pillowcase " << sci(torus);
}

// ---------------------------------------------------------------- 10

// Kernel of f -> (f . -) on the trivial line bundle: each nonempty hom(y, x) contributes |hom| - 1.
int kernel_oracle(const FiniteGroupoid& g) {
  int k = 0;
  for (int x = 0; x < g.num_objects(); ++x)
    for (int y = 0; y < g.num_objects(); ++y) {
      const int h = static_cast<int>(g.hom(y, x).size());
      k += h > 0 ? h - 1 : 0;
    }
  return k;
}

void criterion10(Outcome& o) {
  std::mt19937 rng(3);
  for (const FiniteGroupoid& g : {group_as_groupoid(FiniteGroup::cyclic(2)), cyclic_double_action(3).to_finite()}) {
    const auto b = bundle_from_cocycle(constant_cocycle(g, 1));
    const auto res = faithfulness_probe(b);
    o.need(!res.faithful && !res.effective, "non-effective groupoid reported faithful");
    o.need(res.kernel_dimension == kernel_oracle(g), "kernel dimension " + std::to_string(res.kernel_dimension) +
                                                         " against oracle " + std::to_string(kernel_oracle(g)));
    o.need(res.witness.has_value(), "no witness");
    if (!res.witness) continue;
    const ArrowFunction& w = *res.witness;
    o.need(std::any_of(w.begin(), w.end(), [](const GaussRat& v) { return v != GaussRat(0); }), "zero witness");
    FiniteValues psi(g.num_objects());
    for (auto& v : psi) v = small(rng);
    o.need(act(b, w, psi) == FiniteValues(g.num_objects()), "witness acts nontrivially");
    // delta_e - delta_g at the first object kills every section
    ArrowFunction d(g.num_arrows());
    const int x = 0;
    const auto iso = g.hom(x, x);
    d[g.unit(x)] = GaussRat(1);
    d[iso.back() == g.unit(x) ? iso.front() : iso.back()] -= GaussRat(1);
    o.need(act(b, d, psi) == FiniteValues(g.num_objects()), "oracle witness acts nontrivially");
  }
  const ActionGroupoid c = rotation_circle(2, 2.0 * kPi, 8);
  const auto res = faithfulness_probe(c, trivial_bundle(c), 3, 8);
  o.need(is_effective(c).effective && res.faithful && res.kernel_dimension == 0, "rotation circle kernel nonzero");
}

// ---------------------------------------------------------------- 11

// ||[D, pi(f)]|| on modes whose image stays inside the band, by dense SVD.
double commutator_norm(const DiracSpec& spec, const Generator& f, int buffer) {
  const TruncatedDirac d = assemble_dirac(spec);
  const SparseC p = represent(spec, f);
  const SparseC comm = d.matrix * p - p * d.matrix;
  const auto cols = d.interior(buffer);
  Eigen::MatrixXcd dense(comm);
  Eigen::MatrixXcd sub(dense.rows(), cols.size());
  for (size_t j = 0; j < cols.size(); ++j) sub.col(j) = dense.col(cols[j]);
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(sub).singularValues()(0);
}

void criterion11(Outcome& o) {
  const int cut = 32, buffer = 8;
  const ActionGroupoid g = rotation_circle(2, 2.0 * kPi, cut);
  const ActionGroupoid g2 = rotation_circle(2, 2.0 * kPi, 2 * cut);
  const DiracSpec spec = make_dirac_spec(g, trivial_lift(g), cut);
  const DiracSpec spec2 = make_dirac_spec(g2, trivial_lift(g2), 2 * cut);
  std::vector<Generator> gens;
  for (int l : {2, 4, 6}) {
    ModeFunction f = ModeFunction::zero(geometry_of(g.base), l);
    f.at({l, 0}) = 1.0;
    gens.push_back(function_generator(g, "e^{i" + std::to_string(l) + "theta}", f));
  }
  const auto rep = convolution_triple_report(spec, gens, 2);
  double worst = 0.0, drift = 0.0;
  for (size_t i = 0; i < gens.size(); ++i) {
    const double l = 2.0 * (i + 1);
    const double a = commutator_norm(spec, gens[i], buffer), b = commutator_norm(spec2, gens[i], buffer);
    worst = std::max({worst, std::abs(a - l), std::abs(rep.generators[i].norm - l)});
    drift = std::max({drift, std::abs(b - a) / a, rep.generators[i].drift});
  }
  o.need(worst <= 1e-12, "commutator norm off by " + sci(worst));
  o.need(drift <= 1e-9, "drift " + sci(drift));
  o.why << "error " << sci(worst) << ", drift " << sci(drift);
}

// ---------------------------------------------------------------- 12

// Least squares slope of log N(lambda) on log lambda over the upper three quarters of (0, top].
double own_exponent(const std::vector<double>& ev, double top) {
  std::vector<double> xs, ys;
  for (int s = 1; s <= 24; ++s) {
    const double lambda = top * (0.25 + 0.75 * s / 24.0);
    const double count = static_cast<double>(std::count_if(ev.begin(), ev.end(), [&](double e) { return std::abs(e) <= lambda; }));
    xs.push_back(std::log(lambda));
    ys.push_back(std::log(count));
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void criterion12(Outcome& o) {
  const int cut = 24, buffer = 2;
  const ActionGroupoid g = negation_torus({2.0 * kPi, 2.0 * kPi}, cut);
  const DiracSpec spec = make_dirac_spec(g, first_lift(g), cut);
  const FlatGeometry geom = geometry_of(g.base);
  ModeFunction f = ModeFunction::zero(geom, 2), h = ModeFunction::zero(geom, 2);
  f.at({1, 0}) = f.at({-1, 0}) = 0.5;
  h.at({1, 1}) = h.at({-1, -1}) = 0.5;
  const std::vector<Generator> gens{function_generator(g, "cos x", f), function_generator(g, "cos(x+y)", h)};
  const auto rep = convolution_triple_report(spec, gens, buffer);

  const CliffordRep cl = build_clifford(2);
  const ExactMatrix w = *cl.chirality;
  o.need(w * w == ExactMatrix::identity(2) && rep.chirality_square_exact.value_or(false), "omega^2 != 1");
  // Omega = 1 (x) omega on spinor modes
  const TruncatedDirac d = assemble_dirac(spec);
  const int n = static_cast<int>(d.matrix.rows());
  SparseC om(n, n);
  for (int i = 0; i < n; ++i) om.insert(i, i) = i % 2 == 0 ? 1.0 : -1.0;
  const double anti = frobenius(om * d.matrix + d.matrix * om);
  double comm = 0.0;
  for (const auto& gen : gens) {
    const SparseC p = represent(spec, gen);
    comm = std::max(comm, frobenius(om * p - p * om));
  }
  for (const auto& gr : rep.generators) comm = std::max(comm, gr.chirality_commutator.value_or(INFINITY));
  const double lib_anti = rep.chirality_anticommutator.value_or(INFINITY);
  o.need(std::max(anti, lib_anti) <= 1e-12, "{omega, D} = " + sci(std::max(anti, lib_anti)));
  o.need(comm <= 1e-12, "[omega, pi(f)] = " + sci(comm));

  // beyond the band half-width the square mode box clips the disc |k| <= lambda
  const double top = cut - buffer;
  const double mine = own_exponent(rep.eigenvalues, top);
  o.need(std::abs(rep.growth_exponent - 2.0) <= 0.3, "exponent " + sci(rep.growth_exponent));
  o.need(std::abs(mine - 2.0) <= 0.3, "oracle exponent " + sci(mine));
  o.why << "exponent " << sci(rep.growth_exponent) << " (oracle fit " << sci(mine) << ")";
}

// ---------------------------------------------------------------- 13

void criterion13(Outcome& o) {
  const std::vector<std::pair<std::string, ActionGroupoid>> family{
      {"Z2 circle", rotation_circle(2, 2.0 * kPi, 8)},
      {"Z4 circle", rotation_circle(4, 2.0 * kPi, 8)},
      {"Z2 x Z1 torus", translation_torus({2, 1}, {2.0 * kPi, 2.0 * kPi}, 8)}};
  for (const auto& [name, g] : family) {
    const int dim = base_dimension(g.base);
    // translations have differential 1, and so does the trivial quotient action
    const Bitorsor cov = covering_bitorsor(g);
    const Cocycle down = induce_cocycle(cov, tangent_cocycle(g), SectionFamily{fibre_representatives(cov)});
    bool equal = down.rank == dim;
    for (int a = 0; a < cov.right.num_arrows() && equal; ++a) equal = down.entries[a] == ExactMatrix::identity(dim);
    o.need(equal, name + ": induced tangent cocycle differs");
    const auto sc = spin_correspondence(g, 8, 2);
    o.need(sc.tangent_cocycles_agree, name + ": tangent cocycles reported different");
    o.need(sc.bijective, name + ": lifts do not biject: " + sc.detail);
    // both sides carry one spin structure per twist vector in {0, 1/2}^dim
    const size_t expected = dim == 1 ? 2 : 4;
    std::set<std::pair<Rational, Rational>> images;
    for (const auto& e : sc.upstairs)
      if (e.delta_down) images.insert({(*e.delta_down)[0], (*e.delta_down)[1]});
    o.need(sc.upstairs.size() == expected && sc.downstairs.size() == expected && images.size() == expected,
           name + ": lift counts differ from the oracle");
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"bitorsor axioms at N = 3, 5 and a mutated table", criterion1},
      {"alpha-fibre blocks match the isotropy rank", criterion2},
      {"Cech localization validates", criterion3},
      {"induced sign cocycle and section independence", criterion4},
      {"transport round trips and module law", criterion5},
      {"weak equivalence pair", criterion6},
      {"Z2 and Z4 covering spectra", criterion7},
      {"orbifold integral of 1 on the Z2 circle", criterion8},
      {"symmetry of D on invariant spinors", criterion9},
      {"convolution kernels against effectiveness", criterion10},
      {"commutator norms and drift", criterion11},
      {"pillowcase chirality and growth", criterion12},
      {"tangent cocycles and spin lifts under coverings", criterion13},
  };
  const std::set<int> under_one_second{1, 2};
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.need(false, std::string("error: ") + e.what());
    }
    const double secs = seconds_since(t0);
    if (under_one_second.count(static_cast<int>(i + 1))) o.need(secs < 1.0, "took " + sci(secs) + " s");
    failed += !o.ok;
    std::printf("%s %2zu  %s (%.2f s)%s%s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                o.why.str().empty() ? "" : ": ", o.why.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
