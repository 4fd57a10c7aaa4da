#include "orbi/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace orbi {

// Finite flavor.

std::optional<int> invariance_witness(const FiniteGroupoid& g, const FiniteValues& f) {
  for (int a = 0; a < g.num_arrows(); ++a)
    if (f[g.target(a)] != f[g.source(a)]) return a;
  return std::nullopt;
}

std::optional<int> invariance_witness(const ReconstructedBundle& b, const FiniteValues& psi) {
  const int k = b.rank;
  for (int a = 0; a < b.base.num_arrows(); ++a) {
    const int s = b.base.source(a), t = b.base.target(a);
    for (int i = 0; i < k; ++i) {
      GaussRat v;
      for (int j = 0; j < k; ++j) v += b.action[a](i, j) * psi[s * k + j];
      if (v != psi[t * k + i]) return a;
    }
  }
  return std::nullopt;
}

namespace {

void require_invariant(const std::optional<int>& w, const FiniteGroupoid& g, const char* what) {
  if (w) throw Error(std::string(what) + " is not invariant: arrow " + g.arrow_label(*w) + " moves it");
}

int left_arrow_between(const Bitorsor& phi, int from, int to) {
  for (int s : phi.left.out_of(phi.rho[from]))
    if (phi.act_left(s, from) == to) return s;
  throw Error("carrier points " + phi.carrier[from] + " and " + phi.carrier[to] + " are not in one left orbit");
}

}  // namespace

FiniteValues pushforward_function(const Bitorsor& phi, const FiniteValues& f) {
  require_invariant(invariance_witness(phi.left, f), phi.left, "function");
  const int ny = phi.right.num_objects();
  FiniteValues out(ny);
  std::vector<bool> seen(ny, false);
  for (int q = 0; q < phi.size(); ++q) {
    const int y = phi.alpha[q];
    const GaussRat v = f[phi.rho[q]];
    if (!seen[y]) {
      out[y] = v;
      seen[y] = true;
    } else if (out[y] != v) {
      throw Error("function is not constant on the fibre over " + phi.right.object_label(y));
    }
  }
  for (int y = 0; y < ny; ++y)
    if (!seen[y]) throw Error("empty fibre over " + phi.right.object_label(y));
  return out;
}

FiniteValues pullback_function(const Bitorsor& phi, const FiniteValues& f) {
  require_invariant(invariance_witness(phi.right, f), phi.right, "function");
  const int nx = phi.left.num_objects();
  FiniteValues out(nx);
  std::vector<bool> seen(nx, false);
  for (int q = 0; q < phi.size(); ++q) {
    const int x = phi.rho[q];
    const GaussRat v = f[phi.alpha[q]];
    if (!seen[x]) {
      out[x] = v;
      seen[x] = true;
    } else if (out[x] != v) {
      throw Error("function is not constant on the fibre over " + phi.left.object_label(x));
    }
  }
  for (int x = 0; x < nx; ++x)
    if (!seen[x]) throw Error("empty fibre over " + phi.left.object_label(x));
  return out;
}

FiniteValues pushforward_section(const Bitorsor& phi, const ReconstructedBundle& e, const FiniteValues& psi) {
  require_invariant(invariance_witness(e, psi), e.base, "section");
  const int k = e.rank;
  const auto rep = fibre_representatives(phi);
  FiniteValues out(static_cast<size_t>(phi.right.num_objects()) * k);
  for (int y = 0; y < phi.right.num_objects(); ++y)
    for (int i = 0; i < k; ++i) out[y * k + i] = psi[phi.rho[rep[y]] * k + i];
  return out;
}

FiniteValues pullback_section(const Bitorsor& phi, const ReconstructedBundle& e, const FiniteValues& psi) {
  const int k = e.rank;
  const auto rep = fibre_representatives(phi);
  const int nx = phi.left.num_objects();
  FiniteValues out(static_cast<size_t>(nx) * k);
  std::vector<bool> seen(nx, false);
  for (int q = 0; q < phi.size(); ++q) {
    const int x = phi.rho[q];
    if (seen[x]) continue;
    seen[x] = true;
    const int y = phi.alpha[q];
    const int sigma = left_arrow_between(phi, rep[y], q);
    for (int i = 0; i < k; ++i) {
      GaussRat v;
      for (int j = 0; j < k; ++j) v += e.action[sigma](i, j) * psi[y * k + j];
      out[x * k + i] = v;
    }
  }
  return out;
}

FiniteValues multiply(const FiniteValues& f, const FiniteValues& psi, int rank) {
  FiniteValues out(psi.size());
  for (size_t i = 0; i < psi.size(); ++i) out[i] = f[i / rank] * psi[i];
  return out;
}

ValidationReport validate_inner_product(const ReconstructedBundle& e, const FiniteInnerProduct& ip) {
  ValidationReport r;
  const auto& g = e.base;
  if (static_cast<int>(ip.weight.size()) != g.num_objects()) {
    r.add("shape", "one weight per object expected");
    return r;
  }
  for (int x = 0; x < g.num_objects(); ++x)
    if (ip.weight[x] <= Rational(0)) r.add("positive", "weight at " + g.object_label(x) + " is not positive");
  for (int a = 0; a < g.num_arrows(); ++a) {
    const ExactMatrix gram = e.action[a].adjoint() * e.action[a];
    if (gram.scaled(GaussRat(ip.weight[g.target(a)])) != ExactMatrix::scalar(e.rank, GaussRat(ip.weight[g.source(a)])))
      r.add("invariant", "arrow " + g.arrow_label(a) + " does not preserve the form");
  }
  return r;
}

FiniteInnerProduct induce_inner_product(const Bitorsor& phi, const FiniteInnerProduct& ip) {
  const auto rep = fibre_representatives(phi);
  FiniteInnerProduct out;
  for (int y = 0; y < phi.right.num_objects(); ++y) out.weight.push_back(ip.weight[phi.rho[rep[y]]]);
  return out;
}

FiniteValues pairing(const FiniteInnerProduct& ip, int rank, const FiniteValues& psi1, const FiniteValues& psi2) {
  FiniteValues out(ip.weight.size());
  for (size_t x = 0; x < ip.weight.size(); ++x) {
    GaussRat s;
    for (int i = 0; i < rank; ++i) s += psi1[x * rank + i].conj() * psi2[x * rank + i];
    out[x] = s * GaussRat(ip.weight[x]);
  }
  return out;
}

// Fourier flavor.

FourierBundle trivial_bundle(const ActionGroupoid& g, int rank) {
  FourierBundle b;
  b.rank = rank;
  b.rho.assign(g.group.order(), ExactMatrix::identity(rank));
  return b;
}

FourierBundle spinor_bundle(const ActionGroupoid& g, const CliffordRep& rep, const SpinLift& lift) {
  if (static_cast<int>(lift.matrix.size()) != g.group.order()) throw Error("spin lift does not match the group");
  FourierBundle b;
  b.rank = rep.spin_dim();
  b.delta = lift.delta;
  b.rho = lift.matrix;
  return b;
}

namespace {

ModeFunction resized(const ModeFunction& f, int cutoff) {
  ModeFunction out = ModeFunction::zero(f.geom, cutoff, f.delta);
  for (int i = 0; i < out.modes.size(); ++i) out.coeffs[i] = f.at(out.modes.mode(i));
  return out;
}

ModeFunction angle_derivative(const ModeFunction& f, int d) {
  return scaled(derivative(f, d), f.geom.circumference[d] / (2.0 * std::numbers::pi));
}

std::array<int, 2> grid_shape(int dim, int n) { return {n, dim == 2 ? n : 1}; }

}  // namespace

FieldSection act_element(const ActionGroupoid& g, const FourierBundle& b, int element, const FieldSection& psi) {
  // psi(g^-1 v) = psi(sign (v - shift L)) with the normalized shift, matching the spinor action on modes
  const Isometry& iso = g.isometries[element];
  const Rational sg(iso.sign);
  const Isometry inv{iso.sign, {-sg * iso.shift[0], -sg * iso.shift[1]}};
  FieldSection moved;
  for (const auto& c : psi) {
    moved.push_back(compose(c, inv));
    if (moved.back().delta != c.delta) throw Error("negation requires an untwisted spin structure");
  }
  FieldSection out;
  for (int i = 0; i < b.rank; ++i) {
    ModeFunction acc = ModeFunction::zero(psi[0].geom, psi[0].modes.cutoff, psi[0].delta);
    for (int j = 0; j < b.rank; ++j) {
      const GaussRat& r = b.rho[element](i, j);
      if (!r.is_zero()) acc = add(acc, scaled(moved[j], r.to_complex()));
    }
    out.push_back(std::move(acc));
  }
  return out;
}

FieldSection average(const ActionGroupoid& g, const FourierBundle& b, const FieldSection& psi) {
  FieldSection out;
  for (const auto& c : psi) out.push_back(ModeFunction::zero(c.geom, c.modes.cutoff, c.delta));
  for (int a = 0; a < g.group.order(); ++a) {
    FieldSection u = act_element(g, b, a, psi);
    for (size_t i = 0; i < out.size(); ++i) out[i] = add(out[i], u[i]);
  }
  for (auto& c : out) c = scaled(c, 1.0 / g.group.order());
  return out;
}

ModeFunction average(const ActionGroupoid& g, const ModeFunction& f) {
  return average(g, trivial_bundle(g), FieldSection{f})[0];
}

double max_abs_diff(const FieldSection& a, const FieldSection& b) {
  if (a.size() != b.size()) throw Error("sections of different rank");
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, max_abs_diff(a[i], b[i]));
  return m;
}

InvarianceCheck check_invariance(const ActionGroupoid& g, const FourierBundle& b, const FieldSection& psi) {
  if (static_cast<int>(psi.size()) != b.rank) throw Error("section rank does not match the bundle");
  for (const auto& c : psi)
    if (c.delta != b.delta) throw Error("section twist does not match the bundle");
  InvarianceCheck out;
  for (int a = 0; a < g.group.order(); ++a) {
    double d = max_abs_diff(act_element(g, b, a, psi), psi);
    if (d > out.defect) {
      out.defect = d;
      out.witness = a;
    }
  }
  return out;
}

InvarianceCheck check_invariance(const ActionGroupoid& g, const ModeFunction& f) {
  return check_invariance(g, trivial_bundle(g), FieldSection{f});
}

FieldSection multiply(const ModeFunction& f, const FieldSection& psi, int cutoff) {
  FieldSection out;
  for (const auto& c : psi) out.push_back(multiply(f, c, cutoff));
  return out;
}

CoveringTransport make_transport(const ActionGroupoid& g, const FourierBundle& b) {
  CoveringTransport t;
  t.covering = covering_of(g);
  t.bundle = b;
  const int dim = t.covering.up.dim;
  for (int d = 0; d < dim; ++d) {
    const int m = t.covering.degree[d];
    int gen = -1;
    for (int a = 0; a < g.group.order() && gen < 0; ++a) {
      const Isometry iso = g.isometries[a].normalized();
      bool ok = iso.shift[d] == Rational(1, m);
      for (int e = 0; e < dim; ++e)
        if (e != d && iso.shift[e] != Rational(0)) ok = false;
      if (ok) gen = a;
    }
    if (m == 1) gen = g.group.identity();
    if (gen < 0) throw Error("no generator translating by one fundamental domain on axis " + std::to_string(d));
    t.axis_generator.push_back(gen);
    if (m == 1) {
      t.delta_down[d] = b.delta[d];
      continue;
    }
    const ExactMatrix& r = b.rho[gen];
    const GaussRat c = r(0, 0);
    if (r != ExactMatrix::scalar(b.rank, c)) throw Error("bundle action is not scalar on the translation generator");
    // exp(2 pi i delta') = c on quarter turns
    const GaussRat i = GaussRat::i();
    if (c == GaussRat(1)) t.delta_down[d] = Rational(0);
    else if (c == i) t.delta_down[d] = Rational(1, 4);
    else if (c == GaussRat(-1)) t.delta_down[d] = Rational(1, 2);
    else if (c == -i) t.delta_down[d] = Rational(3, 4);
    else throw Error("bundle phase " + c.str() + " is not a fourth root of unity");
  }
  return t;
}

int down_cutoff(const CoveringTransport& t, int up_cutoff) {
  int c = 0;
  for (int d = 0; d < t.covering.up.dim; ++d) c = std::max(c, up_cutoff / t.covering.degree[d] + 1);
  return c;
}

namespace {

int max_degree(const CoveringTransport& t) { return std::max(t.covering.degree[0], t.covering.degree[1]); }

// Sample the upstairs field on the fundamental domain and read it as a downstairs field.
ModeFunction push_field(const CoveringTransport& t, const ModeFunction& f, const Twist& delta_down) {
  const FlatGeometry& down = t.covering.down;
  const int cd = down_cutoff(t, f.modes.cutoff);
  const auto n = grid_shape(down.dim, 2 * cd + 2);
  return from_grid(down, n, evaluate_at(f, grid_points(down, n)), cd, delta_down);
}

// Evaluate the downstairs field at unreduced upstairs coordinates.
ModeFunction pull_field(const CoveringTransport& t, const ModeFunction& f, int up_cutoff, const Twist& delta_up) {
  const FlatGeometry& up = t.covering.up;
  const int reach = max_degree(t) * (f.modes.cutoff + 1);
  const auto n = grid_shape(up.dim, 2 * std::max(up_cutoff, reach) + 2);
  return from_grid(up, n, evaluate_at(f, grid_points(up, n)), up_cutoff, delta_up);
}

void require_invariant(const InvarianceCheck& c, const char* what) {
  if (!c.invariant())
    throw Error(std::string(what) + " is not invariant: group element " + std::to_string(c.witness) +
                " moves it by " + std::to_string(c.defect));
}

const Twist kUntwisted{Rational(0), Rational(0)};

}  // namespace

ModeFunction pushforward_function(const CoveringTransport& t, const ModeFunction& f) {
  require_invariant(check_invariance(t.covering.upstairs, f), "function");
  return push_field(t, f, kUntwisted);
}

ModeFunction pullback_function(const CoveringTransport& t, const ModeFunction& f, int up_cutoff) {
  return pull_field(t, f, up_cutoff, kUntwisted);
}

FieldSection pushforward_section(const CoveringTransport& t, const FieldSection& psi) {
  require_invariant(check_invariance(t.covering.upstairs, t.bundle, psi), "section");
  FieldSection out;
  for (const auto& c : psi) out.push_back(push_field(t, c, t.delta_down));
  return out;
}

FieldSection pullback_section(const CoveringTransport& t, const FieldSection& psi, int up_cutoff) {
  FieldSection out;
  for (const auto& c : psi) {
    if (c.delta != t.delta_down) throw Error("downstairs section twist does not match the transport");
    out.push_back(pull_field(t, c, up_cutoff, t.bundle.delta));
  }
  return out;
}

InvariantForm zero_form(const ModeFunction& f) { return {0, {f}}; }

InvariantForm exterior_derivative(const InvariantForm& w) {
  if (w.components.empty()) return {w.degree + 1, {}};
  const int dim = w.components[0].geom.dim;
  if (w.degree >= dim) return {w.degree + 1, {}};
  if (w.degree == 0) {
    InvariantForm out{1, {}};
    for (int d = 0; d < dim; ++d) out.components.push_back(angle_derivative(w.components[0], d));
    return out;
  }
  // one-form on the torus: d(F1 dtheta1 + F2 dtheta2) = (d1 F2 - d2 F1) dtheta1 ^ dtheta2
  return {2, {add(angle_derivative(w.components[1], 0), scaled(angle_derivative(w.components[0], 1), -1.0))}};
}

InvarianceCheck check_invariance(const ActionGroupoid& g, const InvariantForm& w) {
  InvarianceCheck out;
  for (int a = 0; a < g.group.order(); ++a) {
    const Isometry& iso = g.isometries[a];
    const double sign = (w.degree % 2 == 1) ? iso.sign : 1.0;
    for (const auto& c : w.components) {
      double d = max_abs_diff(scaled(compose(c, iso), sign), c);
      if (d > out.defect) {
        out.defect = d;
        out.witness = a;
      }
    }
  }
  return out;
}

namespace {

// Product of the covering degrees over the axes of the i-th component.
double component_degree(const CoveringTransport& t, int degree, int i) {
  const auto& m = t.covering.degree;
  if (degree == 0) return 1.0;
  if (degree == 1) return m[i];
  return static_cast<double>(m[0]) * m[1];
}

}  // namespace

InvariantForm pushforward_form(const CoveringTransport& t, const InvariantForm& w) {
  require_invariant(check_invariance(t.covering.upstairs, w), "form");
  InvariantForm out{w.degree, {}};
  for (size_t i = 0; i < w.components.size(); ++i)
    out.components.push_back(
        scaled(push_field(t, w.components[i], kUntwisted), 1.0 / component_degree(t, w.degree, static_cast<int>(i))));
  return out;
}

InvariantForm pullback_form(const CoveringTransport& t, const InvariantForm& w, int up_cutoff) {
  InvariantForm out{w.degree, {}};
  for (size_t i = 0; i < w.components.size(); ++i)
    out.components.push_back(scaled(pull_field(t, w.components[i], up_cutoff, kUntwisted),
                                    component_degree(t, w.degree, static_cast<int>(i))));
  return out;
}

double max_abs_diff(const InvariantForm& a, const InvariantForm& b) {
  if (a.degree != b.degree) throw Error("forms of different degree");
  if (a.components.empty() || b.components.empty()) {
    double m = 0.0;
    for (const auto& c : a.components) m = std::max(m, max_abs_diff(c, scaled(c, 0.0)));
    for (const auto& c : b.components) m = std::max(m, max_abs_diff(c, scaled(c, 0.0)));
    return m;
  }
  double m = 0.0;
  for (size_t i = 0; i < a.components.size(); ++i) m = std::max(m, max_abs_diff(a.components[i], b.components[i]));
  return m;
}

InvariantForm product_form(const ModeFunction& f0, const InvariantForm& df1, int cutoff) {
  InvariantForm out{df1.degree, {}};
  for (const auto& c : df1.components) out.components.push_back(multiply(f0, c, cutoff));
  return out;
}

double branch_overlap_defect(const CoveringTransport& t, const InvariantForm& w) {
  const auto& g = t.covering.upstairs;
  const FlatGeometry& down = t.covering.down;
  const FlatGeometry& up = t.covering.up;
  double worst = 0.0;
  for (const auto& c : w.components) {
    const auto n = grid_shape(down.dim, 2 * c.modes.cutoff + 2);
    const std::vector<double> base = grid_points(down, n);
    const std::vector<cplx> ref = evaluate_at(c, base);
    for (int a = 0; a < g.group.order(); ++a) {
      const Isometry& iso = g.isometries[a];
      std::vector<double> moved = base;
      for (size_t p = 0; p < moved.size(); ++p) {
        const int d = static_cast<int>(p % down.dim);
        const double s = static_cast<double>(iso.shift[d].numerator()) / static_cast<double>(iso.shift[d].denominator());
        moved[p] = iso.sign * moved[p] + s * up.circumference[d];
      }
      const std::vector<cplx> other = evaluate_at(c, moved);
      for (size_t p = 0; p < ref.size(); ++p) worst = std::max(worst, std::abs(other[p] - ref[p]));
    }
  }
  return worst;
}

FourierConnection flat_connection(const FlatGeometry& geom, int rank, int cutoff) {
  FourierConnection c;
  c.rank = rank;
  c.potential.assign(geom.dim, std::vector<ModeFunction>(static_cast<size_t>(rank) * rank,
                                                         ModeFunction::zero(geom, cutoff)));
  return c;
}

namespace {

int band_of(const std::vector<ModeFunction>& fs) {
  int b = 0;
  for (const auto& f : fs) b = std::max(b, f.modes.cutoff);
  return b;
}

}  // namespace

FieldSection covariant_derivative(const FourierConnection& c, const VectorField& v, const FieldSection& psi,
                                  int cutoff) {
  if (static_cast<int>(psi.size()) != c.rank) throw Error("section rank does not match the connection");
  int inner = band_of(psi);
  for (const auto& a : c.potential) inner = std::max(inner, band_of(psi) + band_of(a));
  FieldSection out;
  for (int i = 0; i < c.rank; ++i) {
    ModeFunction acc = ModeFunction::zero(psi[i].geom, cutoff, psi[i].delta);
    for (size_t d = 0; d < v.coeffs.size(); ++d) {
      ModeFunction term = resized(angle_derivative(psi[i], static_cast<int>(d)), inner);
      for (int j = 0; j < c.rank; ++j)
        term = add(term, scaled(multiply(c.potential[d][i * c.rank + j], psi[j], inner), cplx(0.0, 1.0)));
      acc = add(acc, multiply(v.coeffs[d], term, cutoff));
    }
    out.push_back(resized(acc, cutoff));
  }
  return out;
}

ModeFunction directional_derivative(const VectorField& v, const ModeFunction& f, int cutoff) {
  ModeFunction acc = ModeFunction::zero(f.geom, cutoff, f.delta);
  for (size_t d = 0; d < v.coeffs.size(); ++d)
    acc = add(acc, multiply(v.coeffs[d], angle_derivative(f, static_cast<int>(d)), cutoff));
  return resized(acc, cutoff);
}

InvarianceCheck check_invariance(const ActionGroupoid& g, const FourierConnection& c) {
  InvarianceCheck out;
  for (size_t e = 0; e < static_cast<size_t>(c.rank) * c.rank; ++e) {
    InvariantForm a{1, {}};
    for (const auto& comp : c.potential) a.components.push_back(comp[e]);
    InvarianceCheck r = check_invariance(g, a);
    if (r.defect > out.defect) out = r;
  }
  return out;
}

FourierConnection induce_connection(const CoveringTransport& t, const FourierConnection& c) {
  require_invariant(check_invariance(t.covering.upstairs, c), "connection");
  FourierConnection out;
  out.rank = c.rank;
  for (size_t d = 0; d < c.potential.size(); ++d) {
    std::vector<ModeFunction> comp;
    for (const auto& a : c.potential[d])
      comp.push_back(scaled(push_field(t, a, kUntwisted), 1.0 / t.covering.degree[d]));
    out.potential.push_back(std::move(comp));
  }
  return out;
}

VectorField pushforward_field(const CoveringTransport& t, const VectorField& v) {
  VectorField out;
  for (size_t d = 0; d < v.coeffs.size(); ++d) {
    require_invariant(check_invariance(t.covering.upstairs, v.coeffs[d]), "vector field");
    out.coeffs.push_back(scaled(push_field(t, v.coeffs[d], kUntwisted), t.covering.degree[d]));
  }
  return out;
}

double leibniz_defect(const FourierConnection& c, const VectorField& v, const ModeFunction& f,
                      const FieldSection& psi) {
  int big = f.modes.cutoff + band_of(psi) + band_of(v.coeffs);
  for (const auto& a : c.potential) big += band_of(a);
  const FieldSection lhs = covariant_derivative(c, v, multiply(f, psi, big), big);
  const ModeFunction vf = directional_derivative(v, f, big);
  const FieldSection dpsi = covariant_derivative(c, v, psi, big);
  FieldSection rhs;
  for (size_t i = 0; i < psi.size(); ++i) rhs.push_back(add(multiply(vf, psi[i], big), multiply(f, dpsi[i], big)));
  return max_abs_diff(lhs, rhs);
}

ModeFunction pairing(const FourierInnerProduct& ip, const FieldSection& psi1, const FieldSection& psi2) {
  if (psi1.size() != psi2.size()) throw Error("sections of different rank");
  const int cut = band_of(psi1) + band_of(psi2);
  ModeFunction acc = ModeFunction::zero(psi1[0].geom, cut);
  for (size_t i = 0; i < psi1.size(); ++i) {
    ModeFunction term = multiply(conjugate(psi1[i]), psi2[i], cut);
    if (term.delta != acc.delta) throw Error("sections with different twists");
    acc = add(acc, term);
  }
  return scaled(acc, ip.weight);
}

ValidationReport validate_inner_product(const FourierBundle& b, const FourierInnerProduct& ip) {
  ValidationReport r;
  if (!(ip.weight > 0.0)) r.add("positive", "weight is not positive");
  for (size_t a = 0; a < b.rho.size(); ++a)
    if (!(b.rho[a].adjoint() * b.rho[a]).is_identity())
      r.add("invariant", "group element " + std::to_string(a) + " is not unitary");
  return r;
}

}  // namespace orbi
