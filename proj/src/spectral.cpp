#include "orbi/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "orbi/cocycle.hpp"
#include "orbi/kernels.hpp"
#include "orbi/morita.hpp"

namespace orbi {

namespace {

double to_double(const Rational& r) { return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator()); }

ActionGroupoid with_base_cutoff(ActionGroupoid g, int cutoff) {
  if (auto* c = std::get_if<FourierCircle>(&g.base)) c->mode_cutoff = cutoff;
  if (auto* t = std::get_if<FourierTorus>(&g.base)) t->mode_cutoff = cutoff;
  return g;
}

BaseSpace base_of(const FlatGeometry& geom, int cutoff) {
  if (geom.dim == 1) return FourierCircle{geom.circumference[0], cutoff};
  return FourierTorus{geom.circumference, cutoff};
}

ActionGroupoid trivial_action(const FlatGeometry& geom, int cutoff) {
  return ActionGroupoid{FiniteGroup::cyclic(1), base_of(geom, cutoff), {}, {Isometry{}}};
}

SparseC restrict_sparse(const SparseC& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  std::vector<int> col_pos(m.cols(), -1), row_pos(m.rows(), -1);
  for (size_t j = 0; j < cols.size(); ++j) col_pos[cols[j]] = static_cast<int>(j);
  for (size_t i = 0; i < rows.size(); ++i) row_pos[rows[i]] = static_cast<int>(i);
  std::vector<Eigen::Triplet<cplx>> trips;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseC::InnerIterator it(m, k); it; ++it) {
      int r = row_pos[it.row()], c = col_pos[it.col()];
      if (r >= 0 && c >= 0) trips.emplace_back(r, c, it.value());
    }
  SparseC out(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

SparseC block_diagonal(const std::vector<Eigen::MatrixXcd>& blocks) {
  const int s = blocks.empty() ? 0 : static_cast<int>(blocks[0].rows());
  std::vector<Eigen::Triplet<cplx>> trips;
  for (size_t b = 0; b < blocks.size(); ++b)
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j)
        if (blocks[b](i, j) != cplx(0.0, 0.0))
          trips.emplace_back(static_cast<int>(b) * s + i, static_cast<int>(b) * s + j, blocks[b](i, j));
  SparseC m(static_cast<int>(blocks.size()) * s, static_cast<int>(blocks.size()) * s);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

SparseC chirality_operator(const DiracSpec& spec) {
  const Eigen::MatrixXcd w = to_eigen(*spec.rep.chirality);
  return block_diagonal(std::vector<Eigen::MatrixXcd>(spec.modes().size(), w));
}

// Multiplication by f tensored with a spin matrix.
SparseC multiplication_with_block(const ModeFunction& f, const ModeSet& modes, const Eigen::MatrixXcd& block) {
  const int s = static_cast<int>(block.rows());
  std::vector<Eigen::Triplet<cplx>> trips;
  for (int j = 0; j < modes.size(); ++j) {
    Mode kj = modes.mode(j);
    for (int l = 0; l < f.modes.size(); ++l) {
      if (f.coeffs[l] == cplx(0.0, 0.0)) continue;
      Mode kl = f.modes.mode(l);
      int i = modes.index({kj[0] + kl[0], kj[1] + kl[1]});
      if (i < 0) continue;
      for (int r = 0; r < s; ++r)
        for (int c = 0; c < s; ++c)
          if (block(r, c) != cplx(0.0, 0.0)) trips.emplace_back(i * s + r, j * s + c, f.coeffs[l] * block(r, c));
    }
  }
  SparseC m(modes.size() * s, modes.size() * s);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

double max_entry(const SparseC& m) {
  double r = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseC::InnerIterator it(m, k); it; ++it) r = std::max(r, std::abs(it.value()));
  return r;
}

// Orbits of the modes in `subset` under the lifted action (mode part only).
std::vector<std::vector<int>> mode_orbits(const DiracSpec& spec, const std::vector<int>& subset) {
  const ModeSet modes = spec.modes();
  std::vector<char> seen(modes.size(), 0);
  std::vector<std::vector<int>> out;
  for (int m : subset) {
    if (seen[m]) continue;
    std::vector<int> orbit;
    for (int g = 0; g < spec.groupoid.group.order(); ++g) {
      ModeImage im = mode_image(spec.groupoid.isometries[g], spec.rep.n, spec.lift.delta, modes.mode(m));
      int idx = modes.index(im.mode);
      if (idx < 0) throw Error("group action leaves the truncated mode set");
      if (!seen[idx]) {
        seen[idx] = 1;
        orbit.push_back(idx);
      }
    }
    std::sort(orbit.begin(), orbit.end());
    out.push_back(std::move(orbit));
  }
  return out;
}

struct OrbitBlock {
  std::vector<int> indices;  // spinor-mode indices
  Eigen::MatrixXcd basis;    // local orthonormal basis of the invariant part
};

std::vector<OrbitBlock> invariant_blocks(const DiracSpec& spec, const ModeBox& box) {
  const ModeSet modes = spec.modes();
  const int s = spec.spin_dim();
  const SparseC p = invariant_projector(spec);
  std::vector<OrbitBlock> out;
  for (const auto& orbit : mode_orbits(spec, box_modes(modes, spec.lift.delta, box))) {
    OrbitBlock b;
    for (int m : orbit)
      for (int c = 0; c < s; ++c) b.indices.push_back(m * s + c);
    Eigen::MatrixXcd po = restrict_dense(p, b.indices, b.indices);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(po);
    std::vector<int> keep;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
      if (es.eigenvalues()(i) > 0.5) keep.push_back(i);
    if (keep.empty()) continue;
    b.basis.resize(b.indices.size(), keep.size());
    for (size_t j = 0; j < keep.size(); ++j) b.basis.col(j) = es.eigenvectors().col(keep[j]);
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<Twist> all_twists(int dim) {
  const Rational z(0), h(1, 2);
  if (dim == 1) return {{z, z}, {h, z}};
  return {{z, z}, {z, h}, {h, z}, {h, h}};
}

std::string twist_str(const Twist& t, int dim) {
  std::ostringstream os;
  os << "(";
  for (int d = 0; d < dim; ++d) os << (d ? "," : "") << t[d].numerator() << (t[d].denominator() == 1 ? "" : "/" + std::to_string(t[d].denominator()));
  os << ")";
  return os.str();
}

}  // namespace

DiracSpec make_dirac_spec(const ActionGroupoid& g, const SpinLift& lift, int cutoff) {
  if (!g.is_fourier_flavor()) throw Error("Dirac operators need a Fourier base");
  if (cutoff < 8) throw Error("mode cutoff must be at least 8");
  DiracSpec spec;
  spec.groupoid = with_base_cutoff(g, cutoff);
  spec.rep = build_clifford(base_dimension(g.base));
  spec.lift = lift;
  spec.cutoff = cutoff;
  ValidationReport r = validate_spin_lift(spec.groupoid, spec.rep, lift);
  if (!r.valid()) throw Error("invalid spin lift: " + r.violations.front().kind + " " + r.violations.front().detail);
  return spec;
}

DiracSpec with_cutoff(const DiracSpec& spec, int cutoff) {
  DiracSpec out = spec;
  out.cutoff = cutoff;
  out.groupoid = with_base_cutoff(spec.groupoid, cutoff);
  return out;
}

std::vector<SparseC> action_matrices(const DiracSpec& spec) {
  const ModeSet modes = spec.modes();
  const int s = spec.spin_dim();
  std::vector<SparseC> out;
  for (int g = 0; g < spec.groupoid.group.order(); ++g) {
    const Eigen::MatrixXcd rho = to_eigen(spec.lift.matrix[g]);
    std::vector<Eigen::Triplet<cplx>> trips;
    for (int j = 0; j < modes.size(); ++j) {
      ModeImage im = mode_image(spec.groupoid.isometries[g], spec.rep.n, spec.lift.delta, modes.mode(j));
      int i = modes.index(im.mode);
      if (i < 0) throw Error("group action leaves the truncated mode set");
      const cplx ph = turn_phase(im.turn);
      for (int r = 0; r < s; ++r)
        for (int c = 0; c < s; ++c)
          if (rho(r, c) != cplx(0.0, 0.0)) trips.emplace_back(i * s + r, j * s + c, ph * rho(r, c));
    }
    SparseC u(modes.size() * s, modes.size() * s);
    u.setFromTriplets(trips.begin(), trips.end());
    out.push_back(std::move(u));
  }
  return out;
}

SparseC invariant_projector(const DiracSpec& spec) {
  auto us = action_matrices(spec);
  SparseC p = us[0];
  for (size_t g = 1; g < us.size(); ++g) p += us[g];
  p *= cplx(1.0 / static_cast<double>(us.size()), 0.0);
  p.prune(cplx(0.0, 0.0));
  return p;
}

TruncatedDirac assemble_dirac(const DiracSpec& spec) {
  TruncatedDirac d;
  d.geom = spec.geometry();
  d.modes = spec.modes();
  d.spin_dim = spec.spin_dim();
  d.delta = spec.lift.delta;
  std::vector<Eigen::MatrixXcd> gam;
  for (const auto& g : spec.rep.gamma) gam.push_back(to_eigen(g));
  for (int i = 0; i < d.modes.size(); ++i) {
    Mode k = d.modes.mode(i);
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(d.spin_dim, d.spin_dim);
    for (int a = 0; a < spec.rep.n; ++a)
      b += gam[a] * ((k[a] + to_double(d.delta[a])) * 2.0 * std::numbers::pi / d.geom.circumference[a]);
    d.hermiticity_residual = std::max(d.hermiticity_residual, (b - b.adjoint()).cwiseAbs().maxCoeff());
    d.blocks.push_back(std::move(b));
  }
  d.matrix = block_diagonal(d.blocks);
  for (const SparseC& u : action_matrices(spec)) {
    SparseC c = u * d.matrix - d.matrix * u;
    d.invariance_residual = std::max(d.invariance_residual, frobenius(c));
  }
  if (d.invariance_residual > 1e-12) {
    std::ostringstream os;
    os << "lift/action mismatch: invariance residual " << d.invariance_residual;
    throw Error(os.str());
  }
  return d;
}

ModeBox uniform_box(double k) { return {k, k}; }

std::vector<int> box_modes(const ModeSet& modes, const Twist& delta, const ModeBox& box) {
  std::vector<int> out;
  for (int i = 0; i < modes.size(); ++i) {
    Mode k = modes.mode(i);
    bool in = true;
    for (int d = 0; d < modes.dim; ++d)
      if (std::abs(k[d] + to_double(delta[d])) > box[d] + 1e-9) in = false;
    if (in) out.push_back(i);
  }
  return out;
}

std::vector<double> invariant_spectrum(const DiracSpec& spec, const TruncatedDirac& d, const ModeBox& box) {
  std::vector<Eigen::MatrixXcd> compressed;
  for (const auto& b : invariant_blocks(spec, box)) {
    Eigen::MatrixXcd dof = restrict_dense(d.matrix, b.indices, b.indices);
    Eigen::MatrixXcd c = b.basis.adjoint() * dof * b.basis;
    compressed.push_back(0.5 * (c + c.adjoint()));
  }
  std::vector<double> ev = kernels::block_eigenvalues(compressed);
  std::sort(ev.begin(), ev.end());
  return ev;
}

Eigen::MatrixXcd invariant_basis(const DiracSpec& spec, const ModeBox& box) {
  auto blocks = invariant_blocks(spec, box);
  int cols = 0;
  for (const auto& b : blocks) cols += static_cast<int>(b.basis.cols());
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(spec.modes().size() * spec.spin_dim(), cols);
  int c0 = 0;
  for (const auto& b : blocks) {
    for (size_t i = 0; i < b.indices.size(); ++i) v.block(b.indices[i], c0, 1, b.basis.cols()) = b.basis.row(i);
    c0 += static_cast<int>(b.basis.cols());
  }
  return v;
}

// Orbifold integration.

double partition_defect(const OrbifoldMeasure& m) {
  std::vector<std::map<int, double>> weight(m.charts.size());
  for (size_t a = 0; a < m.charts.size(); ++a) {
    const Chart& c = m.charts[a];
    for (size_t i = 0; i < c.points.size(); ++i) {
      const int stab = c.stabilizer.empty() ? c.principal_rank : c.stabilizer[i];
      weight[a][c.points[i]] += c.rho[i] * stab / static_cast<double>(c.group_order);
    }
  }
  double worst = 0.0;
  for (const auto& orbit : m.orbits) {
    double s = 0.0;
    for (size_t a = 0; a < m.charts.size(); ++a)
      for (int x : orbit) {
        auto it = weight[a].find(x);
        if (it != weight[a].end()) s += it->second;
      }
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

cplx orbifold_integral(const OrbifoldMeasure& m, const std::vector<cplx>& values) {
  const double defect = partition_defect(m);
  if (defect > 1e-10) {
    std::ostringstream os;
    os << "partition of unity does not sum to 1 (defect " << defect << ")";
    throw Error(os.str());
  }
  if (values.size() != m.volume.size()) throw Error("function sampled on the wrong grid");
  cplx total(0.0, 0.0);
  for (const auto& c : m.charts) {
    cplx part(0.0, 0.0);
    for (size_t i = 0; i < c.points.size(); ++i) part += c.rho[i] * values[c.points[i]] * m.volume[c.points[i]];
    total += part * (static_cast<double>(c.principal_rank) / c.group_order);
  }
  return total;
}

namespace {

OrbifoldMeasure grid_measure(const ActionGroupoid& g) {
  const FlatGeometry geom = geometry_of(g.base);
  const int n = sample_grid_size(g.base);
  const int np = geom.dim == 1 ? n : n * n;
  double cell = geom.circumference[0] / n;
  if (geom.dim == 2) cell *= geom.circumference[1] / n;
  OrbifoldMeasure m;
  m.volume.assign(np, cell);
  m.orbits = orbits(g).orbits;
  return m;
}

std::vector<int> grid_stabilizers(const ActionGroupoid& g) {
  const FiniteGroupoid fin = g.to_finite();
  std::vector<int> out(fin.num_objects());
  for (int x = 0; x < fin.num_objects(); ++x) out[x] = static_cast<int>(fin.hom(x, x).size());
  return out;
}

int kernel_order(const ActionGroupoid& g) {
  int k = 0;
  for (const auto& iso : g.isometries) k += iso.is_identity() ? 1 : 0;
  return k;
}

}  // namespace

OrbifoldMeasure single_chart_measure(const ActionGroupoid& g) {
  OrbifoldMeasure m = grid_measure(g);
  Chart c;
  c.name = "full";
  c.points.resize(m.volume.size());
  std::iota(c.points.begin(), c.points.end(), 0);
  c.rho.assign(c.points.size(), 1.0);
  c.group_order = g.group.order();
  c.principal_rank = kernel_order(g);
  c.stabilizer = grid_stabilizers(g);
  m.charts.push_back(std::move(c));
  return m;
}

OrbifoldMeasure two_chart_measure(const ActionGroupoid& g, const ModeFunction& rho) {
  OrbifoldMeasure m = grid_measure(g);
  const int n = sample_grid_size(g.base);
  std::vector<cplx> vals = evaluate(rho, {n, n});
  for (const auto& orbit : m.orbits)
    for (int x : orbit)
      if (std::abs(vals[x] - vals[orbit.front()]) > 1e-10) throw Error("partition function is not invariant");
  Chart a, b;
  a.name = "rho";
  b.name = "1-rho";
  for (size_t p = 0; p < vals.size(); ++p) {
    a.points.push_back(static_cast<int>(p));
    b.points.push_back(static_cast<int>(p));
    a.rho.push_back(vals[p].real());
    b.rho.push_back(1.0 - vals[p].real());
  }
  a.group_order = b.group_order = g.group.order();
  a.principal_rank = b.principal_rank = kernel_order(g);
  a.stabilizer = b.stabilizer = grid_stabilizers(g);
  m.charts = {a, b};
  return m;
}

OrbifoldMeasure fundamental_domain_measure(const ActionGroupoid& g) {
  OrbifoldMeasure m = grid_measure(g);
  // representatives grouped by stabilizer order; each block is a chart with that local group
  std::map<int, Chart> blocks;
  for (const auto& orbit : m.orbits) {
    const int stab = g.group.order() / static_cast<int>(orbit.size());
    Chart& c = blocks[stab];
    c.points.push_back(orbit.front());
  }
  for (auto& [stab, c] : blocks) {
    c.name = "fundamental-domain/" + std::to_string(stab);
    std::sort(c.points.begin(), c.points.end());
    c.rho.assign(c.points.size(), 1.0);
    c.stabilizer.assign(c.points.size(), stab);
    c.group_order = stab;
    c.principal_rank = kernel_order(g);
    m.charts.push_back(std::move(c));
  }
  return m;
}

OrbifoldMeasure finite_measure(const FiniteGroupoid& g) {
  OrbifoldMeasure m;
  m.volume.assign(g.num_objects(), 1.0);
  m.orbits = orbits(g).orbits;
  for (const auto& orbit : m.orbits)
    for (int x : orbit) {
      Chart c;
      c.name = g.object_label(x);
      c.points = {x};
      c.rho = {1.0 / static_cast<double>(orbit.size())};
      c.group_order = c.principal_rank = isotropy(g, x).rank();
      m.charts.push_back(std::move(c));
    }
  return m;
}

// Coverings.

Covering covering_of(const ActionGroupoid& g) {
  if (!g.is_fourier_flavor()) throw Error("coverings need a Fourier base");
  Covering cov;
  cov.upstairs = g;
  cov.up = geometry_of(g.base);
  const int dim = cov.up.dim;
  for (int a = 0; a < g.group.order(); ++a) {
    const Isometry& iso = g.isometries[a];
    if (iso.sign != 1) throw Error("not an etale-structure-preserving covering: orientation-reversing element");
    if (a != g.group.identity() && iso.is_identity())
      throw Error("not an etale-structure-preserving covering: element " + std::to_string(a) + " acts trivially");
    for (int d = 0; d < dim; ++d)
      cov.degree[d] = std::lcm(cov.degree[d], static_cast<int>(iso.shift[d].denominator()));
  }
  int prod = 1;
  for (int d = 0; d < dim; ++d) prod *= cov.degree[d];
  if (prod != g.group.order()) throw Error("not an etale-structure-preserving covering: quotient is not a product");
  cov.down = cov.up;
  for (int d = 0; d < dim; ++d) cov.down.circumference[d] = cov.up.circumference[d] / cov.degree[d];
  return cov;
}

InducedDirac induced_dirac(const DiracSpec& spec, int buffer, bool build_unitary) {
  const Covering cov = covering_of(spec.groupoid);
  const int dim = spec.rep.n;
  const int m = spec.cutoff;
  const int k = m - buffer;
  InducedDirac out;
  const TruncatedDirac up = assemble_dirac(spec);
  out.up_spectrum = invariant_spectrum(spec, up, uniform_box(k));

  ModeBox down_box{0.0, 0.0};
  for (int d = 0; d < dim; ++d) down_box[d] = static_cast<double>(k) / cov.degree[d];
  const ActionGroupoid down_g = trivial_action(cov.down, m);
  double best = std::numeric_limits<double>::infinity();
  for (const Twist& t : all_twists(dim)) {
    DiracSpec ds = make_dirac_spec(down_g, untwisted_lift(down_g, spec.rep, t), m);
    TruncatedDirac dd = assemble_dirac(ds);
    std::vector<double> ev = invariant_spectrum(ds, dd, down_box);
    if (ev.size() != out.up_spectrum.size()) continue;
    double gap = 0.0;
    for (size_t i = 0; i < ev.size(); ++i) gap = std::max(gap, std::abs(ev[i] - out.up_spectrum[i]));
    if (gap < best) {
      best = gap;
      out.delta_down = t;
      out.downstairs = dd;
      out.down_spectrum = ev;
      out.spectrum_gap = gap;
      out.delta_found = gap <= 1e-9;
    }
  }
  if (!std::isfinite(best)) {
    out.spectrum_gap = best;
    return out;
  }

  // consistency: psi(g w) = rho_s(g) psi(w) at fundamental-domain points.
  const Eigen::MatrixXcd v = invariant_basis(spec, uniform_box(k));
  const int s = spec.spin_dim();
  auto field = [&](const Eigen::VectorXcd& col) {
    std::vector<ModeFunction> comps;
    for (int c = 0; c < s; ++c) {
      ModeFunction f = ModeFunction::zero(cov.up, m, spec.lift.delta);
      for (int i = 0; i < f.modes.size(); ++i) f.coeffs[i] = col(i * s + c);
      comps.push_back(std::move(f));
    }
    return comps;
  };
  std::array<int, 2> n_down{1, 1};
  for (int d = 0; d < dim; ++d) {
    if ((4 * m) % cov.degree[d] != 0) throw Error("grid is not compatible with the covering degree");
    n_down[d] = 4 * m / cov.degree[d];
  }
  const std::vector<double> fd_points = grid_points(cov.down, n_down);
  if (v.cols() > 0) {
    Eigen::VectorXcd probe = v.rowwise().sum();
    auto comps = field(probe);
    std::vector<std::vector<cplx>> base_vals;
    for (const auto& f : comps) base_vals.push_back(evaluate_at(f, fd_points));
    for (int g = 0; g < spec.groupoid.group.order(); ++g) {
      const Isometry& iso = spec.groupoid.isometries[g];
      std::vector<double> moved = fd_points;
      for (size_t p = 0; p < moved.size(); ++p) {
        const int d = static_cast<int>(p % dim);
        moved[p] = iso.sign * fd_points[p] + to_double(iso.shift[d]) * cov.up.circumference[d];
      }
      const Eigen::MatrixXcd rho = to_eigen(spec.lift.matrix[g]);
      std::vector<std::vector<cplx>> moved_vals;
      for (const auto& f : comps) moved_vals.push_back(evaluate_at(f, moved));
      for (size_t p = 0; p < base_vals[0].size(); ++p)
        for (int r = 0; r < s; ++r) {
          cplx expect(0.0, 0.0);
          for (int c = 0; c < s; ++c) expect += rho(r, c) * base_vals[c][p];
          out.representative_defect = std::max(out.representative_defect, std::abs(moved_vals[r][p] - expect));
        }
    }
  }

  if (!build_unitary) return out;
  const int down_cut = std::min(m, (std::min(n_down[0], dim == 2 ? n_down[1] : n_down[0]) - 1) / 2);
  const ModeSet down_modes = out.downstairs.modes;
  std::vector<int> rows;
  for (int i : box_modes(down_modes, out.delta_down, down_box))
    for (int c = 0; c < s; ++c) rows.push_back(i * s + c);
  out.unitary = Eigen::MatrixXcd::Zero(rows.size(), v.cols());
  std::array<int, 2> n_up{4 * m, 4 * m};
  for (int col = 0; col < v.cols(); ++col) {
    auto comps = field(v.col(col));
    for (int c = 0; c < s; ++c) {
      std::vector<cplx> full = evaluate(comps[c], n_up);
      std::vector<cplx> sub;
      if (dim == 1) {
        sub.assign(full.begin(), full.begin() + n_down[0]);
      } else {
        for (int i = 0; i < n_down[0]; ++i)
          for (int j = 0; j < n_down[1]; ++j) sub.push_back(full[static_cast<size_t>(i) * n_up[1] + j]);
      }
      ModeFunction f = from_grid(cov.down, n_down, sub, down_cut, out.delta_down);
      for (size_t r = 0; r < rows.size(); ++r) {
        if (rows[r] % s != c) continue;
        out.unitary(r, col) = f.at(down_modes.mode(rows[r] / s));
      }
    }
  }
  const Eigen::MatrixXcd& u = out.unitary;
  if (u.rows() == u.cols()) {
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(u.cols(), u.cols());
    out.unitarity_residual = std::max((u.adjoint() * u - id).cwiseAbs().maxCoeff(), (u * u.adjoint() - id).cwiseAbs().maxCoeff());
    const Eigen::MatrixXcd dv = up.matrix * v;
    const Eigen::MatrixXcd dinv = v.adjoint() * dv;
    const Eigen::MatrixXcd ddown = restrict_dense(out.downstairs.matrix, rows, rows);
    out.conjugation_residual = (u * dinv * u.adjoint() - ddown).cwiseAbs().maxCoeff();
  } else {
    out.unitarity_residual = out.conjugation_residual = std::numeric_limits<double>::infinity();
  }
  return out;
}

SpinCorrespondence spin_correspondence(const ActionGroupoid& g, int cutoff, int buffer) {
  SpinCorrespondence out;
  const Covering cov = covering_of(g);
  const int dim = cov.up.dim;
  const CliffordRep rep = build_clifford(dim);
  for (const Twist& t : all_twists(dim)) {
    std::vector<SpinLift> lifts;
    try {
      lifts = spin_lift_search(g, rep, t);
    } catch (const Error&) {
      continue;
    }
    for (const auto& l : lifts) {
      DiracSpec spec = make_dirac_spec(g, l, cutoff);
      InducedDirac ind = induced_dirac(spec, buffer, false);
      SpinCorrespondence::Entry e{t, twist_str(t, dim) + " " + l.label, std::nullopt};
      if (ind.matched()) e.delta_down = ind.delta_down;
      out.upstairs.push_back(e);
    }
  }
  const ActionGroupoid down_g = trivial_action(cov.down, cutoff_of(g.base));
  for (const Twist& t : all_twists(dim))
    for (size_t i = 0; i < spin_lift_search(down_g, rep, t).size(); ++i) out.downstairs.push_back(t);

  std::vector<int> hit(out.downstairs.size(), 0);
  bool injective = true;
  for (const auto& e : out.upstairs) {
    if (!e.delta_down) {
      injective = false;
      out.detail += "no downstairs spin structure for " + e.lift_label + "; ";
      continue;
    }
    auto it = std::find(out.downstairs.begin(), out.downstairs.end(), *e.delta_down);
    if (it == out.downstairs.end()) {
      injective = false;
      continue;
    }
    if (hit[it - out.downstairs.begin()]++) {
      injective = false;
      out.detail += "two upstairs lifts map to " + twist_str(*e.delta_down, dim) + "; ";
    }
  }
  out.bijective = injective && std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; });

  // Induced tangent cocycle against the quotient's own tangent cocycle.
  const Bitorsor phi = covering_bitorsor(g);
  const Cocycle induced = induce_cocycle(phi, tangent_cocycle(g), SectionFamily{fibre_representatives(phi)});
  const Cocycle down_tangent = tangent_cocycle(down_g);
  const int n_up = sample_grid_size(g.base);
  const int n_dn = sample_grid_size(down_g.base);
  const auto reps = fibre_representatives(phi);
  bool agree = induced.rank == down_tangent.rank;
  for (int a = 0; a < induced.groupoid.num_arrows() && agree; ++a) {
    const int p = reps[induced.groupoid.target(a)];
    int dn = 0;
    if (dim == 1) {
      dn = p * cov.degree[0];
    } else {
      dn = (p / n_up) * cov.degree[0] * n_dn + (p % n_up) * cov.degree[1];
    }
    if (induced.entries[a] != down_tangent.entries[dn]) agree = false;
  }
  out.tangent_cocycles_agree = agree;
  if (!agree) out.detail += "induced tangent cocycle differs from the quotient's; ";
  return out;
}

// Spectral triple checks.

int Generator::degree() const {
  int d = 0;
  for (const auto& p : parts) d = std::max(d, p.degree(1e-14));
  return d;
}

Generator function_generator(const ActionGroupoid& g, const std::string& name, const ModeFunction& f) {
  Generator gen;
  gen.name = name;
  for (int a = 0; a < g.group.order(); ++a)
    gen.parts.push_back(a == g.group.identity() ? f : ModeFunction::zero(f.geom, f.modes.cutoff));
  return gen;
}

SparseC represent(const DiracSpec& spec, const Generator& f) {
  const auto us = action_matrices(spec);
  if (f.parts.size() != us.size()) throw Error("generator has the wrong number of group components");
  const ModeSet modes = spec.modes();
  SparseC out(modes.size() * spec.spin_dim(), modes.size() * spec.spin_dim());
  for (size_t g = 0; g < us.size(); ++g) {
    if (f.parts[g].degree(0.0) == 0 && f.parts[g].at({0, 0}) == cplx(0.0, 0.0)) continue;
    if (f.parts[g].modes.cutoff > spec.cutoff && f.parts[g].degree(1e-14) > spec.cutoff)
      throw Error("generator not representable at cutoff " + std::to_string(spec.cutoff));
    out += us[g] * multiplication_operator(f.parts[g], modes, spec.spin_dim());
  }
  return out;
}

SparseC symbol_operator(const DiracSpec& spec, const Generator& f) {
  const auto us = action_matrices(spec);
  const ModeSet modes = spec.modes();
  SparseC out(modes.size() * spec.spin_dim(), modes.size() * spec.spin_dim());
  for (size_t g = 0; g < us.size(); ++g)
    for (int d = 0; d < spec.rep.n; ++d) {
      Eigen::MatrixXcd block = to_eigen(spec.rep.gamma[d]) * cplx(0.0, -1.0);
      out += us[g] * multiplication_with_block(derivative(f.parts[g], d), modes, block);
    }
  return out;
}

double band_norm(const SparseC& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  if (rows.empty() || cols.empty()) return 0.0;
  if (rows.size() <= 1000 && cols.size() <= 1000) return operator_norm(restrict_dense(m, rows, cols));
  const SparseC a = restrict_sparse(m, rows, cols);
  const SparseC ah = a.adjoint();
  Eigen::VectorXcd x(a.cols());
  for (int i = 0; i < x.size(); ++i) x(i) = cplx(1.0 + 0.1 * std::sin(1.0 + i), 0.05 * std::cos(3.0 * i));
  x.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 3000; ++it) {
    Eigen::VectorXcd y = ah * (a * x);
    const double next = y.norm();
    if (next == 0.0) return 0.0;
    x = y / next;
    if (std::abs(next - lambda) <= 1e-15 * next) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(lambda);
}

double counting_exponent(const std::vector<double>& eigenvalues, double lambda_max) {
  std::vector<double> mags;
  for (double e : eigenvalues) mags.push_back(std::abs(e));
  std::sort(mags.begin(), mags.end());
  const int samples = 48;
  std::vector<double> xs, ys;
  for (int j = samples / 4; j <= samples; ++j) {
    const double lam = lambda_max * j / samples;
    const auto count = std::upper_bound(mags.begin(), mags.end(), lam * (1.0 + 1e-12)) - mags.begin();
    if (count == 0) continue;
    xs.push_back(std::log(lam));
    ys.push_back(std::log(static_cast<double>(count)));
  }
  if (xs.size() < 2) return 0.0;
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

double divergence_residual(const DiracSpec& spec, int buffer, int samples, unsigned seed) {
  const Eigen::MatrixXcd v = invariant_basis(spec, uniform_box(spec.cutoff - buffer));
  if (v.cols() == 0) return 0.0;
  const TruncatedDirac d = assemble_dirac(spec);
  const OrbifoldMeasure measure = single_chart_measure(spec.groupoid);
  const int s = spec.spin_dim();
  const int n = sample_grid_size(spec.groupoid.base);
  const FlatGeometry geom = spec.geometry();
  auto sample = [&](const Eigen::VectorXcd& c) {
    std::vector<std::vector<cplx>> vals;
    for (int comp = 0; comp < s; ++comp) {
      ModeFunction f = ModeFunction::zero(geom, spec.cutoff, spec.lift.delta);
      for (int i = 0; i < f.modes.size(); ++i) f.coeffs[i] = c(i * s + comp);
      vals.push_back(evaluate(f, {n, n}));
    }
    return vals;
  };
  auto inner = [&](const std::vector<std::vector<cplx>>& a, const std::vector<std::vector<cplx>>& b) {
    std::vector<cplx> pt(a[0].size(), cplx(0.0, 0.0));
    for (int comp = 0; comp < s; ++comp)
      for (size_t p = 0; p < pt.size(); ++p) pt[p] += std::conj(a[comp][p]) * b[comp][p];
    return orbifold_integral(measure, pt);
  };
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto random_field = [&]() {
    Eigen::VectorXcd r(v.cols());
    for (int i = 0; i < r.size(); ++i) r(i) = cplx(normal(rng), normal(rng));
    Eigen::VectorXcd c = v * r;
    const double norm = std::sqrt(std::abs(inner(sample(c), sample(c))));
    return Eigen::VectorXcd(c / norm);
  };
  double worst = 0.0;
  for (int t = 0; t < samples; ++t) {
    Eigen::VectorXcd a = random_field(), b = random_field();
    Eigen::VectorXcd da = d.matrix * a, db = d.matrix * b;
    const cplx lhs = inner(sample(da), sample(b));
    const cplx rhs = inner(sample(a), sample(db));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

SpectralTripleReport check_spectral_triple(const DiracSpec& spec, const std::vector<Generator>& generators,
                                           int buffer) {
  SpectralTripleReport rep;
  rep.dimension = spec.rep.n;
  rep.cutoff = spec.cutoff;
  const TruncatedDirac d = assemble_dirac(spec);
  const SparseC p = invariant_projector(spec);
  rep.hermiticity_residual = d.hermiticity_residual;
  rep.invariance_residual = d.invariance_residual;
  rep.projector_idempotency = frobenius(SparseC(p * p - p));
  rep.projector_commutator = frobenius(SparseC(p * d.matrix - d.matrix * p));
  const int k = spec.cutoff - buffer;
  rep.eigenvalues = invariant_spectrum(spec, d, uniform_box(k));
  const FlatGeometry geom = spec.geometry();
  double lmax = std::numeric_limits<double>::infinity();
  for (int a = 0; a < geom.dim; ++a) lmax = std::min(lmax, k * 2.0 * std::numbers::pi / geom.circumference[a]);
  rep.growth_exponent = counting_exponent(rep.eigenvalues, lmax);

  const DiracSpec spec2 = with_cutoff(spec, 2 * spec.cutoff);
  const TruncatedDirac d2 = assemble_dirac(spec2);
  std::optional<SparseC> omega;
  if (spec.rep.chirality) {
    omega = chirality_operator(spec);
    rep.chirality_square_exact = ((*spec.rep.chirality) * (*spec.rep.chirality)).is_identity();
    rep.chirality_anticommutator = frobenius(SparseC(*omega * d.matrix + d.matrix * *omega));
  }
  for (const Generator& g : generators) {
    GeneratorReport gr;
    gr.name = g.name;
    gr.buffer = std::max({2, buffer, g.degree()});
    const SparseC pi = represent(spec, g);
    const SparseC comm = d.matrix * pi - pi * d.matrix;
    const auto band = d.interior(gr.buffer);
    gr.norm = band_norm(comm, band, band);
    const SparseC pi2 = represent(spec2, g);
    const SparseC comm2 = d2.matrix * pi2 - pi2 * d2.matrix;
    const auto band2 = d2.interior(gr.buffer);
    gr.norm_double = band_norm(comm2, band2, band2);
    gr.drift = std::abs(gr.norm_double - gr.norm) / std::max(gr.norm, 1e-300);
    if (gr.norm == 0.0 && gr.norm_double == 0.0) gr.drift = 0.0;
    gr.symbol_residual = max_entry(restrict_sparse(SparseC(comm - symbol_operator(spec, g)), band, band));
    gr.projector_residual = max_entry(restrict_sparse(SparseC(p * pi - pi * p), band, band));
    if (omega) gr.chirality_commutator = frobenius(SparseC(*omega * pi - pi * *omega));
    rep.generators.push_back(gr);
  }
  rep.divergence_residual = divergence_residual(spec, buffer, 3, 7u);
  return rep;
}

}  // namespace orbi
