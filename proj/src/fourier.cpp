#include "orbi/fourier.hpp"

#include <cmath>
#include <numbers>

#include "orbi/kernels.hpp"

namespace orbi {

FlatGeometry geometry_of(const BaseSpace& base) {
  FlatGeometry g;
  if (const auto* c = std::get_if<FourierCircle>(&base)) {
    g.dim = 1;
    g.circumference = {c->circumference, 0.0};
  } else if (const auto* t = std::get_if<FourierTorus>(&base)) {
    g.dim = 2;
    g.circumference = t->circumferences;
  } else {
    throw Error("finite base has no flat geometry");
  }
  return g;
}

int cutoff_of(const BaseSpace& base) {
  if (const auto* c = std::get_if<FourierCircle>(&base)) return c->mode_cutoff;
  if (const auto* t = std::get_if<FourierTorus>(&base)) return t->mode_cutoff;
  throw Error("finite base has no mode cutoff");
}

int ModeSet::index(const Mode& k) const {
  if (std::abs(k[0]) > cutoff) return -1;
  if (dim == 1) return k[0] + cutoff;
  if (std::abs(k[1]) > cutoff) return -1;
  return (k[0] + cutoff) * width() + (k[1] + cutoff);
}

Mode ModeSet::mode(int idx) const {
  if (dim == 1) return {idx - cutoff, 0};
  return {idx / width() - cutoff, idx % width() - cutoff};
}

int ModeSet::sup_norm(int idx) const {
  Mode k = mode(idx);
  return std::max(std::abs(k[0]), std::abs(k[1]));
}

ModeFunction ModeFunction::zero(const FlatGeometry& g, int cutoff, Twist delta) {
  ModeFunction f;
  f.geom = g;
  f.modes = {g.dim, cutoff};
  f.delta = delta;
  f.coeffs.assign(f.modes.size(), cplx(0.0, 0.0));
  return f;
}

cplx ModeFunction::at(const Mode& k) const {
  int i = modes.index(k);
  return i < 0 ? cplx(0.0, 0.0) : coeffs[i];
}

int ModeFunction::degree(double tol) const {
  int d = 0;
  for (int i = 0; i < modes.size(); ++i)
    if (std::abs(coeffs[i]) > tol) d = std::max(d, modes.sup_norm(i));
  return d;
}

namespace {

double to_double(const Rational& r) { return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator()); }

std::vector<double> frequencies(const ModeFunction& f) {
  std::vector<double> out;
  out.reserve(static_cast<size_t>(f.modes.size()) * f.geom.dim);
  for (int i = 0; i < f.modes.size(); ++i) {
    Mode k = f.modes.mode(i);
    for (int d = 0; d < f.geom.dim; ++d)
      out.push_back((k[d] + to_double(f.delta[d])) * 2.0 * std::numbers::pi / f.geom.circumference[d]);
  }
  return out;
}

}  // namespace

cplx turn_phase(const Rational& t) {
  Rational q = t * Rational(4);
  if (q.denominator() == 1) {
    std::int64_t r = ((q.numerator() % 4) + 4) % 4;
    static const cplx quarter[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return quarter[r];
  }
  return std::polar(1.0, 2.0 * std::numbers::pi * to_double(t));
}

Eigen::MatrixXcd to_eigen(const ExactMatrix& m) {
  Eigen::MatrixXcd out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).to_complex();
  return out;
}

std::vector<double> grid_points(const FlatGeometry& g, std::array<int, 2> n) {
  std::vector<double> pts;
  if (g.dim == 1) {
    for (int i = 0; i < n[0]; ++i) pts.push_back(g.circumference[0] * i / n[0]);
  } else {
    for (int i = 0; i < n[0]; ++i)
      for (int j = 0; j < n[1]; ++j) {
        pts.push_back(g.circumference[0] * i / n[0]);
        pts.push_back(g.circumference[1] * j / n[1]);
      }
  }
  return pts;
}

std::vector<cplx> evaluate_at(const ModeFunction& f, const std::vector<double>& points) {
  return kernels::evaluate_modes(f.coeffs, frequencies(f), points, f.geom.dim);
}

namespace {

// exp(i xi_d x_j) for the modes and grid of one axis: table[k][j].
std::vector<std::vector<cplx>> axis_table(const ModeFunction& f, int d, int n) {
  std::vector<std::vector<cplx>> t(f.modes.width(), std::vector<cplx>(n));
  for (int k = -f.modes.cutoff; k <= f.modes.cutoff; ++k) {
    const double xi = (k + to_double(f.delta[d])) * 2.0 * std::numbers::pi / f.geom.circumference[d];
    for (int j = 0; j < n; ++j) t[k + f.modes.cutoff][j] = std::polar(1.0, xi * f.geom.circumference[d] * j / n);
  }
  return t;
}

}  // namespace

std::vector<cplx> evaluate(const ModeFunction& f, std::array<int, 2> n) {
  if (f.geom.dim == 1) return evaluate_at(f, grid_points(f.geom, n));
  // Separable: sum over k2 first, then k1.
  const int w = f.modes.width();
  auto t1 = axis_table(f, 0, n[0]);
  auto t2 = axis_table(f, 1, n[1]);
  std::vector<cplx> partial(static_cast<size_t>(w) * n[1], cplx(0.0, 0.0));
  for (int a = 0; a < w; ++a)
    for (int b = 0; b < w; ++b) {
      const cplx c = f.coeffs[a * w + b];
      if (c == cplx(0.0, 0.0)) continue;
      for (int j = 0; j < n[1]; ++j) partial[static_cast<size_t>(a) * n[1] + j] += c * t2[b][j];
    }
  std::vector<cplx> out(static_cast<size_t>(n[0]) * n[1], cplx(0.0, 0.0));
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n[0]; ++i)
    for (int a = 0; a < w; ++a)
      for (int j = 0; j < n[1]; ++j)
        out[static_cast<size_t>(i) * n[1] + j] += t1[a][i] * partial[static_cast<size_t>(a) * n[1] + j];
  return out;
}

ModeFunction from_grid(const FlatGeometry& g, std::array<int, 2> n, const std::vector<cplx>& values, int cutoff,
                       Twist delta) {
  const int axes = g.dim;
  for (int d = 0; d < axes; ++d)
    if (n[d] < 2 * cutoff + 1) throw Error("grid too coarse for the requested band");
  ModeFunction f = ModeFunction::zero(g, cutoff, delta);
  if (axes == 2) {
    const int w = f.modes.width();
    auto t1 = axis_table(f, 0, n[0]);
    auto t2 = axis_table(f, 1, n[1]);
    std::vector<cplx> partial(static_cast<size_t>(n[0]) * w, cplx(0.0, 0.0));
    for (int i = 0; i < n[0]; ++i)
      for (int b = 0; b < w; ++b) {
        cplx acc(0.0, 0.0);
        for (int j = 0; j < n[1]; ++j) acc += values[static_cast<size_t>(i) * n[1] + j] * std::conj(t2[b][j]);
        partial[static_cast<size_t>(i) * w + b] = acc;
      }
    const double norm = static_cast<double>(n[0]) * n[1];
    for (int a = 0; a < w; ++a)
      for (int b = 0; b < w; ++b) {
        cplx acc(0.0, 0.0);
        for (int i = 0; i < n[0]; ++i) acc += partial[static_cast<size_t>(i) * w + b] * std::conj(t1[a][i]);
        f.coeffs[a * w + b] = acc / norm;
      }
    return f;
  }
  std::vector<double> pts = grid_points(g, n);
  const size_t npts = values.size();
  const double norm = axes == 1 ? n[0] : static_cast<double>(n[0]) * n[1];
  std::vector<double> freqs = frequencies(f);
  for (int m = 0; m < f.modes.size(); ++m) {
    cplx acc(0.0, 0.0);
    for (size_t p = 0; p < npts; ++p) {
      double phase = 0.0;
      for (int d = 0; d < axes; ++d) phase += freqs[m * axes + d] * pts[p * axes + d];
      acc += values[p] * std::polar(1.0, -phase);
    }
    f.coeffs[m] = acc / norm;
  }
  return f;
}

ModeFunction multiply(const ModeFunction& a, const ModeFunction& b, int cutoff) {
  ModeFunction out = ModeFunction::zero(a.geom, cutoff, {a.delta[0] + b.delta[0], a.delta[1] + b.delta[1]});
  for (int i = 0; i < a.modes.size(); ++i) {
    if (a.coeffs[i] == cplx(0.0, 0.0)) continue;
    Mode ka = a.modes.mode(i);
    for (int j = 0; j < b.modes.size(); ++j) {
      Mode kb = b.modes.mode(j);
      int t = out.modes.index({ka[0] + kb[0], ka[1] + kb[1]});
      if (t >= 0) out.coeffs[t] += a.coeffs[i] * b.coeffs[j];
    }
  }
  return out;
}

ModeFunction conjugate(const ModeFunction& f) {
  ModeFunction out = ModeFunction::zero(f.geom, f.modes.cutoff, {-f.delta[0], -f.delta[1]});
  for (int i = 0; i < f.modes.size(); ++i) {
    Mode k = f.modes.mode(i);
    out.at({-k[0], -k[1]}) = std::conj(f.coeffs[i]);
  }
  return out;
}

ModeFunction compose(const ModeFunction& f, const Isometry& iso) {
  // f(sign x + shift L) = sum c_k exp(2 pi i <k + delta, shift>) exp(i sign (k + delta) . 2 pi x / L)
  const Rational sg(iso.sign);
  ModeFunction out = ModeFunction::zero(f.geom, f.modes.cutoff, {sg * f.delta[0], sg * f.delta[1]});
  for (int i = 0; i < f.modes.size(); ++i) {
    Mode k = f.modes.mode(i);
    Rational turn(0);
    for (int d = 0; d < f.geom.dim; ++d) turn += (Rational(k[d]) + f.delta[d]) * iso.shift[d];
    out.at({iso.sign * k[0], iso.sign * k[1]}) = f.coeffs[i] * turn_phase(turn);
  }
  return out;
}

ModeFunction scaled(const ModeFunction& f, cplx s) {
  ModeFunction out = f;
  for (auto& c : out.coeffs) c *= s;
  return out;
}

ModeFunction add(const ModeFunction& a, const ModeFunction& b) {
  if (a.delta != b.delta) throw Error("cannot add functions with different twists");
  ModeFunction out = ModeFunction::zero(a.geom, std::max(a.modes.cutoff, b.modes.cutoff), a.delta);
  for (int i = 0; i < out.modes.size(); ++i) {
    Mode k = out.modes.mode(i);
    out.coeffs[i] = a.at(k) + b.at(k);
  }
  return out;
}

ModeFunction derivative(const ModeFunction& f, int d) {
  ModeFunction out = f;
  for (int i = 0; i < f.modes.size(); ++i) {
    double w = (f.modes.mode(i)[d] + to_double(f.delta[d])) * 2.0 * std::numbers::pi / f.geom.circumference[d];
    out.coeffs[i] = f.coeffs[i] * cplx(0.0, w);
  }
  return out;
}

double max_abs_diff(const ModeFunction& a, const ModeFunction& b) {
  int cut = std::max(a.modes.cutoff, b.modes.cutoff);
  ModeSet big{a.geom.dim, cut};
  double m = 0.0;
  for (int i = 0; i < big.size(); ++i) {
    Mode k = big.mode(i);
    m = std::max(m, std::abs(a.at(k) - b.at(k)));
  }
  return m;
}

SparseC multiplication_operator(const ModeFunction& f, const ModeSet& modes, int spin_dim) {
  std::vector<Eigen::Triplet<cplx>> trips;
  for (int j = 0; j < modes.size(); ++j) {
    Mode kj = modes.mode(j);
    for (int l = 0; l < f.modes.size(); ++l) {
      if (f.coeffs[l] == cplx(0.0, 0.0)) continue;
      Mode kl = f.modes.mode(l);
      int i = modes.index({kj[0] + kl[0], kj[1] + kl[1]});
      if (i < 0) continue;
      for (int c = 0; c < spin_dim; ++c) trips.emplace_back(i * spin_dim + c, j * spin_dim + c, f.coeffs[l]);
    }
  }
  SparseC m(modes.size() * spin_dim, modes.size() * spin_dim);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

std::vector<int> interior_indices(const ModeSet& modes, int spin_dim, int buffer) {
  std::vector<int> out;
  for (int i = 0; i < modes.size(); ++i)
    if (modes.sup_norm(i) <= modes.cutoff - buffer)
      for (int c = 0; c < spin_dim; ++c) out.push_back(i * spin_dim + c);
  return out;
}

Eigen::MatrixXcd restrict_dense(const SparseC& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  std::vector<int> col_pos(m.cols(), -1), row_pos(m.rows(), -1);
  for (size_t j = 0; j < cols.size(); ++j) col_pos[cols[j]] = static_cast<int>(j);
  for (size_t i = 0; i < rows.size(); ++i) row_pos[rows[i]] = static_cast<int>(i);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rows.size(), cols.size());
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseC::InnerIterator it(m, k); it; ++it) {
      int r = row_pos[it.row()], c = col_pos[it.col()];
      if (r >= 0 && c >= 0) out(r, c) = it.value();
    }
  return out;
}

double operator_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.adjoint() * m, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double frobenius(const SparseC& m) {
  double s = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseC::InnerIterator it(m, k); it; ++it) s += std::norm(it.value());
  return std::sqrt(s);
}

}  // namespace orbi
