#include "orbi/convolution.hpp"

#include <algorithm>
#include <map>

namespace orbi {

ArrowFunction arrow_delta(const FiniteGroupoid& g, int arrow, const GaussRat& value) {
  ArrowFunction f(g.num_arrows());
  f[arrow] = value;
  return f;
}

ArrowFunction convolution_unit(const FiniteGroupoid& g) {
  ArrowFunction f(g.num_arrows());
  for (int x = 0; x < g.num_objects(); ++x) f[g.unit(x)] = GaussRat(1);
  return f;
}

ArrowFunction convolve(const FiniteGroupoid& g, const ArrowFunction& f1, const ArrowFunction& f2) {
  if (static_cast<int>(f1.size()) != g.num_arrows() || static_cast<int>(f2.size()) != g.num_arrows())
    throw Error("convolution factors do not live on this groupoid");
  ArrowFunction out(g.num_arrows());
  for (int tau = 0; tau < g.num_arrows(); ++tau) {
    if (f1[tau].is_zero()) continue;
    for (int kappa : g.into(g.source(tau))) {
      if (f2[kappa].is_zero()) continue;
      const int sigma = g.compose(tau, kappa);
      if (sigma < 0) throw Error("composition table is missing " + g.arrow_label(tau) + " o " + g.arrow_label(kappa));
      out[sigma] += f1[tau] * f2[kappa];
    }
  }
  return out;
}

FiniteValues act(const ReconstructedBundle& b, const ArrowFunction& f, const FiniteValues& psi) {
  const auto& g = b.base;
  const int k = b.rank;
  if (static_cast<int>(f.size()) != g.num_arrows()) throw Error("arrow function does not live on the bundle base");
  FiniteValues out(psi.size());
  for (int x = 0; x < g.num_objects(); ++x)
    for (int sigma : g.into(x)) {
      if (f[sigma].is_zero()) continue;
      const int s = g.source(sigma);
      for (int i = 0; i < k; ++i) {
        GaussRat v;
        for (int j = 0; j < k; ++j) v += b.action[sigma](i, j) * psi[s * k + j];
        out[x * k + i] += f[sigma] * v;
      }
    }
  return out;
}

Generator element_generator(const ActionGroupoid& g, const std::string& name, int element, const ModeFunction& f) {
  Generator gen;
  gen.name = name;
  for (int a = 0; a < g.group.order(); ++a)
    gen.parts.push_back(a == element ? f : ModeFunction::zero(f.geom, f.modes.cutoff));
  return gen;
}

Generator convolution_unit(const ActionGroupoid& g, const FlatGeometry& geom, int cutoff) {
  ModeFunction one = ModeFunction::zero(geom, cutoff);
  one.at({0, 0}) = 1.0;
  return element_generator(g, "unit", g.group.identity(), one);
}

Generator convolve(const ActionGroupoid& g, const Generator& f1, const Generator& f2, int cutoff) {
  const int n = g.group.order();
  if (static_cast<int>(f1.parts.size()) != n || static_cast<int>(f2.parts.size()) != n)
    throw Error("convolution factors do not live on this groupoid");
  Generator out;
  out.name = f1.name + "*" + f2.name;
  for (int c = 0; c < n; ++c) out.parts.push_back(ModeFunction::zero(f1.parts[0].geom, cutoff));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const ModeFunction moved = compose(f1.parts[a], g.isometries[b]);
      const int c = g.group.mul(a, b);
      out.parts[c] = add(out.parts[c], multiply(moved, f2.parts[b], cutoff));
    }
  return out;
}

Eigen::VectorXcd act(const DiracSpec& spec, const Generator& f, const Eigen::VectorXcd& psi) {
  const ModeSet modes = spec.modes();
  const int s = spec.spin_dim();
  int deg = 0;
  for (int i = 0; i < psi.size(); ++i)
    if (psi(i) != cplx(0.0, 0.0)) deg = std::max(deg, modes.sup_norm(i / s));
  if (f.degree() + deg > spec.cutoff)
    throw Error("band limit overflow: degree " + std::to_string(f.degree()) + " + " + std::to_string(deg) +
                " exceeds cutoff " + std::to_string(spec.cutoff));
  return represent(spec, f) * psi;
}

double representation_defect(const DiracSpec& spec, const Generator& f1, const Generator& f2, int buffer) {
  const Generator prod = convolve(spec.groupoid, f1, f2, 2 * spec.cutoff);
  const SparseC lhs = represent(spec, prod);
  const SparseC rhs = represent(spec, f1) * represent(spec, f2);
  const auto band = interior_indices(spec.modes(), spec.spin_dim(), buffer);
  const Eigen::MatrixXcd diff = restrict_dense(SparseC(lhs - rhs), band, band);
  return diff.size() == 0 ? 0.0 : diff.cwiseAbs().maxCoeff();
}

namespace {

std::optional<GaussRat> exact_phase(const Rational& turn) {
  const Rational q = turn * Rational(4);
  if (q.denominator() != 1) return std::nullopt;
  static const GaussRat quarter[4] = {GaussRat(1), GaussRat::i(), GaussRat(-1), -GaussRat::i()};
  return quarter[((q.numerator() % 4) + 4) % 4];
}

// Linear map given column by column as sparse (row -> value) maps.
struct ColumnMap {
  std::vector<std::string> labels;
  std::vector<std::map<long, GaussRat>> exact;
  std::vector<std::map<long, cplx>> numeric;
  bool is_exact = true;
};

void two_term_witness(const ColumnMap& m, FaithfulnessResult& out) {
  const int n = static_cast<int>(m.labels.size());
  for (int a = 0; a < n && !out.witness; ++a)
    for (int b = a + 1; b < n; ++b) {
      bool same;
      if (m.is_exact) {
        same = m.exact[a] == m.exact[b];
      } else {
        same = m.numeric[a].size() == m.numeric[b].size();
        for (auto ia = m.numeric[a].begin(), ib = m.numeric[b].begin(); same && ia != m.numeric[a].end(); ++ia, ++ib)
          same = ia->first == ib->first && std::abs(ia->second - ib->second) <= 1e-12;
      }
      if (same) {
        std::vector<GaussRat> w(n);
        w[b] = GaussRat(1);
        w[a] = GaussRat(-1);
        out.witness = w;
        out.witness_text = "delta" + m.labels[b] + " - delta" + m.labels[a];
        break;
      }
    }
}

void solve_kernel(const ColumnMap& m, FaithfulnessResult& out) {
  const int n = static_cast<int>(m.labels.size());
  out.coordinates = m.labels;
  out.exact = m.is_exact;
  std::map<long, int> row_of;
  auto index_rows = [&](const auto& cols) {
    for (const auto& c : cols)
      for (const auto& [r, v] : c) row_of.emplace(r, 0);
    int i = 0;
    for (auto& [r, idx] : row_of) idx = i++;
  };
  if (m.is_exact) {
    index_rows(m.exact);
    ExactMatrix a(static_cast<int>(row_of.size()), n);
    for (int c = 0; c < n; ++c)
      for (const auto& [r, v] : m.exact[c]) a(row_of[r], c) = v;
    const ExactMatrix ker = a.nullspace();
    out.kernel_dimension = ker.cols();
    for (int j = 0; j < ker.cols(); ++j) {
      std::vector<GaussRat> v(n);
      for (int i = 0; i < n; ++i) v[i] = ker(i, j);
      out.kernel.push_back(std::move(v));
    }
  } else {
    index_rows(m.numeric);
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(row_of.size()), n);
    for (int c = 0; c < n; ++c)
      for (const auto& [r, v] : m.numeric[c]) a(row_of[r], c) = v;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(a);
    lu.setThreshold(1e-10);
    out.kernel_dimension = n - static_cast<int>(lu.rank());
  }
  out.faithful = out.kernel_dimension == 0;
  if (!out.faithful) {
    two_term_witness(m, out);
    if (!out.witness && !out.kernel.empty()) {
      out.witness = out.kernel.front();
      out.witness_text = "first kernel basis vector";
    }
  }
}

}  // namespace

FaithfulnessResult faithfulness_probe(const ReconstructedBundle& b) {
  const auto& g = b.base;
  const int k = b.rank;
  const long width = static_cast<long>(g.num_objects()) * k;
  ColumnMap m;
  for (int sigma = 0; sigma < g.num_arrows(); ++sigma) {
    m.labels.push_back("(" + g.arrow_label(sigma) + ")");
    std::map<long, GaussRat> col;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (!b.action[sigma](i, j).is_zero())
          col[(g.target(sigma) * k + i) * width + g.source(sigma) * k + j] = b.action[sigma](i, j);
    m.exact.push_back(std::move(col));
  }
  FaithfulnessResult out;
  out.effective = is_effective(g).effective;
  solve_kernel(m, out);
  return out;
}

FaithfulnessResult faithfulness_probe(const ActionGroupoid& g, const FourierBundle& b, int band, int cutoff) {
  if (band > cutoff) throw Error("probe band exceeds the cutoff");
  const FlatGeometry geom = geometry_of(g.base);
  const int dim = geom.dim;
  const ModeSet modes{dim, cutoff};
  const ModeSet fmodes{dim, band};
  const int r = b.rank;
  const long width = static_cast<long>(modes.size()) * r;
  ColumnMap m;
  std::vector<std::map<long, cplx>> numeric;
  for (int a = 0; a < g.group.order(); ++a) {
    const Isometry& iso = g.isometries[a];
    for (int l = 0; l < fmodes.size(); ++l) {
      const Mode kl = fmodes.mode(l);
      m.labels.push_back("(" + std::to_string(a) + ", " + std::to_string(kl[0]) +
                         (dim == 2 ? ", " + std::to_string(kl[1]) : std::string()) + ")");
      std::map<long, GaussRat> col;
      std::map<long, cplx> ncol;
      for (int j = 0; j < modes.size(); ++j) {
        const Mode kj = modes.mode(j);
        const int mid = modes.index({kj[0] + kl[0], kj[1] + kl[1]});
        if (mid < 0) continue;
        const ModeImage im = mode_image(iso, dim, b.delta, modes.mode(mid));
        const int row_mode = modes.index(im.mode);
        if (row_mode < 0) continue;
        const auto ph = exact_phase(im.turn);
        if (!ph) m.is_exact = false;
        for (int c2 = 0; c2 < r; ++c2)
          for (int c = 0; c < r; ++c) {
            const GaussRat& rho = b.rho[a](c2, c);
            if (rho.is_zero()) continue;
            const long key = (row_mode * r + c2) * width + j * r + c;
            if (ph) col[key] = rho * *ph;
            ncol[key] = rho.to_complex() * turn_phase(im.turn);
          }
      }
      m.exact.push_back(std::move(col));
      numeric.push_back(std::move(ncol));
    }
  }
  if (!m.is_exact) m.numeric = std::move(numeric);
  FaithfulnessResult out;
  out.effective = is_effective(g).effective;
  solve_kernel(m, out);
  return out;
}

SpectralTripleReport convolution_triple_report(const DiracSpec& spec, const std::vector<Generator>& generators,
                                               int buffer) {
  SpectralTripleReport rep = check_spectral_triple(spec, generators, buffer);
  const auto eff = is_effective(spec.groupoid);
  if (!eff.effective) rep.notes.push_back("representation not faithful: " + eff.witness_text);
  return rep;
}

}  // namespace orbi
