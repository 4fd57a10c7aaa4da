#include "orbi/clifford.hpp"

#include <deque>
#include <sstream>

namespace orbi {

namespace {

ExactMatrix sigma_x() { return ExactMatrix::from_rows({{0, 1}, {1, 0}}); }
ExactMatrix sigma_y() { return ExactMatrix::from_rows({{0, -GaussRat::i()}, {GaussRat::i(), 0}}); }

Rational frac(const Rational& r) {
  std::int64_t fl = r.numerator() / r.denominator();
  if (r.numerator() < 0 && r.numerator() % r.denominator() != 0) --fl;
  return r - Rational(fl);
}

// exp(2 pi i t) when it is a fourth root of unity.
std::optional<GaussRat> root_of_unity(const Rational& t) {
  Rational q = frac(t) * Rational(4);
  if (q.denominator() != 1) return std::nullopt;
  switch (q.numerator()) {
    case 0: return GaussRat(1);
    case 1: return GaussRat::i();
    case 2: return GaussRat(-1);
    default: return -GaussRat::i();
  }
}

// r with a = r b, when it exists.
std::optional<GaussRat> proportional(const ExactMatrix& a, const ExactMatrix& b) {
  for (int i = 0; i < b.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j)
      if (!b(i, j).is_zero()) {
        GaussRat r = a(i, j) / b(i, j);
        if (a == b.scaled(r)) return r;
        return std::nullopt;
      }
  return std::nullopt;
}

std::string twist_str(const GaussRat& h) {
  if (h == GaussRat(1)) return "+1";
  if (h == GaussRat(-1)) return "-1";
  if (h == GaussRat::i()) return "+i";
  if (h == -GaussRat::i()) return "-i";
  return h.str();
}

}  // namespace

CliffordRep build_clifford(int n) {
  CliffordRep rep;
  rep.n = n;
  if (n == 1) {
    rep.gamma = {ExactMatrix::identity(1)};
  } else if (n == 2) {
    rep.gamma = {sigma_x(), sigma_y()};
    rep.chirality = (rep.gamma[0] * rep.gamma[1]).scaled(-GaussRat::i());
  } else {
    throw Error("unsupported Clifford dimension n=" + std::to_string(n) + " (catalog supports n in {1,2})");
  }
  ValidationReport r = validate_clifford(rep);
  if (!r.valid()) throw Error("Clifford relations fail: " + r.violations.front().detail);
  return rep;
}

ValidationReport validate_clifford(const CliffordRep& rep) {
  ValidationReport r;
  const int s = rep.spin_dim();
  for (int i = 0; i < rep.n; ++i) {
    if (rep.gamma[i].adjoint() != rep.gamma[i]) r.add("hermitian", "gamma^" + std::to_string(i + 1));
    for (int j = 0; j < rep.n; ++j) {
      ExactMatrix ac = rep.gamma[i] * rep.gamma[j] + rep.gamma[j] * rep.gamma[i];
      if (ac != ExactMatrix::scalar(s, GaussRat(i == j ? 2 : 0)))
        r.add("clifford", "{gamma^" + std::to_string(i + 1) + ", gamma^" + std::to_string(j + 1) + "}");
    }
  }
  if (rep.n == 2) {
    if (!rep.chirality) {
      r.add("chirality", "missing for even n");
    } else {
      const ExactMatrix& w = *rep.chirality;
      if (!(w * w).is_identity()) r.add("chirality", "omega^2 != 1");
      for (int i = 0; i < rep.n; ++i)
        if (!(w * rep.gamma[i] + rep.gamma[i] * w).is_zero())
          r.add("chirality", "omega does not anticommute with gamma^" + std::to_string(i + 1));
    }
  }
  return r;
}

ModeImage mode_image(const Isometry& iso, int dim, const Twist& delta, const Mode& k) {
  ModeImage out{{0, 0}, Rational(0)};
  for (int d = 0; d < dim; ++d) {
    Rational kd = Rational(k[d]) + delta[d];
    Rational image = Rational(iso.sign) * kd - delta[d];
    if (image.denominator() != 1) throw Error("negation requires an untwisted spin structure");
    out.mode[d] = static_cast<int>(image.numerator());
    out.turn -= Rational(iso.sign) * kd * iso.shift[d];
  }
  out.turn = frac(out.turn);
  return out;
}

ExactMatrix spin_part(const Isometry& iso, const CliffordRep& rep) {
  if (iso.sign == 1) return ExactMatrix::identity(rep.spin_dim());
  if (rep.n != 2) throw Error("orientation-reversing isometry has no spin lift in the catalog");
  return rep.gamma[0] * rep.gamma[1];
}

SpinLift untwisted_lift(const ActionGroupoid& g, const CliffordRep& rep, const Twist& delta) {
  SpinLift l;
  l.delta = delta;
  const int n = g.group.order();
  l.twist.assign(n, GaussRat(1));
  for (int a = 0; a < n; ++a) l.matrix.push_back(spin_part(g.isometries[a], rep));
  l.generators = generating_set(g.group);
  l.label = "untwisted";
  return l;
}

ValidationReport validate_spin_lift(const ActionGroupoid& g, const CliffordRep& rep, const SpinLift& lift) {
  ValidationReport r;
  const int dim = base_dimension(g.base);
  const int n = g.group.order();
  if (dim != rep.n) {
    r.add("dimension", "base dimension " + std::to_string(dim) + " vs Clifford n=" + std::to_string(rep.n));
    return r;
  }
  for (int a = 0; a < n; ++a) {
    const Isometry& iso = g.isometries[a];
    ExactMatrix expect = spin_part(iso, rep).scaled(lift.twist[a]);
    if (lift.matrix[a] != expect) r.add("matrix", "rho_s(" + std::to_string(a) + ") != h S");
    auto inv = lift.matrix[a].inverse();
    if (!inv || lift.matrix[a].adjoint() != *inv) {
      r.add("unitary", "rho_s(" + std::to_string(a) + ")");
      continue;
    }
    for (int d = 0; d < rep.n; ++d)
      if (lift.matrix[a] * rep.gamma[d] * *inv != rep.gamma[d].scaled(GaussRat(iso.sign)))
        r.add("adjoint", "Ad(rho_s(" + std::to_string(a) + ")) on gamma^" + std::to_string(d + 1));
  }
  if (!r.valid()) return r;
  // U_a U_b = U_ab on a window of modes (the phase defect is independent of k).
  const int w = 2;
  std::vector<Mode> window;
  for (int k1 = -w; k1 <= w; ++k1)
    for (int k2 = (dim == 2 ? -w : 0); k2 <= (dim == 2 ? w : 0); ++k2) window.push_back({k1, k2});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      int ab = g.group.mul(a, b);
      for (const Mode& k : window) {
        ModeImage ib = mode_image(g.isometries[b], dim, lift.delta, k);
        ModeImage ia = mode_image(g.isometries[a], dim, lift.delta, ib.mode);
        ModeImage iab = mode_image(g.isometries[ab], dim, lift.delta, k);
        std::ostringstream where;
        where << "U_" << a << " U_" << b << " != U_" << ab << " at mode (" << k[0];
        if (dim == 2) where << "," << k[1];
        where << ")";
        if (ia.mode != iab.mode) {
          r.add("cocycle", where.str());
          break;
        }
        auto phase = root_of_unity(iab.turn - ib.turn - ia.turn);
        if (!phase || lift.matrix[a] * lift.matrix[b] != lift.matrix[ab].scaled(*phase)) {
          r.add("cocycle", where.str());
          break;
        }
      }
    }
  return r;
}

std::vector<int> generating_set(const FiniteGroup& g) {
  const int n = g.order();
  const int e = g.identity();
  std::vector<int> gens;
  std::vector<char> in(n, 0);
  in[e] = 1;
  auto close = [&]() {
    std::deque<int> q;
    for (int a = 0; a < n; ++a)
      if (in[a]) q.push_back(a);
    while (!q.empty()) {
      int a = q.front();
      q.pop_front();
      for (int s : gens) {
        int b = g.mul(a, s);
        if (!in[b]) {
          in[b] = 1;
          q.push_back(b);
        }
      }
    }
  };
  for (int a = 0; a < n; ++a)
    if (!in[a]) {
      gens.push_back(a);
      close();
    }
  return gens;
}

std::vector<SpinLift> spin_lift_search(const ActionGroupoid& g, const CliffordRep& rep, const Twist& delta,
                                       bool fourth_roots) {
  const int dim = base_dimension(g.base);
  const int n = g.group.order();
  std::vector<GaussRat> values = {GaussRat(1), GaussRat(-1)};
  if (fourth_roots) {
    values.push_back(GaussRat::i());
    values.push_back(-GaussRat::i());
  }
  std::vector<int> gens = generating_set(g.group);
  std::vector<ExactMatrix> spin;
  for (int a = 0; a < n; ++a) spin.push_back(spin_part(g.isometries[a], rep));
  const int e = g.group.identity();
  const Mode zero{0, 0};

  std::vector<SpinLift> out;
  std::vector<int> choice(gens.size(), 0);
  while (true) {
    std::vector<std::optional<GaussRat>> h(n);
    h[e] = GaussRat(1);
    bool ok = true;
    std::deque<int> q{e};
    while (!q.empty() && ok) {
      int a = q.front();
      q.pop_front();
      for (size_t gi = 0; gi < gens.size() && ok; ++gi) {
        int s = gens[gi];
        int as = g.group.mul(a, s);
        if (h[as]) continue;
        ModeImage is = mode_image(g.isometries[s], dim, delta, zero);
        ModeImage ia = mode_image(g.isometries[a], dim, delta, is.mode);
        ModeImage ias = mode_image(g.isometries[as], dim, delta, zero);
        auto phase = root_of_unity(is.turn + ia.turn - ias.turn);
        auto ratio = proportional(spin[a] * spin[s], spin[as]);
        if (!phase || !ratio) {
          ok = false;
          break;
        }
        h[as] = *h[a] * values[choice[gi]] * *ratio * *phase;
        q.push_back(as);
      }
    }
    if (ok) {
      SpinLift l;
      l.delta = delta;
      l.generators = gens;
      for (int a = 0; a < n; ++a) {
        l.twist.push_back(*h[a]);
        l.matrix.push_back(spin[a].scaled(*h[a]));
      }
      std::ostringstream lab;
      for (size_t gi = 0; gi < gens.size(); ++gi)
        lab << (gi ? "," : "") << "h(" << gens[gi] << ")=" << twist_str(values[choice[gi]]);
      l.label = gens.empty() ? "trivial" : lab.str();
      if (validate_spin_lift(g, rep, l).valid()) out.push_back(std::move(l));
    }
    size_t pos = 0;
    while (pos < choice.size() && ++choice[pos] == static_cast<int>(values.size())) choice[pos++] = 0;
    if (pos == choice.size()) break;
  }
  return out;
}

}  // namespace orbi
