#include "orbi/cocycle.hpp"

#include <algorithm>
#include <map>

namespace orbi {

ValidationReport validate_cocycle(const Cocycle& g) {
  const auto& G = g.groupoid;
  if (static_cast<int>(g.entries.size()) != G.num_arrows()) throw Error("cocycle needs one entry per arrow");
  for (int a = 0; a < G.num_arrows(); ++a)
    if (g.entries[a].rows() != g.rank || g.entries[a].cols() != g.rank)
      throw Error("entry for " + G.arrow_label(a) + " does not have rank " + std::to_string(g.rank));
  ValidationReport rep;
  for (int x = 0; x < G.num_objects(); ++x)
    if (!g.entries[G.unit(x)].is_identity()) rep.add("unit", "entry at unit " + G.arrow_label(G.unit(x)));
  for (int a = 0; a < G.num_arrows(); ++a) {
    if (!g.entries[a].inverse()) rep.add("invertible", "entry at " + G.arrow_label(a) + " is singular");
    for (int b : G.out_of(G.target(a))) {
      const int c = G.compose(b, a);
      if (c < 0 || g.entries[b] * g.entries[a] != g.entries[c])
        rep.add("cocycle", "(" + G.arrow_label(b) + ", " + G.arrow_label(a) + ")");
    }
  }
  return rep;
}

Cocycle constant_cocycle(const FiniteGroupoid& g, int rank) {
  return {g, rank, std::vector<ExactMatrix>(g.num_arrows(), ExactMatrix::identity(rank))};
}

Cocycle character_cocycle(const FiniteGroupoid& g, const std::vector<GaussRat>& chi) {
  if (g.action_group_order() == 0) throw Error("character cocycles need an action groupoid presentation");
  if (static_cast<int>(chi.size()) != g.action_group_order()) throw Error("one character value per group element");
  Cocycle c{g, 1, {}};
  for (int a = 0; a < g.num_arrows(); ++a) c.entries.push_back(ExactMatrix::scalar(1, chi[g.action_element(a)]));
  return c;
}

Cocycle permutation_cocycle_z2(const FiniteGroupoid& z2) {
  if (z2.num_objects() != 1 || z2.num_arrows() != 2) throw Error("expects Z2 => *");
  const int e = z2.unit(0);
  Cocycle c{z2, 2, std::vector<ExactMatrix>(2)};
  c.entries[e] = ExactMatrix::identity(2);
  c.entries[1 - e] = ExactMatrix::from_rows({{0, 1}, {1, 0}});
  return c;
}

Cocycle tangent_cocycle(const ActionGroupoid& g) {
  const FiniteGroupoid fin = g.to_finite();
  const int n = std::max(1, base_dimension(g.base));
  Cocycle c{fin, n, {}};
  for (int a = 0; a < fin.num_arrows(); ++a) {
    const int sign = is_fourier(g.base) ? g.isometries[fin.action_element(a)].sign : 1;
    c.entries.push_back(ExactMatrix::scalar(n, GaussRat(sign)));
  }
  return c;
}

Cocycle restrict_to_cech(const Cocycle& g, const CechGroupoid& cech) {
  Cocycle out{cech.groupoid, g.rank, {}};
  for (int a = 0; a < cech.groupoid.num_arrows(); ++a) out.entries.push_back(g.entries[cech.arrow_base[a]]);
  return out;
}

SectionFamily make_sections(const CechBitorsor& phi, const std::vector<int>& base_section,
                            const std::vector<int>& left_sheet_for) {
  const auto& Y = phi.right;
  SectionFamily beta;
  for (int o = 0; o < Y.groupoid.num_objects(); ++o) {
    const int i = Y.object_sheet[o];
    const int y = Y.object_base[o];
    const int q = base_section.at(y);
    if (phi.bitorsor.alpha.empty()) throw Error("empty bitorsor");
    const int e = phi.element(q, left_sheet_for.at(i), i);
    if (e < 0) throw Error("section image escapes the declared sheet at " + Y.groupoid.object_label(o));
    beta.point.push_back(e);
  }
  return beta;
}

Cocycle induce_cocycle(const Bitorsor& phi, const Cocycle& g, const SectionFamily& beta) {
  const auto& L = phi.left;
  const auto& R = phi.right;
  if (g.groupoid.num_arrows() != L.num_arrows() || g.groupoid.num_objects() != L.num_objects())
    throw Error("cocycle does not live on the left groupoid of the bitorsor");
  if (static_cast<int>(beta.point.size()) != R.num_objects()) throw Error("section family has the wrong size");
  for (int y = 0; y < R.num_objects(); ++y) {
    const int q = beta.point[y];
    if (q < 0 || q >= phi.size() || phi.alpha[q] != y)
      throw Error("section is not a section of alpha at " + R.object_label(y));
  }
  Cocycle out{R, g.rank, {}};
  for (int tau = 0; tau < R.num_arrows(); ++tau) {
    const int p = phi.act_right(beta.point[R.source(tau)], R.inverse(tau));
    const int goal = beta.point[R.target(tau)];
    int found = -1;
    if (p >= 0)
      for (int s : L.out_of(phi.rho[p]))
        if (phi.act_left(s, p) == goal) {
          found = s;
          break;
        }
    if (found < 0) throw Error("no transporting arrow for " + R.arrow_label(tau) + " (bitorsor invalid)");
    out.entries.push_back(g.entries[found]);
  }
  return out;
}

Cocycle induce_cocycle(const CechBitorsor& phi, const Cocycle& g, const SectionFamily& beta) {
  return induce_cocycle(phi.bitorsor, g, beta);
}

Cocycle twist(const Cocycle& g, const std::vector<ExactMatrix>& lambda) {
  const auto& G = g.groupoid;
  Cocycle out{G, g.rank, {}};
  for (int a = 0; a < G.num_arrows(); ++a) {
    auto inv = lambda[G.source(a)].inverse();
    if (!inv) throw Error("twist by a singular matrix");
    out.entries.push_back(lambda[G.target(a)] * g.entries[a] * *inv);
  }
  return out;
}

namespace {

// Solutions L of g2(s) L = L g1(s) for every isotropy arrow s, as k x k matrices.
std::vector<ExactMatrix> intertwiners(const Cocycle& g1, const Cocycle& g2, const std::vector<int>& loops) {
  const int k = g1.rank;
  const int unknowns = k * k;
  ExactMatrix eq(static_cast<int>(loops.size()) * unknowns, unknowns);
  int row = 0;
  for (int s : loops) {
    const auto& A = g2.entries[s];
    const auto& B = g1.entries[s];
    // (A L - L B)_{ij} = sum_m A_im L_mj - L_im B_mj
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j, ++row)
        for (int m = 0; m < k; ++m) {
          eq(row, m * k + j) += A(i, m);
          eq(row, i * k + m) -= B(m, j);
        }
  }
  const ExactMatrix basis = eq.nullspace();
  std::vector<ExactMatrix> out;
  for (int c = 0; c < basis.cols(); ++c) {
    ExactMatrix L(k, k);
    for (int u = 0; u < unknowns; ++u) L(u / k, u % k) = basis(u, c);
    out.push_back(L);
  }
  return out;
}

}  // namespace

CoboundaryResult cohomologous(const Cocycle& g1, const Cocycle& g2) {
  using S = CoboundaryResult::Status;
  const auto& G = g1.groupoid;
  if (g1.rank != g2.rank || G.num_arrows() != g2.groupoid.num_arrows() ||
      G.num_objects() != g2.groupoid.num_objects())
    throw Error("incompatible cocycle shapes");
  CoboundaryResult res;
  res.lambda.assign(G.num_objects(), ExactMatrix());
  const auto part = orbits(G);
  for (const auto& orbit : part.orbits) {
    const int x0 = orbit.front();
    const auto space = intertwiners(g1, g2, G.hom(x0, x0));
    if (space.empty()) {
      res.reason = "no intertwiner at " + G.object_label(x0);
      res.lambda.clear();
      return res;
    }
    // Candidates: basis vectors, then a few fixed integer combinations.
    std::vector<ExactMatrix> candidates = space;
    for (int w = 1; w <= 3 && space.size() > 1; ++w) {
      ExactMatrix sum = space[0];
      for (size_t j = 1; j < space.size(); ++j) sum = sum + space[j].scaled(GaussRat(static_cast<int64_t>(w * j + 1)));
      candidates.push_back(sum);
    }
    bool ok = false;
    for (const auto& L0 : candidates) {
      if (!L0.inverse()) continue;
      // Spread along arrows out of x0 (a spanning tree of the orbit).
      bool consistent = true;
      for (int a : G.out_of(x0)) {
        const int x = G.target(a);
        if (!res.lambda[x].rows() || x == x0) {
          res.lambda[x] = g2.entries[a] * L0 * *g1.entries[a].inverse();
        }
      }
      res.lambda[x0] = L0;
      for (int x : orbit)
        for (int a : G.out_of(x)) {
          auto inv = res.lambda[x].inverse();
          if (!inv || g2.entries[a] != res.lambda[G.target(a)] * g1.entries[a] * *inv) consistent = false;
        }
      if (consistent) {
        ok = true;
        break;
      }
      for (int x : orbit) res.lambda[x] = ExactMatrix();
    }
    if (!ok) {
      res.status = space.size() > 1 ? S::inconclusive : S::none;
      res.reason = space.size() > 1 ? "no invertible intertwiner among the tried combinations"
                                    : "intertwiners at " + G.object_label(x0) + " are singular";
      res.lambda.clear();
      return res;
    }
  }
  res.status = S::found;
  return res;
}

ReconstructedBundle reconstruct(const Cocycle& g, const CechGroupoid& cech) {
  const int nx = cech.base_objects;
  std::vector<int> sheet(nx, -1);
  for (int o = 0; o < cech.groupoid.num_objects(); ++o)
    if (sheet[cech.object_base[o]] < 0) sheet[cech.object_base[o]] = cech.object_sheet[o];
  // Base groupoid recovered from the Cech arrows between chosen sheets.
  std::vector<int> base_arrow_of;  // base arrow -> Cech arrow
  int max_base = -1;
  for (int a = 0; a < cech.groupoid.num_arrows(); ++a) max_base = std::max(max_base, cech.arrow_base[a]);
  base_arrow_of.assign(max_base + 1, -1);
  for (int a = 0; a < cech.groupoid.num_arrows(); ++a) {
    const int s = cech.groupoid.source(a);
    const int t = cech.groupoid.target(a);
    if (cech.object_sheet[s] == sheet[cech.object_base[s]] && cech.object_sheet[t] == sheet[cech.object_base[t]])
      base_arrow_of[cech.arrow_base[a]] = a;
  }
  ReconstructedBundle b;
  b.rank = g.rank;
  b.sheet = sheet;
  // Rebuild the base groupoid tables from the Cech data.
  std::vector<std::string> objects(nx), arrows(base_arrow_of.size());
  std::vector<int> src(base_arrow_of.size()), tgt(base_arrow_of.size()), inv(base_arrow_of.size()), unit(nx);
  const auto& C = cech.groupoid;
  for (size_t s = 0; s < base_arrow_of.size(); ++s) {
    const int a = base_arrow_of[s];
    if (a < 0) throw Error("Cech groupoid misses a base arrow");
    src[s] = cech.object_base[C.source(a)];
    tgt[s] = cech.object_base[C.target(a)];
    inv[s] = cech.arrow_base[C.inverse(a)];
    arrows[s] = C.arrow_label(a).substr(0, C.arrow_label(a).rfind('@'));
  }
  for (int o = 0; o < C.num_objects(); ++o) {
    const int x = cech.object_base[o];
    if (cech.object_sheet[o] == sheet[x]) {
      objects[x] = C.object_label(o).substr(0, C.object_label(o).rfind('@'));
      unit[x] = cech.arrow_base[C.unit(o)];
    }
  }
  b.base = FiniteGroupoid(objects, arrows, src, tgt, unit, inv);
  for (size_t s = 0; s < base_arrow_of.size(); ++s) {
    const int a = base_arrow_of[s];
    for (size_t r = 0; r < base_arrow_of.size(); ++r) {
      const int c = base_arrow_of[r];
      if (C.source(c) != C.target(a)) continue;
      b.base.set_compose(static_cast<int>(r), static_cast<int>(s), cech.arrow_base[C.compose(c, a)]);
    }
    b.action.push_back(g.entries[a]);
  }
  return b;
}

ReconstructedBundle bundle_from_cocycle(const Cocycle& g) {
  ReconstructedBundle b;
  b.base = g.groupoid;
  b.rank = g.rank;
  b.action = g.entries;
  b.sheet.assign(g.groupoid.num_objects(), 0);
  return b;
}

std::vector<int> fibre_representatives(const Bitorsor& phi) {
  std::vector<int> rep(phi.right.num_objects(), -1);
  for (int q = 0; q < phi.size(); ++q)
    if (rep[phi.alpha[q]] < 0) rep[phi.alpha[q]] = q;
  for (int y = 0; y < phi.right.num_objects(); ++y)
    if (rep[y] < 0) throw Error("alpha misses " + phi.right.object_label(y));
  return rep;
}

ReconstructedBundle induced_bundle(const Bitorsor& phi, const ReconstructedBundle& xi) {
  const auto& L = phi.left;
  const auto& R = phi.right;
  if (xi.base.num_arrows() != L.num_arrows() || xi.base.num_objects() != L.num_objects())
    throw Error("bundle base does not match the bitorsor");
  const auto rep = fibre_representatives(phi);
  ReconstructedBundle out;
  out.base = R;
  out.rank = xi.rank;
  out.sheet.assign(R.num_objects(), 0);
  // Fibre at y is {[rep(y), u]}.  [q, u] . tau^-1 = [q . tau^-1, u] and
  // [sigma . q', u] = [q', rho(sigma)^-1 u] give the matrix of tau.
  for (int tau = 0; tau < R.num_arrows(); ++tau) {
    const int moved = phi.act_right(rep[R.source(tau)], R.inverse(tau));
    const int base = rep[R.target(tau)];
    int sigma = -1;
    for (int s : L.out_of(phi.rho[base]))
      if (phi.act_left(s, base) == moved) sigma = s;
    if (sigma < 0) throw Error("left action is not transitive on the fibre over " + R.object_label(R.target(tau)));
    auto inv = xi.action[sigma].inverse();
    if (!inv) throw Error("bundle action is singular");
    out.action.push_back(*inv);
  }
  return out;
}

ExactMatrix invariant_sections(const ReconstructedBundle& b) {
  const auto& G = b.base;
  const int k = b.rank;
  ExactMatrix eq(G.num_arrows() * k, G.num_objects() * k);
  for (int a = 0; a < G.num_arrows(); ++a)
    for (int i = 0; i < k; ++i) {
      const int row = a * k + i;
      eq(row, G.target(a) * k + i) += GaussRat(1);
      for (int j = 0; j < k; ++j) eq(row, G.source(a) * k + j) -= b.action[a](i, j);
    }
  return eq.nullspace();
}

}  // namespace orbi
