#include "orbi/morita.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

namespace orbi {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

bool same_groupoid(const FiniteGroupoid& a, const FiniteGroupoid& b) {
  if (a.num_objects() != b.num_objects() || a.num_arrows() != b.num_arrows()) return false;
  if (a.object_labels() != b.object_labels() || a.arrow_labels() != b.arrow_labels()) return false;
  for (int s = 0; s < a.num_arrows(); ++s)
    if (a.source(s) != b.source(s) || a.target(s) != b.target(s)) return false;
  return true;
}

std::string pt(const Bitorsor& h, int q) { return h.carrier[q]; }

}  // namespace

Bitorsor::Bitorsor(FiniteGroupoid l, FiniteGroupoid r, std::vector<std::string> c, std::vector<int> rh,
                   std::vector<int> al)
    : left(std::move(l)), right(std::move(r)), carrier(std::move(c)), rho(std::move(rh)), alpha(std::move(al)) {
  const int n = size();
  if (static_cast<int>(rho.size()) != n || static_cast<int>(alpha.size()) != n)
    throw Error("anchor maps must be defined on every carrier point");
  left_.resize(n);
  right_.resize(n);
  for (int q = 0; q < n; ++q) {
    if (rho[q] < 0 || rho[q] >= left.num_objects()) throw Error("rho(" + carrier[q] + ") is not an object");
    if (alpha[q] < 0 || alpha[q] >= right.num_objects()) throw Error("alpha(" + carrier[q] + ") is not an object");
    left_[q].assign(left.out_of(rho[q]).size(), -1);
    right_[q].assign(right.into(alpha[q]).size(), -1);
  }
}

int Bitorsor::act_left(int sigma, int q) const {
  if (left.source(sigma) != rho[q]) return -1;
  return left_[q][left.pos_in_source(sigma)];
}

int Bitorsor::act_right(int q, int tau) const {
  if (right.target(tau) != alpha[q]) return -1;
  return right_[q][right.pos_in_target(tau)];
}

void Bitorsor::set_left(int sigma, int q, int value) {
  if (left.source(sigma) != rho[q])
    throw Error("left action of " + left.arrow_label(sigma) + " on " + carrier[q] + " violates the anchor");
  if (value < 0 || value >= size()) throw Error("left action value out of range");
  left_[q][left.pos_in_source(sigma)] = value;
}

void Bitorsor::set_right(int q, int tau, int value) {
  if (right.target(tau) != alpha[q])
    throw Error("right action of " + right.arrow_label(tau) + " on " + carrier[q] + " violates the anchor");
  if (value < 0 || value >= size()) throw Error("right action value out of range");
  right_[q][right.pos_in_target(tau)] = value;
}

// ---------------------------------------------------------------------------

ValidationReport validate_generalized_hom(const Bitorsor& h, TorsorMode mode) {
  ValidationReport rep;
  const auto& L = h.left;
  const auto& R = h.right;
  const int n = h.size();
  bool anchors_ok = true;

  for (int q = 0; q < n; ++q) {
    for (int s : L.out_of(h.rho[q])) {
      const int v = h.act_left(s, q);
      if (v < 0) {
        rep.add("left-action", L.arrow_label(s) + " . " + pt(h, q) + " undefined");
        anchors_ok = false;
      } else if (h.rho[v] != L.target(s) || h.alpha[v] != h.alpha[q]) {
        rep.add("left-anchor", L.arrow_label(s) + " . " + pt(h, q) + " = " + pt(h, v) + " has wrong anchors");
        anchors_ok = false;
      }
    }
    for (int t : R.into(h.alpha[q])) {
      const int v = h.act_right(q, t);
      if (v < 0) {
        rep.add("right-action", pt(h, q) + " . " + R.arrow_label(t) + " undefined");
        anchors_ok = false;
      } else if (h.alpha[v] != R.source(t) || h.rho[v] != h.rho[q]) {
        rep.add("right-anchor", pt(h, q) + " . " + R.arrow_label(t) + " = " + pt(h, v) + " has wrong anchors");
        anchors_ok = false;
      }
    }
  }
  if (!anchors_ok) return rep;

  for (int q = 0; q < n; ++q) {
    if (h.act_left(L.unit(h.rho[q]), q) != q) rep.add("left-unit", "unit does not fix " + pt(h, q));
    if (h.act_right(q, R.unit(h.alpha[q])) != q) rep.add("right-unit", "unit does not fix " + pt(h, q));
    for (int s : L.out_of(h.rho[q])) {
      const int sq = h.act_left(s, q);
      for (int s2 : L.out_of(L.target(s))) {
        const int c = L.compose(s2, s);
        if (c < 0 || h.act_left(c, q) != h.act_left(s2, sq))
          rep.add("left-composition", "(" + L.arrow_label(s2) + " " + L.arrow_label(s) + ") . " + pt(h, q));
      }
      for (int t : R.into(h.alpha[q])) {
        if (h.act_right(sq, t) != h.act_left(s, h.act_right(q, t)))
          rep.add("commutation", "(" + L.arrow_label(s) + " . " + pt(h, q) + ") . " + R.arrow_label(t) + " != " +
                                     L.arrow_label(s) + " . (" + pt(h, q) + " . " + R.arrow_label(t) + ")");
      }
    }
    for (int t : R.into(h.alpha[q])) {
      const int qt = h.act_right(q, t);
      for (int t2 : R.into(R.source(t))) {
        const int c = R.compose(t, t2);
        if (c < 0 || h.act_right(q, c) != h.act_right(qt, t2))
          rep.add("right-composition", pt(h, q) + " . (" + R.arrow_label(t) + " " + R.arrow_label(t2) + ")");
      }
    }
  }

  // Right action free and transitive on rho-fibres.
  std::vector<std::vector<int>> rho_fibre(L.num_objects()), alpha_fibre(R.num_objects());
  for (int q = 0; q < n; ++q) {
    rho_fibre[h.rho[q]].push_back(q);
    alpha_fibre[h.alpha[q]].push_back(q);
  }
  for (int x = 0; x < L.num_objects(); ++x)
    if (rho_fibre[x].empty()) rep.add("rho-surjective", "no carrier point over " + L.object_label(x));
  for (int q = 0; q < n; ++q) {
    std::vector<int> img;
    for (int t : R.into(h.alpha[q])) img.push_back(h.act_right(q, t));
    std::sort(img.begin(), img.end());
    if (std::adjacent_find(img.begin(), img.end()) != img.end())
      rep.add("right-free", "two arrows of " + R.object_label(h.alpha[q]) + " act equally on " + pt(h, q));
    img.erase(std::unique(img.begin(), img.end()), img.end());
    if (img != rho_fibre[h.rho[q]])
      rep.add("right-transitive", "orbit of " + pt(h, q) + " is not its rho-fibre over " +
                                      L.object_label(h.rho[q]));
  }
  if (mode == TorsorMode::generalized) return rep;

  for (int y = 0; y < R.num_objects(); ++y)
    if (alpha_fibre[y].empty()) rep.add("alpha-surjective", "no carrier point over " + R.object_label(y));
  for (int q = 0; q < n; ++q) {
    std::vector<int> img;
    for (int s : L.out_of(h.rho[q])) img.push_back(h.act_left(s, q));
    std::sort(img.begin(), img.end());
    if (std::adjacent_find(img.begin(), img.end()) != img.end())
      rep.add("left-free", "two arrows out of " + L.object_label(h.rho[q]) + " act equally on " + pt(h, q));
    img.erase(std::unique(img.begin(), img.end()), img.end());
    if (img != alpha_fibre[h.alpha[q]])
      rep.add("left-transitive", "orbit of " + pt(h, q) + " is not its alpha-fibre over " +
                                     R.object_label(h.alpha[q]));
  }
  return rep;
}

// ---------------------------------------------------------------------------

Bitorsor identity_bitorsor(const FiniteGroupoid& g) {
  std::vector<int> rho(g.num_arrows()), alpha(g.num_arrows());
  for (int a = 0; a < g.num_arrows(); ++a) {
    rho[a] = g.target(a);
    alpha[a] = g.source(a);
  }
  Bitorsor h(g, g, g.arrow_labels(), rho, alpha);
  h.name = "id";
  for (int q = 0; q < g.num_arrows(); ++q) {
    for (int s : g.out_of(g.target(q))) h.set_left(s, q, g.compose(s, q));
    for (int t : g.into(g.source(q))) h.set_right(q, t, g.compose(q, t));
  }
  return h;
}

Bitorsor a2_bitorsor(int n) {
  if (n < 1) throw Error("bitorsor scale must be positive");
  const FiniteGroupoid left = group_as_groupoid(FiniteGroup::cyclic(2));
  const FiniteGroupoid right = cyclic_double_action(n).to_finite();
  const int m = 2 * n;
  std::vector<std::string> labels(m);
  std::vector<int> rho(m, 0), alpha(m);
  for (int q = 0; q < m; ++q) {
    labels[q] = std::to_string(q);
    alpha[q] = q % n;
  }
  Bitorsor h(left, right, labels, rho, alpha);
  h.name = "a2-" + std::to_string(n);
  for (int q = 0; q < m; ++q) {
    for (int g = 0; g < 2; ++g) h.set_left(left.action_arrow(g, 0), q, (q + g * n) % m);
    for (int t : right.into(alpha[q])) {
      const int a = right.action_element(t);
      h.set_right(q, t, ((q - a) % m + m) % m);
    }
  }
  return h;
}

Bitorsor inverse(const Bitorsor& h) {
  Bitorsor out(h.right, h.left, h.carrier, h.alpha, h.rho);
  out.name = h.name + "^-1";
  for (int q = 0; q < h.size(); ++q) {
    for (int t : h.right.out_of(h.alpha[q])) out.set_left(t, q, h.act_right(q, h.right.inverse(t)));
    for (int s : h.left.into(h.rho[q])) out.set_right(q, s, h.act_left(h.left.inverse(s), q));
  }
  return out;
}

Bitorsor compose_homs(const Bitorsor& h1, const Bitorsor& h2) {
  if (!same_groupoid(h1.right, h2.left)) throw Error("middle groupoids differ");
  const auto& M = h1.right;
  std::vector<std::pair<int, int>> pairs;
  std::unordered_map<long long, int> index;
  const long long n2 = h2.size();
  for (int q1 = 0; q1 < h1.size(); ++q1)
    for (int q2 = 0; q2 < h2.size(); ++q2)
      if (h1.alpha[q1] == h2.rho[q2]) {
        index[q1 * n2 + q2] = static_cast<int>(pairs.size());
        pairs.emplace_back(q1, q2);
      }
  UnionFind uf(static_cast<int>(pairs.size()));
  for (size_t p = 0; p < pairs.size(); ++p) {
    const auto [q1, q2] = pairs[p];
    for (int s : M.into(h1.alpha[q1])) {
      const int a = h1.act_right(q1, s);
      const int b = h2.act_left(M.inverse(s), q2);
      if (a < 0 || b < 0) throw Error("composition needs valid generalized homomorphisms");
      uf.unite(static_cast<int>(p), index.at(a * n2 + b));
    }
  }
  std::map<int, int> class_of_root;
  std::vector<int> class_of(pairs.size());
  std::vector<std::string> labels;
  std::vector<int> rho, alpha, rep;
  for (size_t p = 0; p < pairs.size(); ++p) {
    const int r = uf.find(static_cast<int>(p));
    auto [it, inserted] = class_of_root.emplace(r, static_cast<int>(labels.size()));
    if (inserted) {
      labels.push_back("[" + h1.carrier[pairs[p].first] + "|" + h2.carrier[pairs[p].second] + "]");
      rho.push_back(h1.rho[pairs[p].first]);
      alpha.push_back(h2.alpha[pairs[p].second]);
      rep.push_back(static_cast<int>(p));
    }
    class_of[p] = it->second;
  }
  Bitorsor out(h1.left, h2.right, labels, rho, alpha);
  out.name = h1.name + "*" + h2.name;
  for (int c = 0; c < out.size(); ++c) {
    const auto [q1, q2] = pairs[rep[c]];
    for (int s : h1.left.out_of(h1.rho[q1])) out.set_left(s, c, class_of[index.at(h1.act_left(s, q1) * n2 + q2)]);
    for (int t : h2.right.into(h2.alpha[q2])) out.set_right(c, t, class_of[index.at(q1 * n2 + h2.act_right(q2, t))]);
  }
  return out;
}

Bitorsor relabel_carrier(const Bitorsor& h, const std::vector<int>& perm) {
  const int n = h.size();
  if (static_cast<int>(perm.size()) != n) throw Error("relabeling must be a permutation of the carrier");
  std::vector<int> inv(n, -1);
  for (int p = 0; p < n; ++p) {
    if (perm[p] < 0 || perm[p] >= n || inv[perm[p]] >= 0) throw Error("relabeling must be a permutation");
    inv[perm[p]] = p;
  }
  std::vector<std::string> labels(n);
  std::vector<int> rho(n), alpha(n);
  for (int p = 0; p < n; ++p) {
    labels[perm[p]] = h.carrier[p];
    rho[perm[p]] = h.rho[p];
    alpha[perm[p]] = h.alpha[p];
  }
  Bitorsor out(h.left, h.right, labels, rho, alpha);
  out.name = h.name;
  for (int p = 0; p < n; ++p) {
    for (int s : h.left.out_of(h.rho[p])) out.set_left(s, perm[p], perm[h.act_left(s, p)]);
    for (int t : h.right.into(h.alpha[p])) out.set_right(perm[p], t, perm[h.act_right(p, t)]);
  }
  return out;
}

std::vector<std::vector<int>> carrier_orbits(const Bitorsor& h) {
  UnionFind uf(h.size());
  for (int q = 0; q < h.size(); ++q) {
    for (int s : h.left.out_of(h.rho[q]))
      if (h.act_left(s, q) >= 0) uf.unite(q, h.act_left(s, q));
    for (int t : h.right.into(h.alpha[q]))
      if (h.act_right(q, t) >= 0) uf.unite(q, h.act_right(q, t));
  }
  std::map<int, std::vector<int>> cls;
  for (int q = 0; q < h.size(); ++q) cls[uf.find(q)].push_back(q);
  std::vector<std::vector<int>> out;
  for (auto& [r, v] : cls) out.push_back(std::move(v));
  return out;
}

// ---------------------------------------------------------------------------

TwoMorphismResult find_two_morphism(const Bitorsor& q1, const Bitorsor& q2, long node_cap) {
  using S = TwoMorphismResult::Status;
  TwoMorphismResult res;
  if (!same_groupoid(q1.left, q2.left) || !same_groupoid(q1.right, q2.right)) {
    res.reason = "endpoint groupoids differ";
    return res;
  }
  if (q1.size() != q2.size()) {
    res.reason = "carrier sizes differ";
    return res;
  }
  const auto orb1 = carrier_orbits(q1);
  const auto orb2 = carrier_orbits(q2);
  auto sizes = [](const std::vector<std::vector<int>>& o) {
    std::vector<size_t> s;
    for (const auto& v : o) s.push_back(v.size());
    std::sort(s.begin(), s.end());
    return s;
  };
  if (orb1.size() != orb2.size() || sizes(orb1) != sizes(orb2)) {
    res.reason = "orbit count mismatch";
    return res;
  }
  const int n = q1.size();
  std::vector<int> T(n, -1), used(n, 0);

  // Extends T from seed; records assigned points for undo. Returns false on conflict.
  auto propagate = [&](int seed, int image, std::vector<int>& trail) {
    std::vector<int> queue{seed};
    T[seed] = image;
    used[image] = 1;
    trail.push_back(seed);
    for (size_t k = 0; k < queue.size(); ++k) {
      const int p = queue[k];
      const int tp = T[p];
      auto visit = [&](int p2, int c2) {
        if (p2 < 0 || c2 < 0) return false;
        if (T[p2] >= 0) return T[p2] == c2;
        if (used[c2] || q1.rho[p2] != q2.rho[c2] || q1.alpha[p2] != q2.alpha[c2]) return false;
        T[p2] = c2;
        used[c2] = 1;
        trail.push_back(p2);
        queue.push_back(p2);
        return true;
      };
      for (int s : q1.left.out_of(q1.rho[p]))
        if (!visit(q1.act_left(s, p), q2.act_left(s, tp))) return false;
      for (int t : q1.right.into(q1.alpha[p]))
        if (!visit(q1.act_right(p, t), q2.act_right(tp, t))) return false;
    }
    return true;
  };

  bool capped = false;
  std::function<bool(size_t)> solve = [&](size_t k) -> bool {
    if (k == orb1.size()) return true;
    const int seed = orb1[k].front();
    for (int c = 0; c < n; ++c) {
      if (used[c] || q1.rho[seed] != q2.rho[c] || q1.alpha[seed] != q2.alpha[c]) continue;
      if (++res.nodes > node_cap) {
        capped = true;
        return false;
      }
      std::vector<int> trail;
      if (propagate(seed, c, trail) && solve(k + 1)) return true;
      if (capped) return false;
      for (int p : trail) {
        used[T[p]] = 0;
        T[p] = -1;
      }
    }
    return false;
  };
  if (solve(0)) {
    res.status = S::found;
    res.map = T;
  } else if (capped) {
    res.status = S::inconclusive;
    res.reason = "search exceeded the node cap";
  } else {
    res.reason = "no equivariant bijection";
  }
  return res;
}

// ---------------------------------------------------------------------------

int CechBitorsor::element(int q, int a, int i) const {
  return lookup[(static_cast<size_t>(q) * left.num_sheets + a) * right.num_sheets + i];
}

CechBitorsor localize_cech(const Bitorsor& phi, const CechCover& cover_x, const CechCover& cover_y) {
  CechBitorsor out;
  out.left = cech_groupoid(phi.left, cover_x);
  out.right = cech_groupoid(phi.right, cover_y);
  const int na = out.left.num_sheets;
  const int ni = out.right.num_sheets;
  out.lookup.assign(static_cast<size_t>(phi.size()) * na * ni, -1);
  std::vector<std::string> labels;
  std::vector<int> rho, alpha;
  for (int q = 0; q < phi.size(); ++q) {
    bool any = false;
    for (int a = 0; a < na; ++a) {
      const int xa = out.left.object_of(a, phi.rho[q]);
      if (xa < 0) continue;
      for (int i = 0; i < ni; ++i) {
        const int yi = out.right.object_of(i, phi.alpha[q]);
        if (yi < 0) continue;
        any = true;
        out.lookup[(static_cast<size_t>(q) * na + a) * ni + i] = static_cast<int>(labels.size());
        labels.push_back(phi.carrier[q] + "@" + std::to_string(a) + "," + std::to_string(i));
        rho.push_back(xa);
        alpha.push_back(yi);
        out.point.push_back(q);
        out.left_sheet.push_back(a);
        out.right_sheet.push_back(i);
      }
    }
    if (!any) throw Error("covers leave carrier point " + phi.carrier[q] + " without a sheet pair");
  }
  Bitorsor b(out.left.groupoid, out.right.groupoid, labels, rho, alpha);
  b.name = phi.name + "-cech";
  const auto& LG = out.left.groupoid;
  const auto& RG = out.right.groupoid;
  for (int e = 0; e < b.size(); ++e) {
    const int q = out.point[e];
    for (int s : LG.out_of(rho[e])) {
      // (a, b, sigma) sends q@b,i to (sigma q)@a,i
      const int v = phi.act_left(out.left.arrow_base[s], q);
      if (v < 0) continue;
      const int target = out.element(v, out.left.arrow_target_sheet[s], out.right_sheet[e]);
      if (target >= 0) b.set_left(s, e, target);
    }
    for (int t : RG.into(alpha[e])) {
      // (i, j, tau) sends q@a,i to (q tau)@a,j
      const int v = phi.act_right(q, out.right.arrow_base[t]);
      if (v < 0) continue;
      const int target = out.element(v, out.left_sheet[e], out.right.arrow_source_sheet[t]);
      if (target >= 0) b.set_right(e, t, target);
    }
  }
  out.bitorsor = std::move(b);
  return out;
}

CechBitorsor cech_bitorsor(const FiniteGroupoid& g, const CechCover& cover) {
  CechBitorsor out = localize_cech(identity_bitorsor(g), trivial_cover(g), cover);
  // The trivial localization of g has g's own indexing; use g itself on the left.
  Bitorsor b(g, out.bitorsor.right, out.bitorsor.carrier, out.bitorsor.rho, out.bitorsor.alpha);
  b.name = "cech";
  for (int e = 0; e < b.size(); ++e) {
    for (int s : g.out_of(b.rho[e])) b.set_left(s, e, out.bitorsor.act_left(s, e));
    for (int t : b.right.into(b.alpha[e])) b.set_right(e, t, out.bitorsor.act_right(e, t));
  }
  out.bitorsor = std::move(b);
  return out;
}

// ---------------------------------------------------------------------------

int LocalLift::apply(int q) const {
  auto it = std::find(domain.begin(), domain.end(), q);
  return it == domain.end() ? -1 : image[it - domain.begin()];
}

LocalLift lift_bisection(const Bitorsor& phi, int sigma, int q) {
  const auto& L = phi.left;
  if (phi.rho[q] != L.source(sigma)) throw Error("anchor mismatch: rho(q) != s(sigma)");
  LocalLift out;
  out.intertwines = true;
  if (L.action_group_order() > 0) {
    // Global bisection x -> (g, x) of the action groupoid.
    const int g = L.action_element(sigma);
    for (int p = 0; p < phi.size(); ++p) {
      const int arrow = L.action_arrow(g, phi.rho[p]);
      const int v = phi.act_left(arrow, p);
      out.domain.push_back(p);
      out.image.push_back(v);
      if (v < 0 || phi.rho[v] != L.target(arrow)) {
        out.intertwines = false;
        out.detail = "rho o lift != phi_sigma o rho at " + phi.carrier[p];
      }
    }
  } else {
    for (int p = 0; p < phi.size(); ++p) {
      if (phi.rho[p] != L.source(sigma)) continue;
      const int v = phi.act_left(sigma, p);
      out.domain.push_back(p);
      out.image.push_back(v);
      if (v < 0 || phi.rho[v] != L.target(sigma)) {
        out.intertwines = false;
        out.detail = "rho o lift != phi_sigma o rho at " + phi.carrier[p];
      }
    }
  }
  if (out.apply(q) != phi.act_left(sigma, q)) {
    out.intertwines = false;
    out.detail = "lift does not pass through sigma . q";
  }
  return out;
}

LocalLift lift_bisection_right(const Bitorsor& phi, int tau, int q) {
  const auto& R = phi.right;
  if (phi.alpha[q] != R.target(tau)) throw Error("anchor mismatch: alpha(q) != t(tau)");
  LocalLift out;
  out.intertwines = true;
  // For each point, the arrow of the bisection ending at its alpha-anchor, and phi_tau on Y.
  std::function<int(int)> arrow_into;
  std::function<int(int)> phi_tau;
  if (R.action_group_order() > 0) {
    const int g = R.action_element(tau);
    arrow_into = [&R, g](int y) {
      for (int t : R.into(y))
        if (R.action_element(t) == g) return t;
      return -1;
    };
    phi_tau = [&R, g](int y) { return R.target(R.action_arrow(g, y)); };
  } else {
    arrow_into = [&R, tau](int y) { return y == R.target(tau) ? tau : -1; };
    phi_tau = [&R, tau](int y) { return y == R.source(tau) ? R.target(tau) : -1; };
  }
  for (int p = 0; p < phi.size(); ++p) {
    const int t = arrow_into(phi.alpha[p]);
    if (t < 0) continue;
    out.domain.push_back(p);
    out.image.push_back(phi.act_right(p, t));
  }
  std::set<int> seen;
  for (size_t k = 0; k < out.domain.size(); ++k) {
    const int p = out.domain[k];
    const int v = out.image[k];
    if (v < 0 || !seen.insert(v).second) {
      out.intertwines = false;
      out.detail = "lift is not injective at " + phi.carrier[p];
      continue;
    }
    // alpha(lift^-1(v)) = phi_tau(alpha(v))
    if (phi_tau(phi.alpha[v]) != phi.alpha[p]) {
      out.intertwines = false;
      out.detail = "alpha o lift^-1 != phi_tau o alpha at " + phi.carrier[v];
    }
  }
  if (out.apply(q) != phi.act_right(q, tau)) {
    out.intertwines = false;
    out.detail = "lift does not pass through q . tau";
  }
  return out;
}

// ---------------------------------------------------------------------------

WeakEquivalencePair weak_equivalence_pair(const Bitorsor& phi) {
  if (!validate_generalized_hom(phi, TorsorMode::bitorsor).valid()) throw Error("torsor axioms fail");
  const auto& L = phi.left;
  const auto& R = phi.right;
  WeakEquivalencePair w;
  const int n = phi.size();
  // first arrow id per q, then row-major over (pos sigma, pos tau)
  std::vector<int> first(n + 1, 0);
  for (int q = 0; q < n; ++q)
    first[q + 1] = first[q] + static_cast<int>(L.out_of(phi.rho[q]).size() * R.into(phi.alpha[q]).size());
  auto id = [&](int sigma, int q, int tau) {
    return first[q] + L.pos_in_source(sigma) * static_cast<int>(R.into(phi.alpha[q]).size()) + R.pos_in_target(tau);
  };
  const int na = first[n];
  std::vector<std::string> labels(na);
  std::vector<int> src(na), tgt(na), inv(na), unit(n);
  w.arrow_sigma.resize(na);
  w.arrow_q.resize(na);
  w.arrow_tau.resize(na);
  for (int q = 0; q < n; ++q)
    for (int s : L.out_of(phi.rho[q]))
      for (int t : R.into(phi.alpha[q])) {
        const int a = id(s, q, t);
        const int target = phi.act_left(s, phi.act_right(q, t));
        labels[a] = "(" + L.arrow_label(s) + "," + phi.carrier[q] + "," + R.arrow_label(t) + ")";
        src[a] = q;
        tgt[a] = target;
        w.arrow_sigma[a] = s;
        w.arrow_q[a] = q;
        w.arrow_tau[a] = t;
      }
  for (int a = 0; a < na; ++a) inv[a] = id(L.inverse(w.arrow_sigma[a]), tgt[a], R.inverse(w.arrow_tau[a]));
  for (int q = 0; q < n; ++q) unit[q] = id(L.unit(phi.rho[q]), q, R.unit(phi.alpha[q]));
  std::vector<std::string> objects = phi.carrier;
  w.middle = FiniteGroupoid(objects, labels, src, tgt, unit, inv);
  for (int a = 0; a < na; ++a)
    for (int b : w.middle.out_of(tgt[a])) {
      const int s = L.compose(w.arrow_sigma[b], w.arrow_sigma[a]);
      const int t = R.compose(w.arrow_tau[a], w.arrow_tau[b]);
      w.middle.set_compose(b, a, id(s, src[a], t));
    }
  w.report = validate_groupoid(w.middle);

  w.theta_object = phi.rho;
  w.xi_object = phi.alpha;
  w.theta_arrow.resize(na);
  w.xi_arrow.resize(na);
  for (int a = 0; a < na; ++a) {
    w.theta_arrow[a] = w.arrow_sigma[a];
    w.xi_arrow[a] = R.inverse(w.arrow_tau[a]);
  }

  auto check = [&](const FiniteGroupoid& G, const std::vector<int>& fo, const std::vector<int>& fa, bool& surj,
                   bool& cart, bool& functor, const std::string& side) {
    std::vector<int> hit(G.num_objects(), 0);
    for (int q = 0; q < n; ++q) hit[fo[q]] = 1;
    surj = std::all_of(hit.begin(), hit.end(), [](int v) { return v == 1; });
    if (!surj) w.report.add(side + "-surjective", "object map misses an object");
    functor = true;
    for (int a = 0; a < na; ++a) {
      if (G.source(fa[a]) != fo[src[a]] || G.target(fa[a]) != fo[tgt[a]]) {
        functor = false;
        w.report.add(side + "-functor", "endpoints of " + labels[a]);
      }
      for (int b : w.middle.out_of(tgt[a]))
        if (fa[w.middle.compose(b, a)] != G.compose(fa[b], fa[a])) {
          functor = false;
          w.report.add(side + "-functor", "composition " + labels[b] + " o " + labels[a]);
        }
    }
    cart = true;
    for (int q = 0; q < n; ++q) {
      std::map<int, std::vector<int>> by_target;
      for (int a : w.middle.out_of(q)) by_target[tgt[a]].push_back(fa[a]);
      for (int q2 = 0; q2 < n; ++q2) {
        auto imgs = by_target[q2];
        std::sort(imgs.begin(), imgs.end());
        auto homs = G.hom(fo[q], fo[q2]);
        std::sort(homs.begin(), homs.end());
        if (imgs != homs) {
          cart = false;
          w.report.add(side + "-cartesian", "arrows " + phi.carrier[q] + " -> " + phi.carrier[q2] +
                                                " do not biject onto " + G.object_label(fo[q]) + " -> " +
                                                G.object_label(fo[q2]));
        }
      }
    }
  };
  check(L, w.theta_object, w.theta_arrow, w.left_surjective, w.left_cartesian, w.left_functor, "theta");
  check(R, w.xi_object, w.xi_arrow, w.right_surjective, w.right_cartesian, w.right_functor, "xi");
  return w;
}

// ---------------------------------------------------------------------------

bool FibrePartitionReport::consistent() const {
  if (blocks.empty()) return false;
  for (const auto& b : blocks)
    if (static_cast<int>(b.points.size()) != xi_isotropy_rank || !b.rho_constant ||
        b.theta_isotropy_rank != xi_isotropy_rank)
      return false;
  return true;
}

FibrePartitionReport fibre_partition_report(const Bitorsor& phi, int y) {
  if (y < 0 || y >= phi.right.num_objects()) throw Error("y is not an object");
  FibrePartitionReport rep;
  rep.y = y;
  for (int q = 0; q < phi.size(); ++q)
    if (phi.alpha[q] == y) rep.fibre.push_back(q);
  const auto iso = phi.right.hom(y, y);
  rep.xi_isotropy_rank = static_cast<int>(iso.size());
  std::vector<int> block_of(phi.size(), -1);
  for (int q : rep.fibre) {
    if (block_of[q] >= 0) continue;
    FibreBlock b;
    for (int t : iso) {
      const int v = phi.act_right(q, t);
      if (v >= 0 && block_of[v] < 0) {
        block_of[v] = static_cast<int>(rep.blocks.size());
        b.points.push_back(v);
      }
    }
    std::sort(b.points.begin(), b.points.end());
    b.rho_value = phi.rho[b.points.front()];
    b.rho_constant = std::all_of(b.points.begin(), b.points.end(), [&](int p) { return phi.rho[p] == b.rho_value; });
    b.theta_isotropy_rank = static_cast<int>(phi.left.hom(b.rho_value, b.rho_value).size());
    rep.blocks.push_back(std::move(b));
  }
  return rep;
}

Bitorsor covering_bitorsor(const ActionGroupoid& g) {
  const FiniteGroupoid fin = g.to_finite();
  for (int x = 0; x < fin.num_objects(); ++x)
    if (fin.hom(x, x).size() != 1) throw Error("covering bitorsor needs a free action");
  const auto part = orbits(fin);
  std::vector<int> orbit_of(fin.num_objects());
  std::vector<std::string> labels;
  for (int k = 0; k < part.count(); ++k) {
    labels.push_back("[" + fin.object_label(part.orbits[k].front()) + "]");
    for (int x : part.orbits[k]) orbit_of[x] = k;
  }
  const FiniteGroupoid down = unit_groupoid(labels);
  std::vector<int> rho(fin.num_objects());
  std::iota(rho.begin(), rho.end(), 0);
  Bitorsor h(fin, down, fin.object_labels(), rho, orbit_of);
  h.name = "covering";
  for (int q = 0; q < h.size(); ++q) {
    for (int s : fin.out_of(q)) h.set_left(s, q, fin.target(s));
    h.set_right(q, down.unit(orbit_of[q]), q);
  }
  return h;
}

}  // namespace orbi
