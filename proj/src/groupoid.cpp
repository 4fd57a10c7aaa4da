#include "orbi/groupoid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "orbi/kernels.hpp"

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

Rational mod1(Rational r) {
  const auto n = r.numerator();
  const auto d = r.denominator();
  auto q = n / d;
  if (n < 0 && q * d != n) --q;
  return r - Rational(q);
}

std::string point_label(const BaseSpace& base, int idx) {
  const int n = sample_grid_size(base);
  if (std::holds_alternative<FourierTorus>(base)) {
    return "(" + std::to_string(idx / n) + "," + std::to_string(idx % n) + ")";
  }
  return std::to_string(idx);
}

int grid_image(const BaseSpace& base, const Isometry& iso, int idx) {
  const int n = sample_grid_size(base);
  auto axis = [&](int i, const Rational& s) {
    const Rational shifted = s * Rational(n);
    if (shifted.denominator() != 1) throw Error("isometry does not preserve the sample grid");
    long long v = static_cast<long long>(iso.sign) * i + shifted.numerator();
    v %= n;
    if (v < 0) v += n;
    return static_cast<int>(v);
  };
  if (std::holds_alternative<FourierTorus>(base)) {
    return axis(idx / n, iso.shift[0]) * n + axis(idx % n, iso.shift[1]);
  }
  return axis(idx, iso.shift[0]);
}

int num_points(const ActionGroupoid& g) {
  if (const auto* fs = std::get_if<FiniteSet>(&g.base)) return static_cast<int>(fs->labels.size());
  const int n = sample_grid_size(g.base);
  return std::holds_alternative<FourierTorus>(g.base) ? n * n : n;
}

int act_point(const ActionGroupoid& g, int element, int point) {
  if (std::holds_alternative<FiniteSet>(g.base)) return g.permutations[element][point];
  return grid_image(g.base, g.isometries[element], point);
}

}  // namespace

int base_dimension(const BaseSpace& base) {
  if (std::holds_alternative<FiniteSet>(base)) return 0;
  if (std::holds_alternative<FourierCircle>(base)) return 1;
  return 2;
}

bool is_fourier(const BaseSpace& base) { return !std::holds_alternative<FiniteSet>(base); }

void check_base(const BaseSpace& base) {
  if (const auto* fs = std::get_if<FiniteSet>(&base)) {
    if (fs->labels.empty()) throw Error("FiniteSet needs at least one label");
    auto sorted = fs->labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw Error("FiniteSet labels must be distinct");
  } else if (const auto* c = std::get_if<FourierCircle>(&base)) {
    if (!(c->circumference > 0)) throw Error("circle circumference must be positive");
    if (c->mode_cutoff < 2) throw Error("mode cutoff must be at least 2");
  } else {
    const auto& t = std::get<FourierTorus>(base);
    if (!(t.circumferences[0] > 0 && t.circumferences[1] > 0)) throw Error("torus circumferences must be positive");
    if (t.mode_cutoff < 2) throw Error("mode cutoff must be at least 2");
  }
}

int sample_grid_size(const BaseSpace& base) {
  if (const auto* c = std::get_if<FourierCircle>(&base)) return 4 * c->mode_cutoff;
  if (const auto* t = std::get_if<FourierTorus>(&base)) return 4 * t->mode_cutoff;
  return static_cast<int>(std::get<FiniteSet>(base).labels.size());
}

bool ValidationReport::has(const std::string& kind) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; });
}

// ---------------------------------------------------------------------------
// FiniteGroup

int FiniteGroup::identity() const {
  for (int e = 0; e < order(); ++e) {
    bool ok = true;
    for (int a = 0; a < order() && ok; ++a) ok = mul(e, a) == a && mul(a, e) == a;
    if (ok) return e;
  }
  return -1;
}

int FiniteGroup::inverse(int a) const {
  const int e = identity();
  for (int b = 0; b < order(); ++b)
    if (mul(a, b) == e && mul(b, a) == e) return b;
  return -1;
}

FiniteGroup FiniteGroup::cyclic(int n) {
  FiniteGroup g;
  g.name = "Z" + std::to_string(n);
  g.table.assign(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) g.table[a][b] = (a + b) % n;
  return g;
}

FiniteGroup FiniteGroup::product(const FiniteGroup& left, const FiniteGroup& right) {
  FiniteGroup g;
  g.name = left.name + "x" + right.name;
  const int n = left.order() * right.order();
  g.table.assign(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      g.table[a][b] = left.mul(a / right.order(), b / right.order()) * right.order() +
                      right.mul(a % right.order(), b % right.order());
  return g;
}

// ---------------------------------------------------------------------------
// Isometry

Isometry Isometry::normalized() const {
  Isometry out = *this;
  for (auto& s : out.shift) s = mod1(s);
  return out;
}

Isometry Isometry::after(const Isometry& other) const {
  // this(other(v)) = sign * (other.sign * v + other.shift) + shift
  Isometry out;
  out.sign = sign * other.sign;
  for (int d = 0; d < 2; ++d) out.shift[d] = Rational(sign) * other.shift[d] + shift[d];
  return out.normalized();
}

Isometry Isometry::inverse() const {
  // v = sign * w + shift  =>  w = sign * v - sign * shift
  Isometry out;
  out.sign = sign;
  for (int d = 0; d < 2; ++d) out.shift[d] = -Rational(sign) * shift[d];
  return out.normalized();
}

bool Isometry::is_identity() const { return *this == Isometry{}; }

bool operator==(const Isometry& a, const Isometry& b) {
  const Isometry x = a.normalized();
  const Isometry y = b.normalized();
  return x.sign == y.sign && x.shift == y.shift;
}

std::string Isometry::str(int dim) const {
  std::ostringstream os;
  os << (sign < 0 ? "v -> -v" : "v -> v");
  const Isometry n = normalized();
  for (int d = 0; d < dim; ++d) {
    if (n.shift[d] != Rational(0)) os << " + " << n.shift[d].numerator() << "/" << n.shift[d].denominator() << " e" << d + 1;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// FiniteGroupoid

FiniteGroupoid::FiniteGroupoid(std::vector<std::string> objects, std::vector<std::string> arrows,
                               std::vector<int> source, std::vector<int> target, std::vector<int> unit,
                               std::vector<int> inverse)
    : objects_(std::move(objects)),
      arrows_(std::move(arrows)),
      source_(std::move(source)),
      target_(std::move(target)),
      unit_(std::move(unit)),
      inverse_(std::move(inverse)) {
  const int no = num_objects();
  const int na = num_arrows();
  if (static_cast<int>(source_.size()) != na || static_cast<int>(target_.size()) != na ||
      static_cast<int>(inverse_.size()) != na || static_cast<int>(unit_.size()) != no)
    throw Error("groupoid tables have inconsistent sizes");
  auto in_range = [](int v, int n) { return v >= 0 && v < n; };
  for (int a = 0; a < na; ++a) {
    if (!in_range(source_[a], no) || !in_range(target_[a], no) || !in_range(inverse_[a], na))
      throw Error("groupoid arrow " + arrows_[a] + " references an unknown object or arrow");
  }
  for (int x = 0; x < no; ++x)
    if (!in_range(unit_[x], na)) throw Error("unit of object " + objects_[x] + " is not an arrow");
  into_.assign(no, {});
  out_of_.assign(no, {});
  pos_in_target_.assign(na, -1);
  pos_in_source_.assign(na, -1);
  for (int a = 0; a < na; ++a) {
    pos_in_target_[a] = static_cast<int>(into_[target_[a]].size());
    pos_in_source_[a] = static_cast<int>(out_of_[source_[a]].size());
    into_[target_[a]].push_back(a);
    out_of_[source_[a]].push_back(a);
  }
  compose_.resize(na);
  for (int a = 0; a < na; ++a) compose_[a].assign(into_[source_[a]].size(), -1);
}

int FiniteGroupoid::object_index(const std::string& label) const {
  auto it = std::find(objects_.begin(), objects_.end(), label);
  if (it == objects_.end()) throw Error("unknown object '" + label + "'");
  return static_cast<int>(it - objects_.begin());
}

int FiniteGroupoid::arrow_index(const std::string& label) const {
  auto it = std::find(arrows_.begin(), arrows_.end(), label);
  if (it == arrows_.end()) throw Error("unknown arrow '" + label + "'");
  return static_cast<int>(it - arrows_.begin());
}

std::vector<int> FiniteGroupoid::hom(int x, int y) const {
  std::vector<int> out;
  for (int a : out_of_[x])
    if (target_[a] == y) out.push_back(a);
  return out;
}

int FiniteGroupoid::compose(int tau, int sigma) const {
  if (source_[tau] != target_[sigma]) return -1;
  return compose_[tau][pos_in_target_[sigma]];
}

void FiniteGroupoid::set_compose(int tau, int sigma, int result) {
  if (source_[tau] != target_[sigma])
    throw Error("arrows " + arrows_[tau] + " and " + arrows_[sigma] + " are not composable");
  compose_[tau][pos_in_target_[sigma]] = result;
}

FiniteGroupoid ActionGroupoid::to_finite() const {
  const int np = num_points(*this);
  const int ng = group.order();
  std::vector<std::string> objects(np);
  for (int p = 0; p < np; ++p) {
    if (const auto* fs = std::get_if<FiniteSet>(&base))
      objects[p] = fs->labels[p];
    else
      objects[p] = point_label(base, p);
  }
  std::vector<std::string> arrows(static_cast<size_t>(ng) * np);
  std::vector<int> src(arrows.size()), tgt(arrows.size()), inv(arrows.size()), unit(np);
  const int e = group.identity();
  for (int g = 0; g < ng; ++g)
    for (int p = 0; p < np; ++p) {
      const int a = g * np + p;
      arrows[a] = "(" + std::to_string(g) + "," + objects[p] + ")";
      src[a] = p;
      tgt[a] = act_point(*this, g, p);
    }
  for (int g = 0; g < ng; ++g)
    for (int p = 0; p < np; ++p) inv[g * np + p] = group.inverse(g) * np + tgt[g * np + p];
  for (int p = 0; p < np; ++p) unit[p] = e * np + p;
  FiniteGroupoid out(std::move(objects), std::move(arrows), std::move(src), std::move(tgt), std::move(unit),
                     std::move(inv));
  for (int g = 0; g < ng; ++g)
    for (int p = 0; p < np; ++p) {
      const int sigma = g * np + p;
      const int q = out.target(sigma);
      for (int h = 0; h < ng; ++h) out.set_compose(h * np + q, sigma, group.mul(h, g) * np + p);
    }
  out.set_action_group_order(ng);
  return out;
}

// ---------------------------------------------------------------------------
// Validation

ValidationReport validate_groupoid(const FiniteGroupoid& g) {
  ValidationReport rep;
  for (int x = 0; x < g.num_objects(); ++x) {
    const int u = g.unit(x);
    if (g.source(u) != x || g.target(u) != x)
      rep.add("unit", "unit " + g.arrow_label(u) + " of " + g.object_label(x) + " is not a loop at it");
  }
  for (int a = 0; a < g.num_arrows(); ++a) {
    for (int sigma : g.into(g.source(a))) {
      if (g.compose(a, sigma) < 0)
        rep.add("composition", "compose(" + g.arrow_label(a) + ", " + g.arrow_label(sigma) + ") missing");
    }
    const int ua = g.compose(g.unit(g.target(a)), a);
    const int au = g.compose(a, g.unit(g.source(a)));
    if (ua != a || au != a) rep.add("unit", "unit law fails for " + g.arrow_label(a));
    const int inv = g.inverse(a);
    if (g.source(inv) != g.target(a) || g.target(inv) != g.source(a)) {
      rep.add("inverse", "inverse " + g.arrow_label(inv) + " of " + g.arrow_label(a) + " does not swap source/target");
      continue;
    }
    if (g.compose(a, inv) != g.unit(g.target(a)))
      rep.add("inverse", "compose(" + g.arrow_label(a) + ", " + g.arrow_label(inv) + ") is not the unit");
    if (g.compose(inv, a) != g.unit(g.source(a)))
      rep.add("inverse", "compose(" + g.arrow_label(inv) + ", " + g.arrow_label(a) + ") is not the unit");
  }
  for (int a = 0; a < g.num_arrows(); ++a) {
    for (int sigma : g.into(g.source(a))) {
      const int c = g.compose(a, sigma);
      if (c >= 0 && (g.source(c) != g.source(sigma) || g.target(c) != g.target(a)))
        rep.add("composition", "compose(" + g.arrow_label(a) + ", " + g.arrow_label(sigma) + ") has wrong endpoints");
    }
  }
  for (const auto& t : kernels::associativity_violations(g))
    rep.add("associativity", "(" + g.arrow_label(t.outer) + ", " + g.arrow_label(t.middle) + ", " +
                                 g.arrow_label(t.inner) + ")");
  return rep;
}

ValidationReport validate_groupoid(const ActionGroupoid& g) {
  ValidationReport rep;
  try {
    check_base(g.base);
  } catch (const Error& e) {
    rep.add("base", e.what());
    return rep;
  }
  const int n = g.group.order();
  for (const auto& row : g.group.table) {
    if (static_cast<int>(row.size()) != n) {
      rep.add("group", "multiplication table is not square");
      return rep;
    }
    for (int v : row)
      if (v < 0 || v >= n) {
        rep.add("group", "multiplication table entry out of range");
        return rep;
      }
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (g.group.mul(g.group.mul(a, b), c) != g.group.mul(a, g.group.mul(b, c)))
          rep.add("group", "associativity fails at (" + std::to_string(a) + "," + std::to_string(b) + "," +
                               std::to_string(c) + ")");
  const int e = g.group.identity();
  if (e < 0) {
    rep.add("group", "no identity element");
    return rep;
  }
  for (int a = 0; a < n; ++a)
    if (g.group.inverse(a) < 0) rep.add("group", "element " + std::to_string(a) + " has no inverse");

  if (const auto* fs = std::get_if<FiniteSet>(&g.base)) {
    const int np = static_cast<int>(fs->labels.size());
    if (static_cast<int>(g.permutations.size()) != n) {
      rep.add("action", "one permutation per group element required");
      return rep;
    }
    for (int a = 0; a < n; ++a) {
      auto p = g.permutations[a];
      std::sort(p.begin(), p.end());
      std::vector<int> id(np);
      std::iota(id.begin(), id.end(), 0);
      if (p != id) {
        rep.add("action", "element " + std::to_string(a) + " does not act by a permutation");
        return rep;
      }
    }
    for (int x = 0; x < np; ++x)
      if (g.permutations[e][x] != x) rep.add("homomorphism", "identity moves " + fs->labels[x]);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int x = 0; x < np; ++x)
          if (g.permutations[g.group.mul(a, b)][x] != g.permutations[a][g.permutations[b][x]])
            rep.add("homomorphism", "act(" + std::to_string(a) + "*" + std::to_string(b) + ") != act(" +
                                        std::to_string(a) + ")o act(" + std::to_string(b) + ") at " + fs->labels[x]);
  } else {
    const int dim = base_dimension(g.base);
    if (static_cast<int>(g.isometries.size()) != n) {
      rep.add("action", "one isometry per group element required");
      return rep;
    }
    for (int a = 0; a < n; ++a) {
      const auto& iso = g.isometries[a];
      if (iso.sign != 1 && iso.sign != -1) rep.add("isometry", "sign must be +1 or -1");
      if (dim == 1 && iso.sign == -1) rep.add("isometry", "reflections of the circle are not catalog isometries");
      if (dim == 1 && iso.shift[1] != Rational(0)) rep.add("isometry", "circle isometry has a second shift component");
    }
    if (!g.isometries[e].is_identity()) rep.add("homomorphism", "identity element does not act trivially");
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (!(g.isometries[g.group.mul(a, b)] == g.isometries[a].after(g.isometries[b])))
          rep.add("homomorphism",
                  "act(" + std::to_string(a) + "*" + std::to_string(b) + ") != act(" + std::to_string(a) + ")o act(" +
                      std::to_string(b) + ")");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Orbits, isotropy, germs

OrbitPartition orbits(const FiniteGroupoid& g) {
  UnionFind uf(g.num_objects());
  for (int a = 0; a < g.num_arrows(); ++a) uf.unite(g.source(a), g.target(a));
  std::map<int, std::vector<int>> classes;
  for (int x = 0; x < g.num_objects(); ++x) classes[uf.find(x)].push_back(x);
  OrbitPartition out;
  for (auto& [root, members] : classes) out.orbits.push_back(std::move(members));
  out.description = std::to_string(out.count()) + " orbit(s)";
  return out;
}

OrbitPartition orbits(const ActionGroupoid& g) {
  const int np = num_points(g);
  UnionFind uf(np);
  for (int a = 0; a < g.group.order(); ++a)
    for (int p = 0; p < np; ++p) uf.unite(p, act_point(g, a, p));
  std::map<int, std::vector<int>> classes;
  for (int p = 0; p < np; ++p) classes[uf.find(p)].push_back(p);
  OrbitPartition out;
  for (auto& [root, members] : classes) out.orbits.push_back(std::move(members));
  if (is_fourier(g.base)) {
    out.sampled = true;
    std::ostringstream os;
    os << out.count() << " orbit classes on the " << np << "-point sample grid";
    out.description = os.str();
  } else {
    out.description = std::to_string(out.count()) + " orbit(s)";
  }
  return out;
}

Isotropy isotropy(const FiniteGroupoid& g, int x) {
  if (x < 0 || x >= g.num_objects()) throw Error("unknown object index " + std::to_string(x));
  return {g.hom(x, x)};
}

Isotropy isotropy(const ActionGroupoid& g, const std::string& object) {
  const auto* fs = std::get_if<FiniteSet>(&g.base);
  if (!fs) throw Error("isotropy by label needs a FiniteSet base");
  auto it = std::find(fs->labels.begin(), fs->labels.end(), object);
  if (it == fs->labels.end()) throw Error("unknown object '" + object + "'");
  const int x = static_cast<int>(it - fs->labels.begin());
  Isotropy out;
  for (int a = 0; a < g.group.order(); ++a)
    if (g.permutations[a][x] == x) out.elements.push_back(a);
  return out;
}

Isotropy isotropy(const ActionGroupoid& g, const std::vector<double>& point) {
  const int dim = base_dimension(g.base);
  if (dim == 0) throw Error("point isotropy needs a Fourier base");
  if (static_cast<int>(point.size()) != dim) throw Error("point has the wrong dimension");
  std::array<double, 2> circ{};
  if (const auto* c = std::get_if<FourierCircle>(&g.base))
    circ[0] = c->circumference;
  else
    circ = std::get<FourierTorus>(g.base).circumferences;
  Isotropy out;
  for (int a = 0; a < g.group.order(); ++a) {
    const auto& iso = g.isometries[a];
    bool fixed = true;
    for (int d = 0; d < dim; ++d) {
      const double img = iso.sign * point[d] + boost::rational_cast<double>(iso.shift[d]) * circ[d];
      double diff = std::fmod(img - point[d], circ[d]);
      if (diff < 0) diff += circ[d];
      fixed = fixed && std::min(diff, circ[d] - diff) <= 1e-12 * circ[d];
    }
    if (fixed) out.elements.push_back(a);
  }
  return out;
}

bool GermAction::is_identity() const {
  if (isometry) return isometry->is_identity();
  return source_point == target_point;
}

GermAction germ_of(const FiniteGroupoid& g, int arrow) {
  GermAction out;
  out.arrow = arrow;
  out.source_point = g.source(arrow);
  out.target_point = g.target(arrow);
  return out;
}

GermAction germ_of(const ActionGroupoid& g, int element, int point) {
  GermAction out;
  out.arrow = element;
  if (std::holds_alternative<FiniteSet>(g.base)) {
    out.source_point = point;
    out.target_point = g.permutations[element][point];
  } else {
    out.isometry = g.isometries[element].normalized();
  }
  return out;
}

EffectivenessResult is_effective(const FiniteGroupoid& g) {
  EffectivenessResult out;
  for (int x = 0; x < g.num_objects() && out.effective; ++x) {
    std::map<int, int> seen;
    for (int a : g.out_of(x)) {
      auto [it, inserted] = seen.emplace(g.target(a), a);
      if (!inserted) {
        out.effective = false;
        out.witness = std::make_pair(it->second, a);
        out.witness_text = g.arrow_label(it->second) + " and " + g.arrow_label(a) + " share the germ " +
                           g.object_label(x) + " -> " + g.object_label(g.target(a));
        break;
      }
    }
  }
  return out;
}

EffectivenessResult is_effective(const ActionGroupoid& g) {
  if (!is_fourier(g.base)) return is_effective(g.to_finite());
  EffectivenessResult out;
  const int dim = base_dimension(g.base);
  for (int a = 0; a < g.group.order() && out.effective; ++a)
    for (int b = a + 1; b < g.group.order(); ++b)
      if (g.isometries[a] == g.isometries[b]) {
        out.effective = false;
        out.witness = std::make_pair(a, b);
        out.witness_text = "elements " + std::to_string(a) + " and " + std::to_string(b) + " both act as " +
                           g.isometries[a].str(dim);
        break;
      }
  return out;
}

// ---------------------------------------------------------------------------
// Cech localization

CechCover ArcCover::sample(int grid) const {
  CechCover out;
  for (const auto& [center, half] : arcs) {
    std::vector<int> sheet;
    for (int i = 0; i < grid; ++i) {
      const double t = static_cast<double>(i) / grid;
      double d = std::fmod(std::fabs(t - center), 1.0);
      d = std::min(d, 1.0 - d);
      if (d <= half + 1e-12) sheet.push_back(i);
    }
    out.sheets.push_back(std::move(sheet));
  }
  return out;
}

CechCover trivial_cover(const FiniteGroupoid& g) {
  CechCover c;
  c.sheets.emplace_back(g.num_objects());
  std::iota(c.sheets[0].begin(), c.sheets[0].end(), 0);
  return c;
}

int CechGroupoid::object_of(int sheet, int x) const {
  if (sheet < 0 || sheet >= num_sheets || x < 0 || x >= base_objects) return -1;
  return object_lookup[static_cast<size_t>(sheet) * base_objects + x];
}

CechGroupoid cech_groupoid(const FiniteGroupoid& g, const CechCover& cover) {
  const int nx = g.num_objects();
  std::vector<bool> covered(nx, false);
  for (size_t a = 0; a < cover.sheets.size(); ++a) {
    if (cover.sheets[a].empty()) throw Error("sheet " + std::to_string(a) + " of the cover is empty");
    for (int x : cover.sheets[a]) {
      if (x < 0 || x >= nx) throw Error("sheet " + std::to_string(a) + " references an unknown object");
      covered[x] = true;
    }
  }
  for (int x = 0; x < nx; ++x)
    if (!covered[x]) throw Error("cover misses object " + g.object_label(x));

  CechGroupoid out;
  out.num_sheets = static_cast<int>(cover.sheets.size());
  out.base_objects = nx;
  out.object_lookup.assign(static_cast<size_t>(out.num_sheets) * nx, -1);
  std::vector<std::string> objects;
  for (int a = 0; a < out.num_sheets; ++a) {
    auto sheet = cover.sheets[a];
    std::sort(sheet.begin(), sheet.end());
    sheet.erase(std::unique(sheet.begin(), sheet.end()), sheet.end());
    for (int x : sheet) {
      out.object_lookup[static_cast<size_t>(a) * nx + x] = static_cast<int>(objects.size());
      objects.push_back(g.object_label(x) + "@" + std::to_string(a));
      out.object_sheet.push_back(a);
      out.object_base.push_back(x);
    }
  }
  std::vector<std::string> arrows;
  std::vector<int> src, tgt;
  // arrow index lookup: (target sheet, source sheet, base arrow)
  const int ns = out.num_sheets;
  std::vector<int> lookup(static_cast<size_t>(ns) * ns * g.num_arrows(), -1);
  for (int a = 0; a < ns; ++a)
    for (int b = 0; b < ns; ++b)
      for (int s = 0; s < g.num_arrows(); ++s) {
        const int to = out.object_of(a, g.target(s));
        const int from = out.object_of(b, g.source(s));
        if (to < 0 || from < 0) continue;
        lookup[(static_cast<size_t>(a) * ns + b) * g.num_arrows() + s] = static_cast<int>(arrows.size());
        arrows.push_back(g.arrow_label(s) + "@" + std::to_string(a) + std::to_string(b));
        src.push_back(from);
        tgt.push_back(to);
        out.arrow_target_sheet.push_back(a);
        out.arrow_source_sheet.push_back(b);
        out.arrow_base.push_back(s);
      }
  auto find_arrow = [&](int a, int b, int s) { return lookup[(static_cast<size_t>(a) * ns + b) * g.num_arrows() + s]; };
  std::vector<int> unit(objects.size()), inv(arrows.size());
  for (size_t o = 0; o < objects.size(); ++o) {
    const int sh = out.object_sheet[o];
    unit[o] = find_arrow(sh, sh, g.unit(out.object_base[o]));
  }
  for (size_t c = 0; c < arrows.size(); ++c)
    inv[c] = find_arrow(out.arrow_source_sheet[c], out.arrow_target_sheet[c], g.inverse(out.arrow_base[c]));
  const auto n_arrows = arrows.size();
  out.groupoid = FiniteGroupoid(std::move(objects), std::move(arrows), std::move(src), std::move(tgt),
                                std::move(unit), std::move(inv));
  for (size_t c = 0; c < n_arrows; ++c) {
    const int obj = out.groupoid.target(static_cast<int>(c));
    for (int t : out.groupoid.out_of(obj)) {
      const int base = g.compose(out.arrow_base[t], out.arrow_base[c]);
      if (base < 0) continue;
      out.groupoid.set_compose(t, static_cast<int>(c), find_arrow(out.arrow_target_sheet[t], out.arrow_source_sheet[c], base));
    }
  }
  return out;
}

CechGroupoid cech_groupoid(const ActionGroupoid& g, const ArcCover& cover) {
  if (!std::holds_alternative<FourierCircle>(g.base)) throw Error("arc covers apply to circle bases");
  return cech_groupoid(g.to_finite(), cover.sample(sample_grid_size(g.base)));
}

// ---------------------------------------------------------------------------
// Catalog

FiniteGroupoid group_as_groupoid(const FiniteGroup& group) {
  ActionGroupoid ag;
  ag.group = group;
  ag.base = FiniteSet{{"*"}};
  ag.permutations.assign(group.order(), std::vector<int>{0});
  return ag.to_finite();
}

FiniteGroupoid unit_groupoid(const std::vector<std::string>& labels) {
  ActionGroupoid ag;
  ag.group = FiniteGroup::cyclic(1);
  ag.base = FiniteSet{labels};
  std::vector<int> id(labels.size());
  std::iota(id.begin(), id.end(), 0);
  ag.permutations = {id};
  return ag.to_finite();
}

ActionGroupoid cyclic_double_action(int n) {
  ActionGroupoid ag;
  ag.group = FiniteGroup::cyclic(2 * n);
  FiniteSet fs;
  for (int y = 0; y < n; ++y) fs.labels.push_back(std::to_string(y));
  ag.base = fs;
  for (int a = 0; a < 2 * n; ++a) {
    std::vector<int> p(n);
    for (int y = 0; y < n; ++y) p[y] = (y + a % n) % n;
    ag.permutations.push_back(p);
  }
  return ag;
}

ActionGroupoid rotation_circle(int m, double circumference, int cutoff, int step) {
  ActionGroupoid ag;
  ag.group = FiniteGroup::cyclic(m);
  ag.base = FourierCircle{circumference, cutoff};
  for (int a = 0; a < m; ++a) {
    Isometry iso;
    iso.shift[0] = Rational(a * step, m);
    ag.isometries.push_back(iso.normalized());
  }
  return ag;
}

ActionGroupoid negation_torus(std::array<double, 2> circumferences, int cutoff) {
  ActionGroupoid ag;
  ag.group = FiniteGroup::cyclic(2);
  ag.base = FourierTorus{circumferences, cutoff};
  ag.isometries = {Isometry{}, Isometry{-1, {Rational(0), Rational(0)}}};
  return ag;
}

ActionGroupoid translation_torus(std::array<int, 2> degrees, std::array<double, 2> circumferences, int cutoff) {
  ActionGroupoid ag;
  ag.group = FiniteGroup::product(FiniteGroup::cyclic(degrees[0]), FiniteGroup::cyclic(degrees[1]));
  ag.base = FourierTorus{circumferences, cutoff};
  for (int a = 0; a < degrees[0]; ++a)
    for (int b = 0; b < degrees[1]; ++b) {
      Isometry iso;
      iso.shift = {Rational(a, degrees[0]), Rational(b, degrees[1])};
      ag.isometries.push_back(iso);
    }
  return ag;
}

}  // namespace orbi
