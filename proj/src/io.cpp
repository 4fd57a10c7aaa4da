#include "orbi/io.hpp"

#include <fstream>
#include <sstream>

namespace orbi::io {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw Error(path + ": " + what); }

const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing field");
  return *it;
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

std::string at(const std::string& path, size_t i) { return path + "[" + std::to_string(i) + "]"; }

std::vector<int> int_list(const json& j, const std::string& path) {
  std::vector<int> out;
  for (size_t i = 0; i < as_array(j, path).size(); ++i) out.push_back(as_int(j[i], at(path, i)));
  return out;
}

std::vector<std::string> string_list(const json& j, const std::string& path) {
  std::vector<std::string> out;
  for (size_t i = 0; i < as_array(j, path).size(); ++i) out.push_back(as_string(j[i], at(path, i)));
  return out;
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "expected [re, im]");
  return {as_double(j[0], path + "[0]"), as_double(j[1], path + "[1]")};
}

json geometry_json(const FlatGeometry& g) {
  json c = json::array();
  for (int d = 0; d < g.dim; ++d) c.push_back(g.circumference[d]);
  return {{"dim", g.dim}, {"circumference", c}};
}

FlatGeometry geometry_from(const json& j, const std::string& path) {
  FlatGeometry g;
  g.dim = as_int(field(j, "dim", path), path + ".dim");
  if (g.dim != 1 && g.dim != 2) fail(path + ".dim", "must be 1 or 2");
  const json& c = as_array(field(j, "circumference", path), path + ".circumference");
  if (static_cast<int>(c.size()) != g.dim) fail(path + ".circumference", "needs one entry per axis");
  for (int d = 0; d < g.dim; ++d) g.circumference[d] = as_double(c[d], at(path + ".circumference", d));
  return g;
}

json twist_json(const Twist& t, int dim) {
  json out = json::array();
  for (int d = 0; d < dim; ++d) out.push_back(to_string(t[d]));
  return out;
}

Twist twist_from(const json& j, int dim, const std::string& path) {
  Twist t{Rational(0), Rational(0)};
  if (!j.is_array() || static_cast<int>(j.size()) != dim) fail(path, "needs one rational per axis");
  for (int d = 0; d < dim; ++d) t[d] = parse_rational(j[d], at(path, d));
  return t;
}

json mode_json(const Mode& k, int dim) { return dim == 1 ? json::array({k[0]}) : json::array({k[0], k[1]}); }

Mode mode_from(const json& j, int dim, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) fail(path, "mode needs one integer per axis");
  Mode k{0, 0};
  for (int d = 0; d < dim; ++d) k[d] = as_int(j[d], at(path, d));
  return k;
}

json base_json(const BaseSpace& base) {
  if (const auto* fs = std::get_if<FiniteSet>(&base)) return {{"kind", "finite"}, {"labels", fs->labels}};
  if (const auto* c = std::get_if<FourierCircle>(&base))
    return {{"kind", "circle"}, {"circumference", c->circumference}, {"mode_cutoff", c->mode_cutoff}};
  const auto& t = std::get<FourierTorus>(base);
  return {{"kind", "torus"},
          {"circumferences", json::array({t.circumferences[0], t.circumferences[1]})},
          {"mode_cutoff", t.mode_cutoff}};
}

BaseSpace base_from(const json& j, const std::string& path) {
  const std::string kind = as_string(field(j, "kind", path), path + ".kind");
  if (kind == "finite") return FiniteSet{string_list(field(j, "labels", path), path + ".labels")};
  if (kind == "circle")
    return FourierCircle{as_double(field(j, "circumference", path), path + ".circumference"),
                         as_int(field(j, "mode_cutoff", path), path + ".mode_cutoff")};
  if (kind == "torus") {
    const json& c = field(j, "circumferences", path);
    if (!c.is_array() || c.size() != 2) fail(path + ".circumferences", "expected two lengths");
    return FourierTorus{{as_double(c[0], path + ".circumferences[0]"), as_double(c[1], path + ".circumferences[1]")},
                        as_int(field(j, "mode_cutoff", path), path + ".mode_cutoff")};
  }
  fail(path + ".kind", "unknown base kind '" + kind + "'");
}

json isometry_json(const Isometry& iso, int dim) {
  json shift = json::array();
  for (int d = 0; d < dim; ++d) shift.push_back(to_string(iso.shift[d]));
  return {{"sign", iso.sign}, {"shift", shift}};
}

Isometry isometry_from(const json& j, int dim, const std::string& path) {
  Isometry iso;
  iso.sign = as_int(field(j, "sign", path), path + ".sign");
  if (iso.sign != 1 && iso.sign != -1) fail(path + ".sign", "must be +1 or -1");
  const json& s = field(j, "shift", path);
  if (!s.is_array() || static_cast<int>(s.size()) != dim) fail(path + ".shift", "needs one rational per axis");
  for (int d = 0; d < dim; ++d) iso.shift[d] = parse_rational(s[d], at(path + ".shift", d));
  return iso;
}

json violations_json(const ValidationReport& r) {
  json v = json::array();
  for (const auto& x : r.violations) v.push_back({{"kind", x.kind}, {"detail", x.detail}});
  return v;
}

std::pair<int, int> line_column(const std::string& text, size_t byte) {
  int line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

json parse(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // byte is one past the offending character
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string msg = e.what();
    const auto cut = msg.find("error while parsing");
    if (cut != std::string::npos) msg = msg.substr(cut);
    throw Error(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  }
}

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void check_version(const json& doc, const std::string& where) {
  if (!doc.is_object()) throw Error(where + ": expected a JSON object");
  auto it = doc.find("schema_version");
  if (it == doc.end()) throw Error(where + ": schema_version: missing field");
  if (!it->is_number_integer() || it->get<int>() != schema_version)
    throw Error(where + ": schema_version: unsupported value " + it->dump() + " (expected " +
                std::to_string(schema_version) + ")");
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational parse_rational(const json& j, const std::string& path) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  const std::string s = as_string(j, path);
  try {
    size_t used = 0;
    const auto slash = s.find('/');
    const std::int64_t num = std::stoll(s.substr(0, slash), &used);
    if (used != (slash == std::string::npos ? s.size() : slash)) throw std::invalid_argument(s);
    if (slash == std::string::npos) return Rational(num);
    const std::string dtext = s.substr(slash + 1);
    const std::int64_t den = std::stoll(dtext, &used);
    if (used != dtext.size() || den == 0) throw std::invalid_argument(s);
    return Rational(num, den);
  } catch (const std::exception&) {
    fail(path, "malformed rational '" + s + "'");
  }
}

json to_json(const GaussRat& z) { return json::array({to_string(z.re), to_string(z.im)}); }

GaussRat gauss_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "expected [re, im] rationals");
  return {parse_rational(j[0], path + "[0]"), parse_rational(j[1], path + "[1]")};
}

json to_json(const ExactMatrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

ExactMatrix matrix_from_json(const json& j, const std::string& path) {
  std::vector<std::vector<GaussRat>> rows;
  for (size_t r = 0; r < as_array(j, path).size(); ++r) {
    const std::string rp = at(path, r);
    std::vector<GaussRat> row;
    for (size_t c = 0; c < as_array(j[r], rp).size(); ++c) row.push_back(gauss_from_json(j[r][c], at(rp, c)));
    if (!rows.empty() && row.size() != rows.front().size()) fail(rp, "ragged matrix row");
    rows.push_back(std::move(row));
  }
  return rows.empty() ? ExactMatrix() : ExactMatrix::from_rows(rows);
}

json to_json(const FiniteGroupoid& g) {
  json arrows = json::array();
  for (int a = 0; a < g.num_arrows(); ++a)
    arrows.push_back({{"label", g.arrow_label(a)}, {"source", g.source(a)}, {"target", g.target(a)}});
  std::vector<int> unit, inverse;
  for (int x = 0; x < g.num_objects(); ++x) unit.push_back(g.unit(x));
  for (int a = 0; a < g.num_arrows(); ++a) inverse.push_back(g.inverse(a));
  json compose = json::array();
  for (int tau = 0; tau < g.num_arrows(); ++tau)
    for (int sigma : g.into(g.source(tau))) {
      const int r = g.compose(tau, sigma);
      if (r >= 0) compose.push_back(json::array({tau, sigma, r}));
    }
  json out{{"flavor", "finite"},     {"objects", g.object_labels()}, {"arrows", arrows},
           {"unit", unit},           {"inverse", inverse},           {"compose", compose}};
  if (g.action_group_order() > 0) out["action_group_order"] = g.action_group_order();
  return out;
}

FiniteGroupoid finite_groupoid_from_json(const json& j, const std::string& path) {
  const std::string flavor = as_string(field(j, "flavor", path), path + ".flavor");
  if (flavor != "finite") fail(path + ".flavor", "expected 'finite', found '" + flavor + "'");
  auto objects = string_list(field(j, "objects", path), path + ".objects");
  const json& arr = as_array(field(j, "arrows", path), path + ".arrows");
  std::vector<std::string> labels;
  std::vector<int> source, target;
  for (size_t a = 0; a < arr.size(); ++a) {
    const std::string ap = at(path + ".arrows", a);
    labels.push_back(as_string(field(arr[a], "label", ap), ap + ".label"));
    source.push_back(as_int(field(arr[a], "source", ap), ap + ".source"));
    target.push_back(as_int(field(arr[a], "target", ap), ap + ".target"));
  }
  auto unit = int_list(field(j, "unit", path), path + ".unit");
  auto inverse = int_list(field(j, "inverse", path), path + ".inverse");
  FiniteGroupoid g;
  try {
    g = FiniteGroupoid(std::move(objects), std::move(labels), std::move(source), std::move(target), std::move(unit),
                       std::move(inverse));
  } catch (const Error& e) {
    fail(path, e.what());
  }
  const json& comp = as_array(field(j, "compose", path), path + ".compose");
  for (size_t i = 0; i < comp.size(); ++i) {
    const std::string cp = at(path + ".compose", i);
    const auto t = int_list(comp[i], cp);
    if (t.size() != 3) fail(cp, "expected [tau, sigma, result]");
    for (int v : t)
      if (v < 0 || v >= g.num_arrows()) fail(cp, "arrow index out of range");
    try {
      g.set_compose(t[0], t[1], t[2]);
    } catch (const Error& e) {
      fail(cp, e.what());
    }
  }
  if (j.contains("action_group_order"))
    g.set_action_group_order(as_int(j["action_group_order"], path + ".action_group_order"));
  return g;
}

json to_json(const ActionGroupoid& g) {
  json out{{"flavor", "action"},
           {"group", {{"name", g.group.name}, {"table", g.group.table}}},
           {"base", base_json(g.base)}};
  if (g.is_fourier_flavor()) {
    const int dim = base_dimension(g.base);
    json isos = json::array();
    for (const auto& iso : g.isometries) isos.push_back(isometry_json(iso, dim));
    out["isometries"] = isos;
  } else {
    out["permutations"] = g.permutations;
  }
  return out;
}

ActionGroupoid action_groupoid_from_json(const json& j, const std::string& path) {
  const std::string flavor = as_string(field(j, "flavor", path), path + ".flavor");
  if (flavor != "action") fail(path + ".flavor", "expected 'action', found '" + flavor + "'");
  ActionGroupoid g;
  const json& grp = field(j, "group", path);
  g.group.name = grp.contains("name") ? as_string(grp["name"], path + ".group.name") : std::string();
  const json& table = as_array(field(grp, "table", path + ".group"), path + ".group.table");
  for (size_t r = 0; r < table.size(); ++r) {
    auto row = int_list(table[r], at(path + ".group.table", r));
    if (row.size() != table.size()) fail(at(path + ".group.table", r), "table must be square");
    for (int v : row)
      if (v < 0 || v >= static_cast<int>(table.size())) fail(at(path + ".group.table", r), "entry out of range");
    g.group.table.push_back(std::move(row));
  }
  g.base = base_from(field(j, "base", path), path + ".base");
  try {
    check_base(g.base);
  } catch (const Error& e) {
    fail(path + ".base", e.what());
  }
  const int n = g.group.order();
  if (is_fourier(g.base)) {
    const int dim = base_dimension(g.base);
    const json& isos = as_array(field(j, "isometries", path), path + ".isometries");
    if (static_cast<int>(isos.size()) != n) fail(path + ".isometries", "needs one isometry per group element");
    for (size_t i = 0; i < isos.size(); ++i) g.isometries.push_back(isometry_from(isos[i], dim, at(path + ".isometries", i)));
  } else {
    const json& perms = as_array(field(j, "permutations", path), path + ".permutations");
    if (static_cast<int>(perms.size()) != n) fail(path + ".permutations", "needs one permutation per group element");
    const int np = static_cast<int>(std::get<FiniteSet>(g.base).labels.size());
    for (size_t i = 0; i < perms.size(); ++i) {
      auto p = int_list(perms[i], at(path + ".permutations", i));
      if (static_cast<int>(p.size()) != np) fail(at(path + ".permutations", i), "wrong length");
      for (int v : p)
        if (v < 0 || v >= np) fail(at(path + ".permutations", i), "point out of range");
      g.permutations.push_back(std::move(p));
    }
  }
  return g;
}

json to_json(const Bitorsor& h) {
  json left = json::array(), right = json::array();
  for (int q = 0; q < h.size(); ++q) {
    for (int s : h.left.out_of(h.rho[q])) {
      const int v = h.act_left(s, q);
      if (v >= 0) left.push_back(json::array({s, q, v}));
    }
    for (int t : h.right.into(h.alpha[q])) {
      const int v = h.act_right(q, t);
      if (v >= 0) right.push_back(json::array({q, t, v}));
    }
  }
  return {{"name", h.name},   {"left", to_json(h.left)}, {"right", to_json(h.right)}, {"carrier", h.carrier},
          {"rho", h.rho},     {"alpha", h.alpha},       {"left_action", left},        {"right_action", right}};
}

Bitorsor bitorsor_from_json(const json& j, const std::string& path) {
  auto left = finite_groupoid_from_json(field(j, "left", path), path + ".left");
  auto right = finite_groupoid_from_json(field(j, "right", path), path + ".right");
  auto carrier = string_list(field(j, "carrier", path), path + ".carrier");
  auto rho = int_list(field(j, "rho", path), path + ".rho");
  auto alpha = int_list(field(j, "alpha", path), path + ".alpha");
  if (rho.size() != carrier.size() || alpha.size() != carrier.size())
    fail(path, "rho and alpha need one entry per carrier point");
  for (size_t q = 0; q < carrier.size(); ++q) {
    if (rho[q] < 0 || rho[q] >= left.num_objects()) fail(at(path + ".rho", q), "object out of range");
    if (alpha[q] < 0 || alpha[q] >= right.num_objects()) fail(at(path + ".alpha", q), "object out of range");
  }
  Bitorsor h(std::move(left), std::move(right), std::move(carrier), std::move(rho), std::move(alpha));
  if (j.contains("name")) h.name = as_string(j["name"], path + ".name");
  const int nq = h.size();
  const json& la = as_array(field(j, "left_action", path), path + ".left_action");
  for (size_t i = 0; i < la.size(); ++i) {
    const std::string p = at(path + ".left_action", i);
    const auto t = int_list(la[i], p);
    if (t.size() != 3 || t[0] < 0 || t[0] >= h.left.num_arrows() || t[1] < 0 || t[1] >= nq || t[2] < 0 || t[2] >= nq)
      fail(p, "expected [sigma, q, sigma.q] in range");
    try {
      h.set_left(t[0], t[1], t[2]);
    } catch (const Error& e) {
      fail(p, e.what());
    }
  }
  const json& ra = as_array(field(j, "right_action", path), path + ".right_action");
  for (size_t i = 0; i < ra.size(); ++i) {
    const std::string p = at(path + ".right_action", i);
    const auto t = int_list(ra[i], p);
    if (t.size() != 3 || t[0] < 0 || t[0] >= nq || t[1] < 0 || t[1] >= h.right.num_arrows() || t[2] < 0 || t[2] >= nq)
      fail(p, "expected [q, tau, q.tau] in range");
    try {
      h.set_right(t[0], t[1], t[2]);
    } catch (const Error& e) {
      fail(p, e.what());
    }
  }
  return h;
}

json to_json(const Cocycle& c) {
  json entries = json::array();
  for (const auto& m : c.entries) entries.push_back(to_json(m));
  return {{"groupoid", to_json(c.groupoid)}, {"rank", c.rank}, {"entries", entries}};
}

Cocycle cocycle_from_json(const json& j, const std::string& path) {
  Cocycle c;
  c.groupoid = finite_groupoid_from_json(field(j, "groupoid", path), path + ".groupoid");
  c.rank = as_int(field(j, "rank", path), path + ".rank");
  const json& e = as_array(field(j, "entries", path), path + ".entries");
  if (static_cast<int>(e.size()) != c.groupoid.num_arrows()) fail(path + ".entries", "needs one matrix per arrow");
  for (size_t a = 0; a < e.size(); ++a) {
    auto m = matrix_from_json(e[a], at(path + ".entries", a));
    if (m.rows() != c.rank || m.cols() != c.rank) fail(at(path + ".entries", a), "matrix does not match the rank");
    c.entries.push_back(std::move(m));
  }
  return c;
}

json to_json(const ModeFunction& f) {
  json terms = json::array();
  for (int i = 0; i < f.modes.size(); ++i)
    if (f.coeffs[i] != cplx(0.0, 0.0))
      terms.push_back({{"mode", mode_json(f.modes.mode(i), f.geom.dim)}, {"value", complex_json(f.coeffs[i])}});
  return {{"geometry", geometry_json(f.geom)},
          {"cutoff", f.modes.cutoff},
          {"delta", twist_json(f.delta, f.geom.dim)},
          {"terms", terms}};
}

ModeFunction mode_function_from_json(const json& j, const std::string& path) {
  const FlatGeometry geom = geometry_from(field(j, "geometry", path), path + ".geometry");
  const int cutoff = as_int(field(j, "cutoff", path), path + ".cutoff");
  if (cutoff < 0) fail(path + ".cutoff", "must be nonnegative");
  ModeFunction f =
      ModeFunction::zero(geom, cutoff, twist_from(field(j, "delta", path), geom.dim, path + ".delta"));
  const json& terms = as_array(field(j, "terms", path), path + ".terms");
  for (size_t i = 0; i < terms.size(); ++i) {
    const std::string tp = at(path + ".terms", i);
    const Mode k = mode_from(field(terms[i], "mode", tp), geom.dim, tp + ".mode");
    if (f.modes.index(k) < 0) fail(tp + ".mode", "mode exceeds the cutoff");
    f.at(k) = complex_from(field(terms[i], "value", tp), tp + ".value");
  }
  return f;
}

json to_json(const Generator& f) {
  if (f.parts.empty()) return {{"name", f.name}, {"elements", 0}, {"terms", json::array()}};
  const ModeFunction& p0 = f.parts.front();
  json terms = json::array();
  for (size_t g = 0; g < f.parts.size(); ++g) {
    const ModeFunction& p = f.parts[g];
    for (int i = 0; i < p.modes.size(); ++i)
      if (p.coeffs[i] != cplx(0.0, 0.0))
        terms.push_back({{"element", static_cast<int>(g)},
                         {"mode", mode_json(p.modes.mode(i), p.geom.dim)},
                         {"value", complex_json(p.coeffs[i])}});
  }
  return {{"name", f.name},
          {"elements", static_cast<int>(f.parts.size())},
          {"geometry", geometry_json(p0.geom)},
          {"cutoff", p0.modes.cutoff},
          {"delta", twist_json(p0.delta, p0.geom.dim)},
          {"terms", terms}};
}

Generator generator_from_json(const json& j, const std::string& path) {
  Generator f;
  f.name = as_string(field(j, "name", path), path + ".name");
  const int n = as_int(field(j, "elements", path), path + ".elements");
  if (n < 0) fail(path + ".elements", "must be nonnegative");
  if (n == 0) return f;
  const FlatGeometry geom = geometry_from(field(j, "geometry", path), path + ".geometry");
  const int cutoff = as_int(field(j, "cutoff", path), path + ".cutoff");
  const Twist delta = twist_from(field(j, "delta", path), geom.dim, path + ".delta");
  for (int g = 0; g < n; ++g) f.parts.push_back(ModeFunction::zero(geom, cutoff, delta));
  const json& terms = as_array(field(j, "terms", path), path + ".terms");
  for (size_t i = 0; i < terms.size(); ++i) {
    const std::string tp = at(path + ".terms", i);
    const int g = as_int(field(terms[i], "element", tp), tp + ".element");
    if (g < 0 || g >= n) fail(tp + ".element", "group element out of range");
    const Mode k = mode_from(field(terms[i], "mode", tp), geom.dim, tp + ".mode");
    if (f.parts[g].modes.index(k) < 0) fail(tp + ".mode", "mode exceeds the cutoff");
    f.parts[g].at(k) = complex_from(field(terms[i], "value", tp), tp + ".value");
  }
  return f;
}

json to_json(const FiniteGroupoid& g, const ArrowFunction& f) {
  json terms = json::array();
  for (size_t a = 0; a < f.size(); ++a)
    if (!f[a].is_zero()) terms.push_back({{"arrow", static_cast<int>(a)}, {"label", g.arrow_label(static_cast<int>(a))}, {"value", to_json(f[a])}});
  return {{"arrows", g.num_arrows()}, {"terms", terms}};
}

ArrowFunction arrow_function_from_json(const json& j, const std::string& path) {
  const int n = as_int(field(j, "arrows", path), path + ".arrows");
  if (n < 0) fail(path + ".arrows", "must be nonnegative");
  ArrowFunction f(n);
  const json& terms = as_array(field(j, "terms", path), path + ".terms");
  for (size_t i = 0; i < terms.size(); ++i) {
    const std::string tp = at(path + ".terms", i);
    const int a = as_int(field(terms[i], "arrow", tp), tp + ".arrow");
    if (a < 0 || a >= n) fail(tp + ".arrow", "arrow out of range");
    f[a] = gauss_from_json(field(terms[i], "value", tp), tp + ".value");
  }
  return f;
}

json to_json(const ValidationReport& r) { return {{"valid", r.valid()}, {"violations", violations_json(r)}}; }

ValidationReport validation_from_json(const json& j, const std::string& path) {
  ValidationReport r;
  const json& v = as_array(field(j, "violations", path), path + ".violations");
  for (size_t i = 0; i < v.size(); ++i) {
    const std::string vp = at(path + ".violations", i);
    r.add(as_string(field(v[i], "kind", vp), vp + ".kind"), as_string(field(v[i], "detail", vp), vp + ".detail"));
  }
  return r;
}

json to_json(const SpectralTripleReport& r) {
  json gens = json::array();
  for (const auto& g : r.generators) {
    json gj{{"name", g.name},
            {"buffer", g.buffer},
            {"norm", g.norm},
            {"norm_double", g.norm_double},
            {"drift", g.drift},
            {"symbol_residual", g.symbol_residual},
            {"projector_residual", g.projector_residual}};
    if (g.chirality_commutator) gj["chirality_commutator"] = *g.chirality_commutator;
    gens.push_back(gj);
  }
  json out{{"dimension", r.dimension},
           {"cutoff", r.cutoff},
           {"eigenvalues", r.eigenvalues},
           {"hermiticity_residual", r.hermiticity_residual},
           {"invariance_residual", r.invariance_residual},
           {"projector_idempotency", r.projector_idempotency},
           {"projector_commutator", r.projector_commutator},
           {"generators", gens},
           {"growth_exponent", r.growth_exponent},
           {"divergence_residual", r.divergence_residual},
           {"notes", r.notes}};
  if (r.chirality_square_exact) out["chirality_square_exact"] = *r.chirality_square_exact;
  if (r.chirality_anticommutator) out["chirality_anticommutator"] = *r.chirality_anticommutator;
  return out;
}

SpectralTripleReport triple_report_from_json(const json& j, const std::string& path) {
  SpectralTripleReport r;
  auto num = [&](const char* key) { return as_double(field(j, key, path), path + "." + key); };
  r.dimension = as_int(field(j, "dimension", path), path + ".dimension");
  r.cutoff = as_int(field(j, "cutoff", path), path + ".cutoff");
  const json& ev = as_array(field(j, "eigenvalues", path), path + ".eigenvalues");
  for (size_t i = 0; i < ev.size(); ++i) r.eigenvalues.push_back(as_double(ev[i], at(path + ".eigenvalues", i)));
  r.hermiticity_residual = num("hermiticity_residual");
  r.invariance_residual = num("invariance_residual");
  r.projector_idempotency = num("projector_idempotency");
  r.projector_commutator = num("projector_commutator");
  r.growth_exponent = num("growth_exponent");
  r.divergence_residual = num("divergence_residual");
  r.notes = string_list(field(j, "notes", path), path + ".notes");
  if (j.contains("chirality_square_exact")) {
    if (!j["chirality_square_exact"].is_boolean()) fail(path + ".chirality_square_exact", "expected a boolean");
    r.chirality_square_exact = j["chirality_square_exact"].get<bool>();
  }
  if (j.contains("chirality_anticommutator"))
    r.chirality_anticommutator = as_double(j["chirality_anticommutator"], path + ".chirality_anticommutator");
  const json& gens = as_array(field(j, "generators", path), path + ".generators");
  for (size_t i = 0; i < gens.size(); ++i) {
    const std::string gp = at(path + ".generators", i);
    const json& g = gens[i];
    GeneratorReport gr;
    auto gnum = [&](const char* key) { return as_double(field(g, key, gp), gp + "." + key); };
    gr.name = as_string(field(g, "name", gp), gp + ".name");
    gr.buffer = as_int(field(g, "buffer", gp), gp + ".buffer");
    gr.norm = gnum("norm");
    gr.norm_double = gnum("norm_double");
    gr.drift = gnum("drift");
    gr.symbol_residual = gnum("symbol_residual");
    gr.projector_residual = gnum("projector_residual");
    if (g.contains("chirality_commutator"))
      gr.chirality_commutator = as_double(g["chirality_commutator"], gp + ".chirality_commutator");
    r.generators.push_back(std::move(gr));
  }
  return r;
}

json to_json(const GroupoidFile& f) {
  json out{{"schema_version", schema_version}};
  out["groupoid"] = std::visit([](const auto& g) { return to_json(g); }, f.groupoid);
  if (!f.covers.empty()) {
    json covers = json::array();
    for (const auto& c : f.covers) covers.push_back({{"sheets", c.sheets}});
    out["covers"] = covers;
  }
  if (!f.arcs.empty()) {
    json arcs = json::array();
    for (const auto& a : f.arcs) {
      json list = json::array();
      for (const auto& [c, h] : a.arcs) list.push_back({{"center", c}, {"half_width", h}});
      arcs.push_back({{"arcs", list}});
    }
    out["arcs"] = arcs;
  }
  return out;
}

GroupoidFile groupoid_file_from_json(const json& j, const std::string& path) {
  check_version(j, path);
  GroupoidFile f;
  const json& g = field(j, "groupoid", path);
  const std::string flavor = as_string(field(g, "flavor", path + ".groupoid"), path + ".groupoid.flavor");
  if (flavor == "finite")
    f.groupoid = finite_groupoid_from_json(g, path + ".groupoid");
  else
    f.groupoid = action_groupoid_from_json(g, path + ".groupoid");
  const int objects = std::visit(
      [](const auto& x) {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, FiniteGroupoid>)
          return x.num_objects();
        else
          return x.to_finite().num_objects();
      },
      f.groupoid);
  if (j.contains("covers")) {
    const json& cs = as_array(j["covers"], path + ".covers");
    for (size_t i = 0; i < cs.size(); ++i) {
      const std::string cp = at(path + ".covers", i);
      const json& sheets = as_array(field(cs[i], "sheets", cp), cp + ".sheets");
      CechCover c;
      for (size_t s = 0; s < sheets.size(); ++s) {
        auto sheet = int_list(sheets[s], at(cp + ".sheets", s));
        for (int x : sheet)
          if (x < 0 || x >= objects) fail(at(cp + ".sheets", s), "object " + std::to_string(x) + " out of range");
        c.sheets.push_back(std::move(sheet));
      }
      f.covers.push_back(std::move(c));
    }
  }
  if (j.contains("arcs")) {
    const json& as = as_array(j["arcs"], path + ".arcs");
    for (size_t i = 0; i < as.size(); ++i) {
      const std::string ap = at(path + ".arcs", i);
      const json& list = as_array(field(as[i], "arcs", ap), ap + ".arcs");
      ArcCover a;
      for (size_t k = 0; k < list.size(); ++k) {
        const std::string kp = at(ap + ".arcs", k);
        a.arcs.emplace_back(as_double(field(list[k], "center", kp), kp + ".center"),
                            as_double(field(list[k], "half_width", kp), kp + ".half_width"));
      }
      f.arcs.push_back(std::move(a));
    }
  }
  return f;
}

GroupoidFile read_groupoid_file(const std::string& path) { return groupoid_file_from_json(read_file(path), path); }

}  // namespace orbi::io
