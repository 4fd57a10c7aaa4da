#pragma once

// Groupoids of the two catalog flavors: finite groupoids given by tables and
// action groupoids of a finite group acting on a finite set, a flat circle or
// a flat 2-torus by isometries.

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "orbi/exact.hpp"

namespace orbi {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FiniteSet {
  std::vector<std::string> labels;
};

struct FourierCircle {
  double circumference = 0.0;
  int mode_cutoff = 0;
};

struct FourierTorus {
  std::array<double, 2> circumferences{};
  int mode_cutoff = 0;
};

using BaseSpace = std::variant<FiniteSet, FourierCircle, FourierTorus>;

/// 0 for finite sets, 1 for the circle, 2 for the torus.
int base_dimension(const BaseSpace& base);
bool is_fourier(const BaseSpace& base);
/// Throws Error when a BaseSpace invariant fails.
void check_base(const BaseSpace& base);
/// Points per axis of the uniform sample grid (4 * mode cutoff).
int sample_grid_size(const BaseSpace& base);

struct Violation {
  std::string kind;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
  void add(std::string kind, std::string detail) { violations.push_back({std::move(kind), std::move(detail)}); }
  bool has(const std::string& kind) const;
};

/// Finite group given by its multiplication table; mul(a, b) = a * b.
struct FiniteGroup {
  std::string name;
  std::vector<std::vector<int>> table;

  int order() const { return static_cast<int>(table.size()); }
  int mul(int a, int b) const { return table[a][b]; }
  int identity() const;
  int inverse(int a) const;

  static FiniteGroup cyclic(int n);
  /// Direct product; element (a, b) has index a * right.order() + b.
  static FiniteGroup product(const FiniteGroup& left, const FiniteGroup& right);
};

/// Flat isometry v -> sign * v + shift, shifts stored as fractions of the
/// circumference on each axis (exact).
struct Isometry {
  int sign = 1;
  std::array<Rational, 2> shift{Rational(0), Rational(0)};

  Isometry normalized() const;
  /// (this o other)(v) = this(other(v)).
  Isometry after(const Isometry& other) const;
  Isometry inverse() const;
  bool is_identity() const;
  friend bool operator==(const Isometry& a, const Isometry& b);
  std::string str(int dim) const;
};

/// Finite groupoid with explicit structure tables.  Arrows and objects are
/// dense indices; composition is stored per arrow over the arrows composable
/// with it, -1 marks a missing entry.
class FiniteGroupoid {
 public:
  FiniteGroupoid() = default;
  FiniteGroupoid(std::vector<std::string> objects, std::vector<std::string> arrows, std::vector<int> source,
                 std::vector<int> target, std::vector<int> unit, std::vector<int> inverse);

  int num_objects() const { return static_cast<int>(objects_.size()); }
  int num_arrows() const { return static_cast<int>(arrows_.size()); }
  const std::string& object_label(int x) const { return objects_[x]; }
  const std::string& arrow_label(int a) const { return arrows_[a]; }
  const std::vector<std::string>& object_labels() const { return objects_; }
  const std::vector<std::string>& arrow_labels() const { return arrows_; }
  int object_index(const std::string& label) const;
  int arrow_index(const std::string& label) const;

  int source(int a) const { return source_[a]; }
  int target(int a) const { return target_[a]; }
  int unit(int x) const { return unit_[x]; }
  int inverse(int a) const { return inverse_[a]; }

  /// Arrows with target x.
  const std::vector<int>& into(int x) const { return into_[x]; }
  /// Arrows with source x.
  const std::vector<int>& out_of(int x) const { return out_of_[x]; }
  /// Arrows x -> y.
  std::vector<int> hom(int x, int y) const;
  /// Position of a in into(target(a)) / out_of(source(a)).
  int pos_in_target(int a) const { return pos_in_target_[a]; }
  int pos_in_source(int a) const { return pos_in_source_[a]; }

  /// compose(tau, sigma) = tau after sigma, defined iff source(tau) == target(sigma).
  /// Returns -1 when undefined or missing from the table.
  int compose(int tau, int sigma) const;
  void set_compose(int tau, int sigma, int result);

  /// Optional group-action provenance: arrow id = g * num_objects + x.
  int action_group_order() const { return action_group_order_; }
  void set_action_group_order(int order) { action_group_order_ = order; }
  int action_arrow(int g, int x) const { return g * num_objects() + x; }
  int action_element(int a) const { return a / num_objects(); }

 private:
  std::vector<std::string> objects_;
  std::vector<std::string> arrows_;
  std::vector<int> source_, target_, unit_, inverse_;
  std::vector<std::vector<int>> into_, out_of_;
  std::vector<int> pos_in_target_, pos_in_source_;
  std::vector<std::vector<int>> compose_;
  int action_group_order_ = 0;
};

/// Finite group acting on a catalog base.  For a FiniteSet base the action is
/// a permutation per element, otherwise an isometry per element.
struct ActionGroupoid {
  FiniteGroup group;
  BaseSpace base;
  std::vector<std::vector<int>> permutations;
  std::vector<Isometry> isometries;

  bool is_fourier_flavor() const { return is_fourier(base); }
  /// Finite presentation: exact for FiniteSet bases, sample-grid restriction otherwise.
  FiniteGroupoid to_finite() const;
};

ValidationReport validate_groupoid(const FiniteGroupoid& g);
ValidationReport validate_groupoid(const ActionGroupoid& g);

struct OrbitPartition {
  std::vector<std::vector<int>> orbits;  // object indices (grid indices for sampled bases)
  int count() const { return static_cast<int>(orbits.size()); }
  bool sampled = false;
  std::string description;
};

OrbitPartition orbits(const FiniteGroupoid& g);
/// Fourier bases are partitioned on the uniform sample grid.
OrbitPartition orbits(const ActionGroupoid& g);

struct Isotropy {
  std::vector<int> elements;  // arrows (finite) or group elements (action groupoid)
  int rank() const { return static_cast<int>(elements.size()); }
};

Isotropy isotropy(const FiniteGroupoid& g, int x);
Isotropy isotropy(const ActionGroupoid& g, const std::string& object);
/// Fourier flavor: isotropy at a point given in base coordinates.
Isotropy isotropy(const ActionGroupoid& g, const std::vector<double>& point);

struct GermAction {
  int arrow = -1;
  // FiniteSet base: the germ at the source point is its target value.
  int source_point = -1;
  int target_point = -1;
  std::optional<Isometry> isometry;
  bool is_identity() const;
};

GermAction germ_of(const FiniteGroupoid& g, int arrow);
GermAction germ_of(const ActionGroupoid& g, int element, int point = 0);

struct EffectivenessResult {
  bool effective = true;
  std::optional<std::pair<int, int>> witness;  // arrows (finite) or group elements (Fourier)
  std::string witness_text;
};

EffectivenessResult is_effective(const FiniteGroupoid& g);
EffectivenessResult is_effective(const ActionGroupoid& g);

struct CechCover {
  std::vector<std::vector<int>> sheets;  // object indices
};

/// Arc cover of a circle: centers and half-widths as fractions of the circumference.
struct ArcCover {
  std::vector<std::pair<double, double>> arcs;
  CechCover sample(int grid) const;
};

CechCover trivial_cover(const FiniteGroupoid& g);

/// Groupoid on the disjoint union of the sheets with sheet indices retained.
struct CechGroupoid {
  FiniteGroupoid groupoid;
  int num_sheets = 0;
  std::vector<int> object_sheet, object_base;
  std::vector<int> arrow_target_sheet, arrow_source_sheet, arrow_base;
  /// Object of the Cech groupoid for (sheet, base object), -1 when absent.
  int object_of(int sheet, int x) const;
  std::vector<int> object_lookup;  // sheet * base_objects + x
  int base_objects = 0;
};

CechGroupoid cech_groupoid(const FiniteGroupoid& g, const CechCover& cover);
CechGroupoid cech_groupoid(const ActionGroupoid& g, const ArcCover& cover);

// Catalog constructors.
FiniteGroupoid group_as_groupoid(const FiniteGroup& group);
FiniteGroupoid unit_groupoid(const std::vector<std::string>& labels);
/// Z_{2N} acting on Z_N by a . y = y + (a mod N).
ActionGroupoid cyclic_double_action(int n);
/// Z_m acting on the circle by rotations through multiples of 1/m of a turn times `step`.
ActionGroupoid rotation_circle(int m, double circumference, int cutoff, int step = 1);
/// Z_2 acting on the torus by v -> -v.
ActionGroupoid negation_torus(std::array<double, 2> circumferences, int cutoff);
/// Z_{m1} x Z_{m2} acting on the torus by translations through fractions 1/m_i.
ActionGroupoid translation_torus(std::array<int, 2> degrees, std::array<double, 2> circumferences, int cutoff);

}  // namespace orbi
