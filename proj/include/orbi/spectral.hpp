#pragma once

// Truncated Dirac operators on spinor modes, the lifted group action,
// invariant projectors, orbifold integration and the spectral-triple checks.

#include <optional>
#include <string>
#include <vector>

#include "orbi/clifford.hpp"
#include "orbi/fourier.hpp"
#include "orbi/groupoid.hpp"

namespace orbi {

struct DiracSpec {
  ActionGroupoid groupoid;
  CliffordRep rep;
  SpinLift lift;
  int cutoff = 8;

  FlatGeometry geometry() const { return geometry_of(groupoid.base); }
  int spin_dim() const { return rep.spin_dim(); }
  ModeSet modes() const { return {rep.n, cutoff}; }
};

/// Validates the lift and the cutoff; throws Error otherwise.
DiracSpec make_dirac_spec(const ActionGroupoid& g, const SpinLift& lift, int cutoff);
DiracSpec with_cutoff(const DiracSpec& spec, int cutoff);

struct TruncatedDirac {
  FlatGeometry geom;
  ModeSet modes;
  int spin_dim = 1;
  Twist delta{Rational(0), Rational(0)};
  std::vector<Eigen::MatrixXcd> blocks;  // per mode, spin_dim x spin_dim
  SparseC matrix;
  double hermiticity_residual = 0.0;
  double invariance_residual = 0.0;

  std::vector<int> interior(int buffer) const { return interior_indices(modes, spin_dim, buffer); }
};

/// Throws Error("lift/action mismatch ...") when the invariance residual exceeds 1e-12.
TruncatedDirac assemble_dirac(const DiracSpec& spec);
/// Lifted action U_g on spinor modes, one sparse matrix per group element.
std::vector<SparseC> action_matrices(const DiracSpec& spec);
SparseC invariant_projector(const DiracSpec& spec);

/// Modes with |k_d + delta_d| <= box_d on every axis.
using ModeBox = std::array<double, 2>;
ModeBox uniform_box(double k);
std::vector<int> box_modes(const ModeSet& modes, const Twist& delta, const ModeBox& box);

/// Sorted eigenvalues of D on the invariant spinors supported in the box, computed per orbit of modes.
std::vector<double> invariant_spectrum(const DiracSpec& spec, const TruncatedDirac& d, const ModeBox& box);
/// Orthonormal basis (columns) of the invariant spinors in the box; rows index the full spinor-mode space.
Eigen::MatrixXcd invariant_basis(const DiracSpec& spec, const ModeBox& box);

// Orbifold integration.

struct Chart {
  std::string name;
  std::vector<int> points;   // grid (or object) indices of U_a
  std::vector<double> rho;   // partition-of-unity value per point
  int group_order = 1;       // |G_a^a|
  int principal_rank = 1;    // k_a
  std::vector<int> stabilizer;  // |Stab_{G_a}(x)| per point; empty means k_a everywhere
};

struct OrbifoldMeasure {
  std::vector<double> volume;              // nu per grid point (counting for finite bases)
  std::vector<std::vector<int>> orbits;    // groupoid orbits of grid points
  std::vector<Chart> charts;
};

/// max over orbits of |sum_a sum_{x in orbit cap U_a} rho_a(x) |Stab_a(x)| / |G_a| - 1|: every
/// orbit is covered once after dividing out the chart groups.
double partition_defect(const OrbifoldMeasure& m);
/// sum_a (k_a / |G_a^a|) int_{U_a} rho_a f nu; throws when the partition defect exceeds 1e-10.
cplx orbifold_integral(const OrbifoldMeasure& m, const std::vector<cplx>& values);

/// One chart covering the whole grid with the full group.
OrbifoldMeasure single_chart_measure(const ActionGroupoid& g);
/// Two full charts with weights rho and 1 - rho (rho invariant, real).
OrbifoldMeasure two_chart_measure(const ActionGroupoid& g, const ModeFunction& rho);
/// One chart per orbit representative block: the half-open fundamental domain with the ineffective kernel.
OrbifoldMeasure fundamental_domain_measure(const ActionGroupoid& g);
/// Finite groupoid: one chart per object with its isotropy group, counting measure.
OrbifoldMeasure finite_measure(const FiniteGroupoid& g);

// Coverings and induced operators.

/// Free quotient by rotations or translations; the downstairs circle/torus has circumference L_d / degree_d.
struct Covering {
  ActionGroupoid upstairs;
  std::array<int, 2> degree{1, 1};
  FlatGeometry up, down;
};

/// Throws Error("not an etale-structure-preserving covering ...") for non-free or orientation-reversing actions.
Covering covering_of(const ActionGroupoid& g);

struct InducedDirac {
  Twist delta_down{Rational(0), Rational(0)};
  bool delta_found = false;
  TruncatedDirac downstairs;
  std::vector<double> up_spectrum, down_spectrum;
  double spectrum_gap = 0.0;              // max elementwise difference
  Eigen::MatrixXcd unitary;               // downstairs box coefficients x upstairs invariant basis
  double unitarity_residual = 0.0;        // |U* U - 1|
  double conjugation_residual = 0.0;      // |U D U* - D_#| on the box
  double representative_defect = 0.0;     // two fibre representatives
  bool matched() const { return delta_found && spectrum_gap <= 1e-9; }
};

/// box = cutoff - buffer; build_unitary=false skips U (large tori).
InducedDirac induced_dirac(const DiracSpec& spec, int buffer, bool build_unitary = true);

/// Spin structures on the quotient that reproduce the invariant spectrum of each upstairs lift.
struct SpinCorrespondence {
  struct Entry {
    Twist delta_up;
    std::string lift_label;
    std::optional<Twist> delta_down;
  };
  std::vector<Entry> upstairs;
  std::vector<Twist> downstairs;  // one trivial-group lift per twist
  bool bijective = false;
  bool tangent_cocycles_agree = false;
  std::string detail;
};

SpinCorrespondence spin_correspondence(const ActionGroupoid& g, int cutoff, int buffer);

// Spectral triple checks.

/// Element of the (truncated) convolution algebra of an action groupoid:
/// one band-limited function per group element, pi(f) = sum_g U_g M(F_g).
/// Functions on the base are generators supported on the identity.
struct Generator {
  std::string name;
  std::vector<ModeFunction> parts;
  int degree() const;
};

Generator function_generator(const ActionGroupoid& g, const std::string& name, const ModeFunction& f);
SparseC represent(const DiracSpec& spec, const Generator& f);
/// Sum_g U_g (-i) sum_d gamma^d M(d_d F_g): the first-order symbol of [D, pi(f)].
SparseC symbol_operator(const DiracSpec& spec, const Generator& f);

struct GeneratorReport {
  std::string name;
  int buffer = 2;
  double norm = 0.0, norm_double = 0.0, drift = 0.0;
  double symbol_residual = 0.0;
  double projector_residual = 0.0;
  std::optional<double> chirality_commutator;
};

struct SpectralTripleReport {
  int dimension = 1;
  int cutoff = 0;
  std::vector<double> eigenvalues;  // invariant spectrum on the interior band
  double hermiticity_residual = 0.0;
  double invariance_residual = 0.0;
  double projector_idempotency = 0.0;
  double projector_commutator = 0.0;
  std::vector<GeneratorReport> generators;
  double growth_exponent = 0.0;
  std::optional<bool> chirality_square_exact;
  std::optional<double> chirality_anticommutator;
  double divergence_residual = 0.0;
  std::vector<std::string> notes;
};

/// Norm estimate: dense SVD for small restrictions, power iteration otherwise.
double band_norm(const SparseC& m, const std::vector<int>& rows, const std::vector<int>& cols);
/// Least-squares slope of log N(lambda) against log lambda on the upper three quarters of (0, lambda_max].
double counting_exponent(const std::vector<double>& eigenvalues, double lambda_max);
/// max |<D psi, psi'> - <psi, D psi'>| over `samples` random invariant pairs, orbifold L2 normalized.
double divergence_residual(const DiracSpec& spec, int buffer, int samples, unsigned seed);

SpectralTripleReport check_spectral_triple(const DiracSpec& spec, const std::vector<Generator>& generators,
                                           int buffer = 2);

}  // namespace orbi
