#pragma once

// Invariant functions, sections, forms, connections and inner products, and
// their transport phi_# through a bitorsor (finite flavor) or through the
// quotient covering of a free translation action (Fourier flavor).
//
// Fourier forms and connections are written in angle coordinates
// theta_d = 2 pi x_d / L_d.  Under an m_d-fold quotient theta'_d = m_d theta_d,
// so a dtheta_d component scales by 1/m_d and a d/dtheta_d component by m_d.

#include <optional>
#include <string>
#include <vector>

#include "orbi/clifford.hpp"
#include "orbi/cocycle.hpp"
#include "orbi/fourier.hpp"
#include "orbi/morita.hpp"
#include "orbi/spectral.hpp"

namespace orbi {

// Finite flavor.  Functions are values per object; sections of a rank-k
// bundle are stored object-major (object * k + component).

using FiniteValues = std::vector<GaussRat>;

/// First arrow sigma with f(t sigma) != f(s sigma), if any.
std::optional<int> invariance_witness(const FiniteGroupoid& g, const FiniteValues& f);
/// First arrow sigma with psi(t sigma) != rho(sigma) psi(s sigma), if any.
std::optional<int> invariance_witness(const ReconstructedBundle& b, const FiniteValues& psi);

/// (phi_# f)(y) = f(rho(q)) for q in alpha^-1(y).  Throws Error naming the arrow for non-invariant f.
FiniteValues pushforward_function(const Bitorsor& phi, const FiniteValues& f);
/// Inverse: (A f')(x) = f'(alpha(q)) for q in rho^-1(x).
FiniteValues pullback_function(const Bitorsor& phi, const FiniteValues& f);

/// Section of induced_bundle(phi, e): psi'(y) = [rep(y), psi(rho(rep(y)))].
FiniteValues pushforward_section(const Bitorsor& phi, const ReconstructedBundle& e, const FiniteValues& psi);
/// A_phi: psi(x) = e(sigma) psi'(alpha(q)) where q = sigma . rep(alpha(q)).
FiniteValues pullback_section(const Bitorsor& phi, const ReconstructedBundle& e, const FiniteValues& psi);

FiniteValues multiply(const FiniteValues& f, const FiniteValues& psi, int rank);

/// Constant standard Hermitian form times a positive weight per object.
struct FiniteInnerProduct {
  std::vector<Rational> weight;
};

/// Reports arrows where (e(sigma) u, e(sigma) v)_t != (u, v)_s.
ValidationReport validate_inner_product(const ReconstructedBundle& e, const FiniteInnerProduct& ip);
FiniteInnerProduct induce_inner_product(const Bitorsor& phi, const FiniteInnerProduct& ip);
/// Pointwise pairing (psi1, psi2)_x, conjugate-linear in the first slot.
FiniteValues pairing(const FiniteInnerProduct& ip, int rank, const FiniteValues& psi1, const FiniteValues& psi2);

// Fourier flavor.

/// Equivariant bundle over an action groupoid on a flat base: fibre C^rank,
/// spin twist delta, and (U_g psi)(v) = rho(g) psi(g^-1 v).
struct FourierBundle {
  int rank = 1;
  Twist delta{Rational(0), Rational(0)};
  std::vector<ExactMatrix> rho;
};

FourierBundle trivial_bundle(const ActionGroupoid& g, int rank = 1);
FourierBundle spinor_bundle(const ActionGroupoid& g, const CliffordRep& rep, const SpinLift& lift);

/// One band-limited function per fibre component.
using FieldSection = std::vector<ModeFunction>;

FieldSection act_element(const ActionGroupoid& g, const FourierBundle& b, int element, const FieldSection& psi);
/// (1/|G|) sum_g U_g psi.
FieldSection average(const ActionGroupoid& g, const FourierBundle& b, const FieldSection& psi);
ModeFunction average(const ActionGroupoid& g, const ModeFunction& f);

struct InvarianceCheck {
  double defect = 0.0;  // max coefficient of U_g psi - psi over g
  int witness = -1;     // group element attaining it
  bool invariant(double tol = 1e-10) const { return defect <= tol; }
};

InvarianceCheck check_invariance(const ActionGroupoid& g, const FourierBundle& b, const FieldSection& psi);
InvarianceCheck check_invariance(const ActionGroupoid& g, const ModeFunction& f);

double max_abs_diff(const FieldSection& a, const FieldSection& b);
FieldSection multiply(const ModeFunction& f, const FieldSection& psi, int cutoff);

/// phi_# for the quotient covering of a free translation action.  The section
/// beta is the fundamental domain [0, L_d / m_d); the downstairs twist is
/// exp(2 pi i delta'_d) = rho(g_d) for the generator g_d translating by L_d / m_d.
struct CoveringTransport {
  Covering covering;
  FourierBundle bundle;
  Twist delta_down{Rational(0), Rational(0)};
  std::vector<int> axis_generator;  // g_d per axis
};

/// Throws Error when the action is not a free translation action or rho(g_d) is not scalar.
CoveringTransport make_transport(const ActionGroupoid& g, const FourierBundle& b);

/// Downstairs band large enough for every invariant mode of an upstairs band.
int down_cutoff(const CoveringTransport& t, int up_cutoff);

ModeFunction pushforward_function(const CoveringTransport& t, const ModeFunction& f);
ModeFunction pullback_function(const CoveringTransport& t, const ModeFunction& f, int up_cutoff);
FieldSection pushforward_section(const CoveringTransport& t, const FieldSection& psi);
FieldSection pullback_section(const CoveringTransport& t, const FieldSection& psi, int up_cutoff);

/// Degree 0, 1 or 2 form; components in the basis dtheta_I (I increasing).
struct InvariantForm {
  int degree = 0;
  std::vector<ModeFunction> components;
};

InvariantForm zero_form(const ModeFunction& f);
InvariantForm exterior_derivative(const InvariantForm& w);
/// Phi_g^* w = w for every group element, up to tol on coefficients.
InvarianceCheck check_invariance(const ActionGroupoid& g, const InvariantForm& w);
InvariantForm pushforward_form(const CoveringTransport& t, const InvariantForm& w);
InvariantForm pullback_form(const CoveringTransport& t, const InvariantForm& w, int up_cutoff);
double max_abs_diff(const InvariantForm& a, const InvariantForm& b);
/// f0 df1 as a one-form.
InvariantForm product_form(const ModeFunction& f0, const InvariantForm& df1, int cutoff);

/// Local pullbacks (rho o beta)^* w through the fundamental-domain branch and the
/// branch translated by each group element, compared on the sample grid.
double branch_overlap_defect(const CoveringTransport& t, const InvariantForm& w);

/// d + i A with A = sum_d A_d dtheta_d; A_d is rank x rank, entry (i, j) at i * rank + j.
struct FourierConnection {
  int rank = 1;
  std::vector<std::vector<ModeFunction>> potential;
};

/// V = sum_d v_d d/dtheta_d.
struct VectorField {
  std::vector<ModeFunction> coeffs;
};

FourierConnection flat_connection(const FlatGeometry& geom, int rank, int cutoff);
/// nabla_V psi, truncated to `cutoff`.
FieldSection covariant_derivative(const FourierConnection& c, const VectorField& v, const FieldSection& psi,
                                  int cutoff);
/// V(f) = sum_d v_d df/dtheta_d.
ModeFunction directional_derivative(const VectorField& v, const ModeFunction& f, int cutoff);
/// The potential must be invariant (modes multiples of the translation orders).
InvarianceCheck check_invariance(const ActionGroupoid& g, const FourierConnection& c);
/// Throws Error for a non-invariant connection.
FourierConnection induce_connection(const CoveringTransport& t, const FourierConnection& c);
VectorField pushforward_field(const CoveringTransport& t, const VectorField& v);
/// |nabla_V (f psi) - V(f) psi - f nabla_V psi| on coefficients.
double leibniz_defect(const FourierConnection& c, const VectorField& v, const ModeFunction& f,
                      const FieldSection& psi);

/// Constant weight times the standard Hermitian form on C^rank.
struct FourierInnerProduct {
  double weight = 1.0;
};

/// sum_i conj(psi1_i) psi2_i times the weight; the result is untwisted.
ModeFunction pairing(const FourierInnerProduct& ip, const FieldSection& psi1, const FieldSection& psi2);
/// Invariant iff every rho(g) is unitary.
ValidationReport validate_inner_product(const FourierBundle& b, const FourierInnerProduct& ip);

}  // namespace orbi
