#pragma once

// Convolution algebras with the counting Haar system on target fibres.
//
// Product and representation:
//   (f1 * f2)(sigma) = sum_{tau kappa = sigma} f1(tau) f2(kappa)
//   (f . psi)_x      = sum_{sigma in into(x)} f(sigma) rho(sigma) psi(s sigma)
// so that (f1 * f2) . psi = f1 . (f2 . psi).  For an action groupoid with
// elements stored as one function per group element,
//   (f1 * f2)_g(y) = sum_{ab = g} F1_a(b . y) F2_b(y),   pi(f) = sum_g U_g M(F_g).

#include <optional>
#include <string>
#include <vector>

#include "orbi/cocycle.hpp"
#include "orbi/spectral.hpp"
#include "orbi/transport.hpp"

namespace orbi {

/// Finitely supported function on the arrows of a finite groupoid.
using ArrowFunction = std::vector<GaussRat>;

ArrowFunction arrow_delta(const FiniteGroupoid& g, int arrow, const GaussRat& value = GaussRat(1));
/// Sum of the unit-arrow deltas.
ArrowFunction convolution_unit(const FiniteGroupoid& g);
/// Throws Error when either argument does not live on g.
ArrowFunction convolve(const FiniteGroupoid& g, const ArrowFunction& f1, const ArrowFunction& f2);
/// Sections stored object-major as in invariant_sections.
FiniteValues act(const ReconstructedBundle& b, const ArrowFunction& f, const FiniteValues& psi);

/// Generator supported on one group element.
Generator element_generator(const ActionGroupoid& g, const std::string& name, int element, const ModeFunction& f);
Generator convolution_unit(const ActionGroupoid& g, const FlatGeometry& geom, int cutoff);
Generator convolve(const ActionGroupoid& g, const Generator& f1, const Generator& f2, int cutoff);
/// pi(f) psi on spinor modes; throws Error when deg f + deg psi exceeds the cutoff.
Eigen::VectorXcd act(const DiracSpec& spec, const Generator& f, const Eigen::VectorXcd& psi);
/// max |pi(f1 * f2) - pi(f1) pi(f2)| on the interior band sup|k| <= cutoff - buffer.
double representation_defect(const DiracSpec& spec, const Generator& f1, const Generator& f2, int buffer);

struct FaithfulnessResult {
  bool faithful = true;
  bool effective = true;
  int kernel_dimension = 0;
  std::vector<std::string> coordinates;          // arrow labels or "(g, k)" pairs
  std::vector<std::vector<GaussRat>> kernel;     // basis of the kernel in those coordinates
  std::optional<std::vector<GaussRat>> witness;  // a two-term witness when one exists
  std::string witness_text;
  bool exact = true;
  bool agrees_with_effectiveness() const { return faithful == effective; }
};

/// Kernel of f -> (f . -) as a linear map on arrow functions (exact).
FaithfulnessResult faithfulness_probe(const ReconstructedBundle& b);
/// Kernel of (F_g) -> sum_g U_g M(F_g) for band-limited F_g of degree <= band on modes up to cutoff.
/// Exact when every phase is a quarter turn, rank-revealing LU otherwise.
FaithfulnessResult faithfulness_probe(const ActionGroupoid& g, const FourierBundle& b, int band, int cutoff);

/// check_spectral_triple with the convolution representation; flags non-effective groupoids.
SpectralTripleReport convolution_triple_report(const DiracSpec& spec, const std::vector<Generator>& generators,
                                               int buffer = 2);

}  // namespace orbi
