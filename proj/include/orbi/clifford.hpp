#pragma once

// Complex Clifford modules for n <= 2 and spin lifts of catalog isometries.
//
// Pinned conventions:
//   n = 1: gamma^1 = (1) on C.
//   n = 2: gamma^1 = [[0, 1], [1, 0]], gamma^2 = [[0, -i], [i, 0]],
//          omega = -i gamma^1 gamma^2 = [[1, 0], [0, -1]].
// A group element g acting by v -> sign v + shift acts on spinor modes as
//   (U_g psi)(v) = h(g) S(g) psi(g^-1 v),
// with S(g) = 1 for sign = +1 and S(g) = gamma^1 gamma^2 for the half turn.

#include <optional>
#include <string>
#include <vector>

#include "orbi/exact.hpp"
#include "orbi/fourier.hpp"
#include "orbi/groupoid.hpp"

namespace orbi {

struct CliffordRep {
  int n = 1;
  std::vector<ExactMatrix> gamma;
  std::optional<ExactMatrix> chirality;
  int spin_dim() const { return gamma.empty() ? 0 : gamma[0].rows(); }
};

/// Throws Error for n outside {1, 2}; relations are verified before returning.
CliffordRep build_clifford(int n);
ValidationReport validate_clifford(const CliffordRep& rep);

/// U_g e_k = h(g) exp(2 pi i turn) S(g) e_mode.
struct ModeImage {
  Mode mode;
  Rational turn;
};

/// Throws Error when the image is not a lattice mode (negation with a nonzero twist).
ModeImage mode_image(const Isometry& iso, int dim, const Twist& delta, const Mode& k);
/// S(g) for the pinned convention.
ExactMatrix spin_part(const Isometry& iso, const CliffordRep& rep);

struct SpinLift {
  Twist delta{Rational(0), Rational(0)};
  std::vector<GaussRat> twist;      // h per group element
  std::vector<ExactMatrix> matrix;  // rho_s(g) = h(g) S(g)
  std::vector<int> generators;
  std::string label;
};

/// Trivial twist on every element (valid or not; see validate_spin_lift).
SpinLift untwisted_lift(const ActionGroupoid& g, const CliffordRep& rep, const Twist& delta);

/// Cocycle law of the full spinor action (phases included) and the adjoint
/// condition Ad(rho_s(g)) gamma^d = sign(g) gamma^d.
ValidationReport validate_spin_lift(const ActionGroupoid& g, const CliffordRep& rep, const SpinLift& lift);

/// Every twist assignment on a generating set, extended multiplicatively, that
/// yields a valid lift.  Twist values are +-1, or +-1, +-i with fourth_roots.
std::vector<SpinLift> spin_lift_search(const ActionGroupoid& g, const CliffordRep& rep, const Twist& delta,
                                       bool fourth_roots = false);

/// Greedy generating set of a finite group (smallest elements first).
std::vector<int> generating_set(const FiniteGroup& g);

}  // namespace orbi
