#pragma once

// Structure cocycles on (Cech) groupoids, their transport through bitorsors,
// coboundary search and the bundles they glue.

#include <string>
#include <vector>

#include "orbi/exact.hpp"
#include "orbi/groupoid.hpp"
#include "orbi/morita.hpp"

namespace orbi {

/// Arrow-indexed invertible k x k matrices with g(tau) g(sigma) = g(tau sigma).
struct Cocycle {
  FiniteGroupoid groupoid;
  int rank = 1;
  std::vector<ExactMatrix> entries;
};

/// Throws Error on a rank mismatch; unit arrows must carry the identity.
ValidationReport validate_cocycle(const Cocycle& g);

Cocycle constant_cocycle(const FiniteGroupoid& g, int rank);
/// Rank-1 cocycle sigma -> chi(action element of sigma) on an action groupoid presentation.
Cocycle character_cocycle(const FiniteGroupoid& g, const std::vector<GaussRat>& chi);
/// Regular permutation representation of Z2 => * (rank 2).
Cocycle permutation_cocycle_z2(const FiniteGroupoid& z2);
/// Differentials of the isometries: sign times the identity on R^n.
Cocycle tangent_cocycle(const ActionGroupoid& g);

/// Pull a cocycle on G back to Cech(G, cover) along the projection.
Cocycle restrict_to_cech(const Cocycle& g, const CechGroupoid& cech);

/// One carrier point over every object of the right-hand (Cech) groupoid.
struct SectionFamily {
  std::vector<int> point;
};

/// beta(i, y) = (base_section[y], sheet_of[i], i); throws when the point is missing.
SectionFamily make_sections(const CechBitorsor& phi, const std::vector<int>& base_section,
                            const std::vector<int>& left_sheet_for);

/// (phi_# g)(tau) = g(sigma), sigma the unique Theta-arrow with sigma . (beta(s tau) . tau^-1) = beta(t tau).
Cocycle induce_cocycle(const Bitorsor& phi, const Cocycle& g, const SectionFamily& beta);
Cocycle induce_cocycle(const CechBitorsor& phi, const Cocycle& g, const SectionFamily& beta);

struct CoboundaryResult {
  enum class Status { found, none, inconclusive } status = Status::none;
  std::vector<ExactMatrix> lambda;  // per object: g2(x -> x') = lambda(x') g1 lambda(x)^-1
  std::string reason;
  bool found() const { return status == Status::found; }
};

CoboundaryResult cohomologous(const Cocycle& g1, const Cocycle& g2);
/// g^lambda(sigma) = lambda(t sigma) g(sigma) lambda(s sigma)^-1.
Cocycle twist(const Cocycle& g, const std::vector<ExactMatrix>& lambda);

/// Equivariant bundle over a finite groupoid: fibre C^rank at every object and
/// rho(sigma): E_{s sigma} -> E_{t sigma}.  `sheet` records the Cech sheet
/// used as local trivialization at each object (0 for uncovered input).
struct ReconstructedBundle {
  FiniteGroupoid base;
  int rank = 1;
  std::vector<ExactMatrix> action;
  std::vector<int> sheet;
  Cocycle as_cocycle() const { return {base, rank, action}; }
};

/// Glue the local trivializations of a Cech cocycle into a bundle on the base groupoid.
ReconstructedBundle reconstruct(const Cocycle& g, const CechGroupoid& cech);
ReconstructedBundle bundle_from_cocycle(const Cocycle& g);

/// [Q x_X E] / Theta over Y, one representative (the smallest carrier point) per alpha-fibre.
ReconstructedBundle induced_bundle(const Bitorsor& phi, const ReconstructedBundle& xi);
/// Representatives used by induced_bundle, indexed by objects of Y.
std::vector<int> fibre_representatives(const Bitorsor& phi);

/// Basis (columns) of the invariant sections psi(t sigma) = rho(sigma) psi(s sigma);
/// row index = object * rank + component.
ExactMatrix invariant_sections(const ReconstructedBundle& b);

}  // namespace orbi
