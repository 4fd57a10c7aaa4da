#pragma once

// Bitorsors (rho, Q, alpha) between finite groupoids: a carrier with a left
// Theta-action over rho and a right Xi-action over alpha.

#include <optional>
#include <string>
#include <vector>

#include "orbi/groupoid.hpp"

namespace orbi {

class Bitorsor {
 public:
  Bitorsor() = default;
  Bitorsor(FiniteGroupoid left, FiniteGroupoid right, std::vector<std::string> carrier, std::vector<int> rho,
           std::vector<int> alpha);

  std::string name;
  FiniteGroupoid left;   // Theta => X
  FiniteGroupoid right;  // Xi => Y
  std::vector<std::string> carrier;
  std::vector<int> rho, alpha;

  int size() const { return static_cast<int>(carrier.size()); }
  /// sigma . q, -1 when s(sigma) != rho(q) or unset.
  int act_left(int sigma, int q) const;
  /// q . tau, -1 when t(tau) != alpha(q) or unset.
  int act_right(int q, int tau) const;
  void set_left(int sigma, int q, int value);
  void set_right(int q, int tau, int value);

 private:
  // Indexed by q, aligned with left.out_of(rho[q]) and right.into(alpha[q]).
  std::vector<std::vector<int>> left_, right_;
};

enum class TorsorMode { generalized, bitorsor };

ValidationReport validate_generalized_hom(const Bitorsor& h, TorsorMode mode = TorsorMode::bitorsor);

/// Q = arrows of G, rho = target, alpha = source, both actions by composition.
Bitorsor identity_bitorsor(const FiniteGroupoid& g);
/// Z2 => * against Z_{2N} x| Z_N, carrier Z_{2N}.
Bitorsor a2_bitorsor(int n);
/// Swap the two sides, inverting the actions.
Bitorsor inverse(const Bitorsor& h);
/// (Q1 x_Y Q2) / Xi; throws when the middle groupoids differ.
Bitorsor compose_homs(const Bitorsor& h1, const Bitorsor& h2);
/// Same bitorsor with carrier point p renamed to perm[p] (actions conjugated).
Bitorsor relabel_carrier(const Bitorsor& h, const std::vector<int>& perm);

struct TwoMorphismResult {
  enum class Status { found, none, inconclusive } status = Status::none;
  std::vector<int> map;  // Q1 -> Q2
  long nodes = 0;
  std::string reason;
  bool found() const { return status == Status::found; }
};

TwoMorphismResult find_two_morphism(const Bitorsor& q1, const Bitorsor& q2, long node_cap = 1000000);
/// Orbits of the combined left/right action on the carrier.
std::vector<std::vector<int>> carrier_orbits(const Bitorsor& h);

/// Localization to covers; the result is a bitorsor between the Cech groupoids.
struct CechBitorsor {
  Bitorsor bitorsor;
  CechGroupoid left, right;
  std::vector<int> point, left_sheet, right_sheet;  // carrier element (q, a, i)
  int element(int q, int a, int i) const;
  std::vector<int> lookup;  // (q * left.num_sheets + a) * right.num_sheets + i
};

CechBitorsor localize_cech(const Bitorsor& phi, const CechCover& cover_x, const CechCover& cover_y);
/// Canonical G <-> Cech(G, cover) bitorsor with carrier {(arrow, sheet of its source)}.
CechBitorsor cech_bitorsor(const FiniteGroupoid& g, const CechCover& cover);

struct LocalLift {
  std::vector<int> domain;
  std::vector<int> image;  // aligned with domain
  bool intertwines = false;
  std::string detail;
  int apply(int q) const;
};

/// Lift of a local bisection through sigma in Theta acting on the left.
LocalLift lift_bisection(const Bitorsor& phi, int sigma, int q);
/// Lift of a local bisection through tau in Xi acting on the right.
LocalLift lift_bisection_right(const Bitorsor& phi, int tau, int q);

struct WeakEquivalencePair {
  FiniteGroupoid middle;
  std::vector<int> arrow_sigma, arrow_q, arrow_tau;  // arrow (sigma, q, tau): q -> sigma q tau
  std::vector<int> theta_object, theta_arrow;        // projection onto Theta
  std::vector<int> xi_object, xi_arrow;              // projection onto Xi (tau^-1)
  bool left_surjective = false, right_surjective = false;
  bool left_cartesian = false, right_cartesian = false;
  bool left_functor = false, right_functor = false;
  ValidationReport report;
  bool ok() const {
    return report.valid() && left_surjective && right_surjective && left_cartesian && right_cartesian &&
           left_functor && right_functor;
  }
};

WeakEquivalencePair weak_equivalence_pair(const Bitorsor& phi);

struct FibreBlock {
  std::vector<int> points;
  bool rho_constant = false;
  int rho_value = -1;
  int theta_isotropy_rank = 0;
};

struct FibrePartitionReport {
  int y = -1;
  std::vector<int> fibre;
  int xi_isotropy_rank = 0;
  std::vector<FibreBlock> blocks;
  bool consistent() const;
};

FibrePartitionReport fibre_partition_report(const Bitorsor& phi, int y);

/// Bitorsor between a free action groupoid (sampled on its grid for Fourier
/// bases) and the unit groupoid on its orbits; rho = id, alpha = orbit index.
Bitorsor covering_bitorsor(const ActionGroupoid& g);

}  // namespace orbi
