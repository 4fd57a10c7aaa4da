#pragma once

// Truncated Fourier mode spaces on the flat circle and torus, sample grids,
// exact DFTs for band-limited data and multiplication operators.

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "orbi/exact.hpp"
#include "orbi/groupoid.hpp"

namespace orbi {

using cplx = std::complex<double>;
using SparseC = Eigen::SparseMatrix<cplx>;
using Mode = std::array<int, 2>;

/// Modes with |k_d| <= cutoff on each of dim axes; index is row-major over k_1, k_2.
struct ModeSet {
  int dim = 1;
  int cutoff = 0;
  int width() const { return 2 * cutoff + 1; }
  int size() const { return dim == 1 ? width() : width() * width(); }
  int index(const Mode& k) const;  // -1 outside
  Mode mode(int idx) const;
  int sup_norm(int idx) const;
};

/// Spin twist per axis as an exact rational (0 or 1/2 in the catalog).
using Twist = std::array<Rational, 2>;

/// Geometry of a flat circle (dim 1) or torus (dim 2).
struct FlatGeometry {
  int dim = 1;
  std::array<double, 2> circumference{0.0, 0.0};
  double volume() const { return dim == 1 ? circumference[0] : circumference[0] * circumference[1]; }
};

/// exp(2 pi i t), exact on quarter turns.
cplx turn_phase(const Rational& t);
Eigen::MatrixXcd to_eigen(const ExactMatrix& m);

FlatGeometry geometry_of(const BaseSpace& base);
int cutoff_of(const BaseSpace& base);

/// A band-limited (possibly spin-twisted) function: sum_k c_k exp(i <(k + delta) 2 pi / L, x>).
struct ModeFunction {
  FlatGeometry geom;
  ModeSet modes;
  Twist delta{Rational(0), Rational(0)};
  std::vector<cplx> coeffs;

  static ModeFunction zero(const FlatGeometry& g, int cutoff, Twist delta = {Rational(0), Rational(0)});
  cplx& at(const Mode& k) { return coeffs[modes.index(k)]; }
  cplx at(const Mode& k) const;
  /// Highest |k_d| with a nonzero coefficient (|c| > tol).
  int degree(double tol = 0.0) const;
};

/// Points of the uniform grid with n points per axis, row-major, as coordinates.
std::vector<double> grid_points(const FlatGeometry& g, std::array<int, 2> n);
/// Evaluate on a grid (parallel kernel with serial reference).
std::vector<cplx> evaluate(const ModeFunction& f, std::array<int, 2> n);
/// Evaluate at arbitrary points (dim coordinates per point).
std::vector<cplx> evaluate_at(const ModeFunction& f, const std::vector<double>& points);
/// Twisted DFT of grid values; exact when the band limit is below half the grid.
ModeFunction from_grid(const FlatGeometry& g, std::array<int, 2> n, const std::vector<cplx>& values, int cutoff,
                       Twist delta = {Rational(0), Rational(0)});

ModeFunction multiply(const ModeFunction& a, const ModeFunction& b, int cutoff);
/// Pointwise complex conjugate; the twist changes sign.
ModeFunction conjugate(const ModeFunction& f);
/// f o iso, evaluated at unreduced coordinates so twisted data stays consistent.
ModeFunction compose(const ModeFunction& f, const Isometry& iso);
ModeFunction scaled(const ModeFunction& f, cplx s);
ModeFunction add(const ModeFunction& a, const ModeFunction& b);
/// Partial derivative along axis d.
ModeFunction derivative(const ModeFunction& f, int d);
double max_abs_diff(const ModeFunction& a, const ModeFunction& b);

/// Multiplication by an untwisted function on the spinor space modes x C^spin_dim.
SparseC multiplication_operator(const ModeFunction& f, const ModeSet& modes, int spin_dim);

/// Indices (mode index * spin_dim + component) of the interior band sup|k| <= cutoff - buffer.
std::vector<int> interior_indices(const ModeSet& modes, int spin_dim, int buffer);
Eigen::MatrixXcd restrict_dense(const SparseC& m, const std::vector<int>& rows, const std::vector<int>& cols);
double operator_norm(const Eigen::MatrixXcd& m);
double frobenius(const SparseC& m);

}  // namespace orbi
