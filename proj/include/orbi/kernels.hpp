#pragma once

// Data-parallel inner loops.  Every kernel has a serial reference path that
// the tests compare against and the benchmark target times.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace orbi {
class FiniteGroupoid;
}

namespace orbi::kernels {

enum class Exec { serial, parallel };

struct Triple {
  int outer, middle, inner;  // compose(outer, compose(middle, inner))
  friend bool operator==(const Triple&, const Triple&) = default;
};

/// Composable triples on which associativity fails (or an entry is missing),
/// sorted lexicographically by (inner, middle, outer).
std::vector<Triple> associativity_violations(const FiniteGroupoid& g, Exec exec = Exec::parallel);

/// Evaluate sum_j c_j exp(i <freq_j, x_p>) at every point; frequencies are
/// given per mode as `dim` consecutive doubles, points likewise.
std::vector<std::complex<double>> evaluate_modes(const std::vector<std::complex<double>>& coeffs,
                                                 const std::vector<double>& freqs,
                                                 const std::vector<double>& points, int dim,
                                                 Exec exec = Exec::parallel);

/// Eigenvalues of a list of small Hermitian blocks, concatenated in block order
/// (ascending within each block).
std::vector<double> block_eigenvalues(const std::vector<Eigen::MatrixXcd>& blocks, Exec exec = Exec::parallel);

/// Dense matrix product, row-parallel.
Eigen::MatrixXcd multiply(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, Exec exec = Exec::parallel);

}  // namespace orbi::kernels
