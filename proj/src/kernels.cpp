#include "orbi/kernels.hpp"

#include <omp.h>

#include <algorithm>

#include "orbi/groupoid.hpp"

namespace orbi::kernels {

namespace {

void triples_for_inner(const FiniteGroupoid& g, int sigma, std::vector<Triple>& out) {
  const int x = g.target(sigma);
  for (int tau : g.out_of(x)) {
    const int ts = g.compose(tau, sigma);
    for (int rho : g.out_of(g.target(tau))) {
      const int rt = g.compose(rho, tau);
      const int left = ts < 0 ? -1 : g.compose(rho, ts);
      const int right = rt < 0 ? -1 : g.compose(rt, sigma);
      if (left < 0 || right < 0 || left != right) out.push_back({rho, tau, sigma});
    }
  }
}

}  // namespace

std::vector<Triple> associativity_violations(const FiniteGroupoid& g, Exec exec) {
  const int n = g.num_arrows();
  std::vector<std::vector<Triple>> per_inner(n);
  if (exec == Exec::serial) {
    for (int s = 0; s < n; ++s) triples_for_inner(g, s, per_inner[s]);
  } else {
#pragma omp parallel for schedule(dynamic, 16)
    for (int s = 0; s < n; ++s) triples_for_inner(g, s, per_inner[s]);
  }
  std::vector<Triple> out;
  for (auto& v : per_inner) {
    std::sort(v.begin(), v.end(), [](const Triple& a, const Triple& b) {
      return std::tie(a.middle, a.outer) < std::tie(b.middle, b.outer);
    });
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

std::vector<std::complex<double>> evaluate_modes(const std::vector<std::complex<double>>& coeffs,
                                                 const std::vector<double>& freqs,
                                                 const std::vector<double>& points, int dim, Exec exec) {
  const int modes = static_cast<int>(coeffs.size());
  const int npts = static_cast<int>(points.size()) / dim;
  std::vector<std::complex<double>> out(npts);
  auto one = [&](int p) {
    std::complex<double> acc = 0.0;
    for (int j = 0; j < modes; ++j) {
      if (coeffs[j] == 0.0) continue;
      double phase = 0.0;
      for (int d = 0; d < dim; ++d) phase += freqs[j * dim + d] * points[p * dim + d];
      acc += coeffs[j] * std::polar(1.0, phase);
    }
    out[p] = acc;
  };
  if (exec == Exec::serial) {
    for (int p = 0; p < npts; ++p) one(p);
  } else {
#pragma omp parallel for schedule(static)
    for (int p = 0; p < npts; ++p) one(p);
  }
  return out;
}

std::vector<double> block_eigenvalues(const std::vector<Eigen::MatrixXcd>& blocks, Exec exec) {
  const int nb = static_cast<int>(blocks.size());
  std::vector<int> offset(nb + 1, 0);
  for (int b = 0; b < nb; ++b) offset[b + 1] = offset[b] + static_cast<int>(blocks[b].rows());
  std::vector<double> out(offset[nb]);
  auto one = [&](int b) {
    if (blocks[b].rows() == 0) return;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(blocks[b], Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out[offset[b] + i] = es.eigenvalues()[i];
  };
  if (exec == Exec::serial) {
    for (int b = 0; b < nb; ++b) one(b);
  } else {
#pragma omp parallel for schedule(dynamic, 8)
    for (int b = 0; b < nb; ++b) one(b);
  }
  return out;
}

Eigen::MatrixXcd multiply(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, Exec exec) {
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(a.rows(), b.cols());
  const Eigen::Index rows = a.rows();
  auto row = [&](Eigen::Index i) {
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      const std::complex<double> aik = a(i, k);
      if (aik == 0.0) continue;
      for (Eigen::Index j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  };
  if (exec == Exec::serial) {
    for (Eigen::Index i = 0; i < rows; ++i) row(i);
  } else {
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < rows; ++i) row(i);
  }
  return c;
}

}  // namespace orbi::kernels
