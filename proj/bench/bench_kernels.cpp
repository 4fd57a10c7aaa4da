// Serial reference path against the OpenMP path for each kernel.

#include <benchmark/benchmark.h>

#include <random>

#include "orbi/groupoid.hpp"
#include "orbi/kernels.hpp"

using namespace orbi;
using kernels::Exec;

namespace {

Exec mode(const benchmark::State& s) { return s.range(1) ? Exec::parallel : Exec::serial; }

void BM_associativity(benchmark::State& s) {
  const FiniteGroupoid g = cyclic_double_action(static_cast<int>(s.range(0))).to_finite();
  for (auto _ : s) benchmark::DoNotOptimize(kernels::associativity_violations(g, mode(s)));
}

void BM_evaluate_modes(benchmark::State& s) {
  const int modes = static_cast<int>(s.range(0));
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::complex<double>> coeffs(2 * modes + 1);
  std::vector<double> freqs(coeffs.size());
  for (size_t j = 0; j < coeffs.size(); ++j) {
    coeffs[j] = {u(rng), u(rng)};
    freqs[j] = static_cast<double>(j) - modes;
  }
  std::vector<double> points(8 * modes);
  for (size_t p = 0; p < points.size(); ++p) points[p] = 6.283185307179586 * p / points.size();
  for (auto _ : s) benchmark::DoNotOptimize(kernels::evaluate_modes(coeffs, freqs, points, 1, mode(s)));
}

void BM_block_eigenvalues(benchmark::State& s) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Eigen::MatrixXcd> blocks(s.range(0));
  for (auto& b : blocks) {
    Eigen::MatrixXcd m(8, 8);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) m(i, j) = {u(rng), u(rng)};
    b = m + m.adjoint();
  }
  for (auto _ : s) benchmark::DoNotOptimize(kernels::block_eigenvalues(blocks, mode(s)));
}

void BM_multiply(benchmark::State& s) {
  const int n = static_cast<int>(s.range(0));
  const Eigen::MatrixXcd a = Eigen::MatrixXcd::Random(n, n), b = Eigen::MatrixXcd::Random(n, n);
  for (auto _ : s) benchmark::DoNotOptimize(kernels::multiply(a, b, mode(s)));
}

}  // namespace

BENCHMARK(BM_associativity)->ArgsProduct({{3, 6}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_evaluate_modes)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_block_eigenvalues)->ArgsProduct({{256, 2048}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_multiply)->ArgsProduct({{128, 384}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
