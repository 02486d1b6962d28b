// Serial reference vs OpenMP kernels.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "raker/kernels.hpp"

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

constexpr std::size_t kDim = 10;

template <bool Parallel>
void BM_RfFeaturesBatch(benchmark::State& state) {
  const auto num = static_cast<std::size_t>(state.range(0));
  const std::size_t n = 256;
  const auto spectral = random_vector(num * kDim, 1);
  const auto xs = random_vector(n * kDim, 2);
  std::vector<double> out(n * 2 * num);
  for (auto _ : state) {
    if constexpr (Parallel) {
      raker::kernels::omp::rf_features_batch(spectral, kDim, xs, out);
    } else {
      raker::kernels::serial::rf_features_batch(spectral, kDim, xs, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}

template <bool Parallel>
void BM_KernelSum(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const raker::KernelSpec spec{raker::KernelFamily::Gaussian, 1.0, kDim};
  const auto centers = random_vector(m * kDim, 3);
  const auto alphas = random_vector(m, 4);
  const auto x = random_vector(kDim, 5);
  for (auto _ : state) {
    double s = Parallel ? raker::kernels::omp::kernel_sum(spec, centers, alphas, x)
                        : raker::kernels::serial::kernel_sum(spec, centers, alphas, x);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(m));
}

template <bool Parallel>
void BM_GramAccumulate(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const std::size_t n = 512;
  const auto z = random_vector(n * k, 6);
  const auto y = random_vector(n, 7);
  std::vector<double> gram(k * k), rhs(k);
  for (auto _ : state) {
    std::fill(gram.begin(), gram.end(), 0.0);
    std::fill(rhs.begin(), rhs.end(), 0.0);
    if constexpr (Parallel) {
      raker::kernels::omp::gram_accumulate(z, k, y, gram, rhs);
    } else {
      raker::kernels::serial::gram_accumulate(z, k, y, gram, rhs);
    }
    benchmark::DoNotOptimize(gram.data());
  }
}

}  // namespace

BENCHMARK(BM_RfFeaturesBatch<false>)->Arg(50)->Arg(400);
BENCHMARK(BM_RfFeaturesBatch<true>)->Arg(50)->Arg(400);
BENCHMARK(BM_KernelSum<false>)->Arg(1000)->Arg(20000);
BENCHMARK(BM_KernelSum<true>)->Arg(1000)->Arg(20000);
BENCHMARK(BM_GramAccumulate<false>)->Arg(100)->Arg(400);
BENCHMARK(BM_GramAccumulate<true>)->Arg(100)->Arg(400);

BENCHMARK_MAIN();
