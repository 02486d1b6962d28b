// Serial reference vs OpenMP kernels.
#include <doctest.h>
#include <omp.h>

#include <cmath>
#include <random>
#include <vector>

#include "raker/kernels.hpp"
#include "test_util.hpp"

using namespace raker;
using raker::testing::normal_vector;

TEST_CASE("rf_features: OpenMP matches serial bit for bit") {
  std::mt19937_64 rng(1);
  const std::size_t d = 7;
  const std::size_t num = 300;
  const auto spectral = normal_vector(rng, num * d);
  const auto x = normal_vector(rng, d);
  std::vector<double> a(2 * num), b(2 * num);
  kernels::serial::rf_features(spectral, d, x, a);
  kernels::omp::rf_features(spectral, d, x, b);
  CHECK(a == b);
}

TEST_CASE("rf_features_batch: OpenMP matches serial for several thread counts") {
  std::mt19937_64 rng(2);
  const std::size_t d = 4, num = 64, n = 101;
  const auto spectral = normal_vector(rng, num * d);
  const auto xs = normal_vector(rng, n * d);
  std::vector<double> ref(n * 2 * num);
  kernels::serial::rf_features_batch(spectral, d, xs, ref);
  for (int threads : {1, 2, 3, 8}) {
    omp_set_num_threads(threads);
    std::vector<double> out(ref.size());
    kernels::omp::rf_features_batch(spectral, d, xs, out);
    CHECK(out == ref);
  }
}

TEST_CASE("kernel_sum: OpenMP agrees with serial and does not depend on thread count") {
  std::mt19937_64 rng(3);
  const std::size_t d = 5, m = 3000;
  const KernelSpec spec{KernelFamily::Gaussian, 2.0, d};
  const auto centers = normal_vector(rng, m * d);
  const auto alphas = normal_vector(rng, m);
  const auto x = normal_vector(rng, d);
  const double ref = kernels::serial::kernel_sum(spec, centers, alphas, x);
  omp_set_num_threads(1);
  const double one = kernels::omp::kernel_sum(spec, centers, alphas, x);
  for (int threads : {2, 4, 7}) {
    omp_set_num_threads(threads);
    CHECK(kernels::omp::kernel_sum(spec, centers, alphas, x) == one);
  }
  CHECK(one == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("gram_accumulate: OpenMP matches serial bit for bit") {
  std::mt19937_64 rng(4);
  const std::size_t n = 120, k = 30;
  const auto z = normal_vector(rng, n * k);
  const auto y = normal_vector(rng, n);
  std::vector<double> g1(k * k, 0.0), r1(k, 0.0), g2(k * k, 0.0), r2(k, 0.0);
  kernels::serial::gram_accumulate(z, k, y, g1, r1);
  omp_set_num_threads(3);
  kernels::omp::gram_accumulate(z, k, y, g2, r2);
  CHECK(g1 == g2);
  CHECK(r1 == r2);
  // symmetric
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) CHECK(g1[i * k + j] == g1[j * k + i]);
  }
}

TEST_CASE("dispatching wrappers agree with the serial reference") {
  std::mt19937_64 rng(5);
  const std::size_t d = 3, num = 20000;  // above the parallel threshold
  const auto spectral = normal_vector(rng, num * d);
  const auto x = normal_vector(rng, d);
  std::vector<double> a(2 * num), b(2 * num);
  kernels::serial::rf_features(spectral, d, x, a);
  kernels::rf_features(spectral, d, x, b);
  CHECK(a == b);
}
