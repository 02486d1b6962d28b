#pragma once

// Hot loops shared by the learners. Each routine exists twice: a plain
// serial reference and an OpenMP version. The OpenMP versions partition work
// into fixed-size chunks and reduce partial sums in chunk order, so their
// output does not depend on the thread count. Tests compare the two.

#include <cstddef>
#include <span>

#include "raker/kernel.hpp"

namespace raker::kernels {

// Work (in multiply-adds) below which the dispatching wrappers stay serial.
inline constexpr std::size_t kParallelThreshold = 1 << 15;
inline constexpr std::size_t kReduceChunk = 256;

namespace serial {

// out[i] = sin(v_i . x) / sqrt(D), out[D + i] = cos(v_i . x) / sqrt(D).
// spectral is row-major D x d, out has 2D entries.
void rf_features(std::span<const double> spectral, std::size_t d, std::span<const double> x,
                 std::span<double> out);

// xs is row-major n x d, out is row-major n x 2D.
void rf_features_batch(std::span<const double> spectral, std::size_t d,
                       std::span<const double> xs, std::span<double> out);

// sum_i alphas[i] * kappa(x, centers_i); centers is row-major m x d.
double kernel_sum(const KernelSpec& spec, std::span<const double> centers,
                  std::span<const double> alphas, std::span<const double> x);

// gram += Z^T Z and rhs += Z^T y, Z row-major n x k, gram row-major k x k.
void gram_accumulate(std::span<const double> z, std::size_t k, std::span<const double> y,
                     std::span<double> gram, std::span<double> rhs);

}  // namespace serial

namespace omp {

void rf_features(std::span<const double> spectral, std::size_t d, std::span<const double> x,
                 std::span<double> out);
void rf_features_batch(std::span<const double> spectral, std::size_t d,
                       std::span<const double> xs, std::span<double> out);
double kernel_sum(const KernelSpec& spec, std::span<const double> centers,
                  std::span<const double> alphas, std::span<const double> x);
void gram_accumulate(std::span<const double> z, std::size_t k, std::span<const double> y,
                     std::span<double> gram, std::span<double> rhs);

}  // namespace omp

// Dispatching wrappers used by the library: OpenMP above kParallelThreshold.
void rf_features(std::span<const double> spectral, std::size_t d, std::span<const double> x,
                 std::span<double> out);
void rf_features_batch(std::span<const double> spectral, std::size_t d,
                       std::span<const double> xs, std::span<double> out);
double kernel_sum(const KernelSpec& spec, std::span<const double> centers,
                  std::span<const double> alphas, std::span<const double> x);
void gram_accumulate(std::span<const double> z, std::size_t k, std::span<const double> y,
                     std::span<double> gram, std::span<double> rhs);

double dot(std::span<const double> a, std::span<const double> b) noexcept;

}  // namespace raker::kernels
