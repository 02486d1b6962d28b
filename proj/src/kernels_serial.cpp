#include <cmath>

#include "raker/errors.hpp"
#include "raker/kernels.hpp"

namespace raker::kernels {

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

namespace serial {

void rf_features(std::span<const double> spectral, std::size_t d, std::span<const double> x,
                 std::span<double> out) {
  const std::size_t num = spectral.size() / d;
  const double scale = 1.0 / std::sqrt(static_cast<double>(num));
  for (std::size_t i = 0; i < num; ++i) {
    const double phase = dot(spectral.subspan(i * d, d), x);
    out[i] = std::sin(phase) * scale;
    out[num + i] = std::cos(phase) * scale;
  }
}

void rf_features_batch(std::span<const double> spectral, std::size_t d,
                       std::span<const double> xs, std::span<double> out) {
  const std::size_t n = xs.size() / d;
  const std::size_t width = 2 * (spectral.size() / d);
  for (std::size_t r = 0; r < n; ++r) {
    rf_features(spectral, d, xs.subspan(r * d, d), out.subspan(r * width, width));
  }
}

double kernel_sum(const KernelSpec& spec, std::span<const double> centers,
                  std::span<const double> alphas, std::span<const double> x) {
  const std::size_t d = spec.input_dim;
  double acc = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    acc += alphas[i] * exact_eval_unchecked(spec, centers.data() + i * d, x.data());
  }
  return acc;
}

void gram_accumulate(std::span<const double> z, std::size_t k, std::span<const double> y,
                     std::span<double> gram, std::span<double> rhs) {
  const std::size_t n = z.size() / k;
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = z.data() + r * k;
    for (std::size_t i = 0; i < k; ++i) {
      const double zi = row[i];
      for (std::size_t j = 0; j < k; ++j) gram[i * k + j] += zi * row[j];
      rhs[i] += zi * y[r];
    }
  }
}

}  // namespace serial

void rf_features(std::span<const double> spectral, std::size_t d, std::span<const double> x,
                 std::span<double> out) {
  if (spectral.size() < kParallelThreshold) {
    serial::rf_features(spectral, d, x, out);
  } else {
    omp::rf_features(spectral, d, x, out);
  }
}

void rf_features_batch(std::span<const double> spectral, std::size_t d,
                       std::span<const double> xs, std::span<double> out) {
  if ((xs.size() / d) * spectral.size() < kParallelThreshold) {
    serial::rf_features_batch(spectral, d, xs, out);
  } else {
    omp::rf_features_batch(spectral, d, xs, out);
  }
}

double kernel_sum(const KernelSpec& spec, std::span<const double> centers,
                  std::span<const double> alphas, std::span<const double> x) {
  if (centers.size() < kParallelThreshold) {
    return serial::kernel_sum(spec, centers, alphas, x);
  }
  return omp::kernel_sum(spec, centers, alphas, x);
}

void gram_accumulate(std::span<const double> z, std::size_t k, std::span<const double> y,
                     std::span<double> gram, std::span<double> rhs) {
  if (z.size() * k < kParallelThreshold) {
    serial::gram_accumulate(z, k, y, gram, rhs);
  } else {
    omp::gram_accumulate(z, k, y, gram, rhs);
  }
}

}  // namespace raker::kernels
