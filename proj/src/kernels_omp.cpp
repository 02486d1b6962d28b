#include <omp.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "raker/kernels.hpp"

namespace raker::kernels::omp {

void rf_features(std::span<const double> spectral, std::size_t d, std::span<const double> x,
                 std::span<double> out) {
  const auto num = static_cast<std::int64_t>(spectral.size() / d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(num));
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < num; ++i) {
    const double phase = dot(spectral.subspan(static_cast<std::size_t>(i) * d, d), x);
    out[i] = std::sin(phase) * scale;
    out[num + i] = std::cos(phase) * scale;
  }
}

void rf_features_batch(std::span<const double> spectral, std::size_t d,
                       std::span<const double> xs, std::span<double> out) {
  const auto n = static_cast<std::int64_t>(xs.size() / d);
  const std::size_t width = 2 * (spectral.size() / d);
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < n; ++r) {
    const auto row = static_cast<std::size_t>(r);
    serial::rf_features(spectral, d, xs.subspan(row * d, d), out.subspan(row * width, width));
  }
}

double kernel_sum(const KernelSpec& spec, std::span<const double> centers,
                  std::span<const double> alphas, std::span<const double> x) {
  const std::size_t d = spec.input_dim;
  const std::size_t m = alphas.size();
  const auto chunks = static_cast<std::int64_t>((m + kReduceChunk - 1) / kReduceChunk);
  std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kReduceChunk;
    const std::size_t hi = std::min(m, lo + kReduceChunk);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      acc += alphas[i] * exact_eval_unchecked(spec, centers.data() + i * d, x.data());
    }
    partial[static_cast<std::size_t>(c)] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

void gram_accumulate(std::span<const double> z, std::size_t k, std::span<const double> y,
                     std::span<double> gram, std::span<double> rhs) {
  const std::size_t n = z.size() / k;
  const auto cols = static_cast<std::int64_t>(k);
  // Each entry is owned by one thread and summed over rows in order, which
  // reproduces the serial accumulation bit for bit.
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t ii = 0; ii < cols; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    for (std::size_t r = 0; r < n; ++r) {
      const double* row = z.data() + r * k;
      const double zi = row[i];
      for (std::size_t j = 0; j < k; ++j) gram[i * k + j] += zi * row[j];
      rhs[i] += zi * y[r];
    }
  }
}

}  // namespace raker::kernels::omp
