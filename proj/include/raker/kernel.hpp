#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace raker {

enum class KernelFamily { Gaussian, Laplacian, Cauchy };

// Standardized shift-invariant kernel, kappa(0) = 1.
//   Gaussian : exp(-||x - x'||_2^2 / (2 * bandwidth))        bandwidth = sigma^2
//   Laplacian: exp(-||x - x'||_1 / bandwidth)                bandwidth = scale
//   Cauchy   : prod_k 1 / (1 + ((x_k - x'_k) / bandwidth)^2) bandwidth = scale
struct KernelSpec {
  KernelFamily family = KernelFamily::Gaussian;
  double bandwidth = 1.0;
  std::size_t input_dim = 1;

  void validate() const;
  std::string label() const;  // e.g. "gaussian(1)"

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

std::string_view to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view name);

// kappa(x - x2). Throws DimensionError unless both have spec.input_dim entries.
double exact_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> x2);

// Same as exact_eval without validation; for inner loops that already checked.
double exact_eval_unchecked(const KernelSpec& spec, const double* x, const double* x2) noexcept;

}  // namespace raker
