#include "raker/kernel.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "raker/errors.hpp"

namespace raker {

void KernelSpec::validate() const {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw std::invalid_argument("KernelSpec: bandwidth must be positive and finite");
  }
  if (input_dim == 0) {
    throw std::invalid_argument("KernelSpec: input_dim must be >= 1");
  }
}

std::string KernelSpec::label() const {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s(%g)", std::string(to_string(family)).c_str(), bandwidth);
  return buf;
}

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Gaussian:
      return "gaussian";
    case KernelFamily::Laplacian:
      return "laplacian";
    case KernelFamily::Cauchy:
      return "cauchy";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "gaussian" || name == "rbf") return KernelFamily::Gaussian;
  if (name == "laplacian") return KernelFamily::Laplacian;
  if (name == "cauchy") return KernelFamily::Cauchy;
  throw std::invalid_argument("unknown kernel family '" + std::string(name) + "'");
}

double exact_eval_unchecked(const KernelSpec& spec, const double* x, const double* x2) noexcept {
  const std::size_t d = spec.input_dim;
  switch (spec.family) {
    case KernelFamily::Gaussian: {
      double sq = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = x[k] - x2[k];
        sq += diff * diff;
      }
      return std::exp(-sq / (2.0 * spec.bandwidth));
    }
    case KernelFamily::Laplacian: {
      double l1 = 0.0;
      for (std::size_t k = 0; k < d; ++k) l1 += std::abs(x[k] - x2[k]);
      return std::exp(-l1 / spec.bandwidth);
    }
    case KernelFamily::Cauchy: {
      double prod = 1.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double u = (x[k] - x2[k]) / spec.bandwidth;
        prod /= (1.0 + u * u);
      }
      return prod;
    }
  }
  return 0.0;
}

double exact_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> x2) {
  spec.validate();
  require_same_length(x.size(), spec.input_dim, "exact_eval");
  require_same_length(x2.size(), spec.input_dim, "exact_eval");
  return exact_eval_unchecked(spec, x.data(), x2.data());
}

}  // namespace raker
