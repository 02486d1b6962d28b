#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "raker/kernel.hpp"

namespace raker {

enum class FeatureVariant { RF, ORF };

std::string_view to_string(FeatureVariant variant);
FeatureVariant parse_feature_variant(std::string_view name);

// Real random-feature vector of length 2D: [sin(Vx), cos(Vx)] / sqrt(D).
using FeatureVector = std::vector<double>;

/// Frozen spectral samples for one kernel.
///
/// Rows v_i of the D x d spectral matrix are drawn from the kernel's
/// spectral density. With the ORF variant (Gaussian only) rows come in
/// d x d blocks sigma^-1 * Lambda * Q, Q orthogonal from a QR factorization
/// of a Gaussian matrix and Lambda diagonal with chi_d entries, so each
/// block keeps the marginal row distribution while making directions
/// orthogonal.
///
/// Immutable after construction and safe to share across threads.
class FeatureMap {
 public:
  static FeatureMap sample(const KernelSpec& spec, std::size_t num_features,
                           FeatureVariant variant, std::uint64_t seed);

  const KernelSpec& spec() const noexcept { return spec_; }
  std::size_t num_features() const noexcept { return num_features_; }
  std::size_t input_dim() const noexcept { return spec_.input_dim; }
  std::size_t feature_dim() const noexcept { return 2 * num_features_; }
  FeatureVariant variant() const noexcept { return variant_; }
  std::uint64_t seed() const noexcept { return seed_; }

  // Row-major D x d.
  std::span<const double> spectral_matrix() const noexcept { return spectral_; }
  std::span<const double> row(std::size_t i) const;

  void map(std::span<const double> x, std::span<double> out) const;
  FeatureVector map(std::span<const double> x) const;

  // Row-major batch: xs is n x d, out is n x 2D.
  void map_batch(std::span<const double> xs, std::span<double> out) const;

  // z(x)^T z(x2).
  double approx_eval(std::span<const double> x, std::span<const double> x2) const;

  // Empirical E||v||^2 over the stored rows (the sigma_p^2 constant of the
  // uniform approximation bound). Diagnostic only.
  double mean_sq_frequency() const noexcept;

  std::size_t state_bytes() const noexcept { return spectral_.size() * sizeof(double); }

 private:
  FeatureMap(KernelSpec spec, std::size_t num_features, FeatureVariant variant,
             std::uint64_t seed, std::vector<double> spectral);

  KernelSpec spec_;
  std::size_t num_features_;
  FeatureVariant variant_;
  std::uint64_t seed_;
  std::vector<double> spectral_;
};

}  // namespace raker
