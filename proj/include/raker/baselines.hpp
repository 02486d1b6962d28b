#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "raker/kernel.hpp"
#include "raker/losses.hpp"
#include "raker/raker.hpp"

namespace raker {

/// f(x) = sum_i alpha_i kappa(x, x_i) over stored centers, trained by
/// functional online gradient descent. With a budget B the oldest center is
/// evicted once more than B are stored.
class SupportSet {
 public:
  explicit SupportSet(KernelSpec spec, std::optional<std::size_t> budget = std::nullopt);

  const KernelSpec& spec() const noexcept { return spec_; }
  std::optional<std::size_t> budget() const noexcept { return budget_; }
  std::size_t size() const noexcept { return alphas_.size(); }
  std::span<const double> centers() const noexcept { return centers_; }  // row-major size x d
  std::span<const double> alphas() const noexcept { return alphas_; }
  // Insertion index (0-based, counting every inserted center) of each stored center.
  std::span<const std::size_t> insertion_ids() const noexcept { return ids_; }

  double predict(std::span<const double> x) const;

  // f <- (1 - 2 eta lambda) f - eta * C'(f(x), y) kappa(x, .); a zero
  // coefficient adds no center.
  void step(const LossSpec& loss, std::span<const double> x, double y, double eta);

  // ||f||_H^2, maintained incrementally.
  double sq_norm() const noexcept { return sq_norm_; }
  // alpha^T K alpha, recomputed from scratch.
  double sq_norm_exact() const;

  std::size_t state_bytes() const noexcept;

 private:
  KernelSpec spec_;
  std::optional<std::size_t> budget_;
  std::vector<double> centers_;
  std::vector<double> alphas_;
  std::vector<std::size_t> ids_;
  std::size_t inserted_ = 0;
  double sq_norm_ = 0.0;
};

struct OmklOptions {
  double eta_theta = 0.1;
  double eta_weight = 0.5;
  LossSpec loss{};
  std::optional<std::size_t> budget;  // OMKL-B when set
};

/// Exact-kernel online MKL: one SupportSet per kernel plus the same
/// multiplicative kernel weights as Raker.
class Omkl {
 public:
  Omkl(std::span<const KernelSpec> kernels, const OmklOptions& options);

  std::size_t num_kernels() const noexcept { return sets_.size(); }
  std::size_t t() const noexcept { return t_; }

  MixturePrediction predict(std::span<const double> x) const;
  SlotReport update(std::span<const double> x, double y);

  std::vector<double> normalized_weights() const { return softmax(log_weights_); }
  const std::vector<SupportSet>& support_sets() const noexcept { return sets_; }

  std::size_t state_bytes() const noexcept;

 private:
  OmklOptions options_;
  std::vector<SupportSet> sets_;
  std::vector<double> log_weights_;
  std::size_t t_ = 0;
};

}  // namespace raker
