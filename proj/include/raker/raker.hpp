#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "raker/feature_map.hpp"
#include "raker/learner.hpp"
#include "raker/losses.hpp"

namespace raker {

using FeatureMapPtr = std::shared_ptr<const FeatureMap>;

// One feature map per kernel, map p seeded with derive_seed(seed, p).
std::vector<FeatureMapPtr> make_feature_maps(std::span<const KernelSpec> kernels,
                                             std::size_t num_features, FeatureVariant variant,
                                             std::uint64_t seed);

// z_p(x) for every kernel p.
using KernelFeatures = std::vector<FeatureVector>;
KernelFeatures map_all(std::span<const FeatureMapPtr> maps, std::span<const double> x);

struct RakerOptions {
  std::size_t num_features = 50;
  FeatureVariant variant = FeatureVariant::RF;
  double eta_theta = 0.1;   // per-kernel gradient step
  double eta_weight = 0.5;  // multiplicative weight step, in (0, 1)
  LossSpec loss{};
  std::uint64_t seed = 0;
  StepSchedule schedule = StepSchedule::Constant;
  std::optional<double> projection_radius;
};

// Telemetry for one slot, computed from the state before the update.
struct SlotReport {
  std::size_t t = 0;
  double prediction = 0.0;
  double combined_loss = 0.0;
  std::vector<double> per_kernel_predictions;
  std::vector<double> per_kernel_losses;
  std::vector<double> normalized_weights;
};

struct MixturePrediction {
  double prediction = 0.0;
  std::vector<double> per_kernel;
};

std::vector<double> softmax(std::span<const double> log_weights);

/// Random-feature online multi-kernel learner.
///
/// Keeps one KernelLearner per dictionary kernel and combines them with
/// exponentiated-gradient weights w_p <- w_p * exp(-eta_weight * loss_p),
/// stored as logs and normalized on demand.
///
/// The loss reported for the combined predictor is
///   C(sum_p wbar_p f_p(x), y) + lambda * sum_p wbar_p^2 ||theta_p||^2,
/// i.e. the regularized loss of the stacked parameter (wbar_p theta_p)_p.
/// By convexity it never exceeds sum_p wbar_p loss_p.
class Raker {
 public:
  Raker(std::span<const KernelSpec> kernels, const RakerOptions& options);
  // Reuses existing maps; num_features/variant/seed in options are ignored.
  Raker(std::vector<FeatureMapPtr> maps, const RakerOptions& options);

  std::size_t num_kernels() const noexcept { return learners_.size(); }
  std::size_t input_dim() const noexcept { return maps_.front()->input_dim(); }
  // Number of completed updates; the next update is slot t() + 1.
  std::size_t t() const noexcept { return t_; }
  const RakerOptions& options() const noexcept { return options_; }

  MixturePrediction predict(std::span<const double> x) const;
  MixturePrediction predict_features(const KernelFeatures& z) const;

  SlotReport update(std::span<const double> x, double y);
  SlotReport update_features(const KernelFeatures& z, double y);

  // Report for (z, y) against the current state, without updating.
  SlotReport evaluate_features(const KernelFeatures& z, double y) const;
  // Second half of update_features: step the learners and weights using a
  // report that evaluate_features produced for the same (z, y).
  void commit(const KernelFeatures& z, double y, const SlotReport& evaluated);

  // The multiplicative weight step alone, for raw per-kernel losses.
  void reweight(std::span<const double> losses);

  std::vector<double> normalized_weights() const { return softmax(log_weights_); }
  std::span<const double> log_weights() const noexcept { return log_weights_; }
  const std::vector<KernelLearner>& learners() const noexcept { return learners_; }
  const std::vector<FeatureMapPtr>& feature_maps() const noexcept { return maps_; }

  // lambda-free part of the combined regularizer: sum_p w_p^2 ||theta_p||^2.
  double combined_sq_norm(std::span<const double> weights) const;

  // Learner state only; feature maps are accounted by their owner.
  std::size_t state_bytes() const noexcept;

 private:
  void check_features(const KernelFeatures& z) const;

  RakerOptions options_;
  std::vector<FeatureMapPtr> maps_;
  std::vector<KernelLearner> learners_;
  std::vector<double> log_weights_;
  std::size_t t_ = 0;
};

}  // namespace raker
