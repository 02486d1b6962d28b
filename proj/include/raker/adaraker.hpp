#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "raker/raker.hpp"

namespace raker {

// Closed slot range [start, end]; slots are 1-based.
struct Interval {
  std::uint64_t start = 1;
  std::uint64_t end = 1;
  unsigned level = 0;  // length == 2^level on the dyadic grid

  std::uint64_t length() const noexcept { return end - start + 1; }
  bool contains(std::uint64_t t) const noexcept { return start <= t && t <= end; }

  friend auto operator<=>(const Interval&, const Interval&) = default;
};

// Dyadic intervals containing t: for every level j with 2^j <= t, the
// length-2^j block [2^j * floor(t / 2^j), 2^j * floor(t / 2^j) + 2^j - 1].
// Sorted by level; always floor(log2 t) + 1 entries.
std::vector<Interval> active_intervals(std::uint64_t t);

// min{1/2, eta0 / sqrt(|I|)}
double interval_rate(double eta0, const Interval& interval);

struct AdaRakerOptions {
  std::size_t num_features = 50;
  FeatureVariant variant = FeatureVariant::RF;
  double eta0 = 1.0;
  LossSpec loss{};
  std::uint64_t seed = 0;
  // By default an instance on I runs Raker with eta_theta = eta_weight = eta_I.
  std::optional<double> eta_theta_override;
  std::optional<double> eta_weight_override;
  // Use r = loss(instance) - loss(ensemble) instead of the literal
  // r = loss(ensemble) - loss(instance) in h <- h * exp(-eta_I * r).
  bool flip_relative_loss = false;
  // Replace the dyadic interval set with the single interval [1, T].
  std::optional<std::uint64_t> single_interval_horizon;
};

struct EnsemblePrediction {
  double prediction = 0.0;
  std::vector<Interval> intervals;       // live instances, by level
  std::vector<double> instance_predictions;
  std::vector<double> normalized_weights;  // hbar
};

struct AdaSlotReport {
  std::size_t t = 0;
  double prediction = 0.0;
  double overall_loss = 0.0;
  std::vector<Interval> intervals;
  std::vector<double> instance_predictions;
  std::vector<double> instance_losses;
  std::vector<double> normalized_weights;  // hbar before the update
};

/// Ensemble of Raker instances, one per active interval, mixed by weights h.
///
/// At slot t the live instances are exactly those whose interval contains t.
/// An instance starting at s has h = 0 during slot s (it trains but does not
/// vote), h = eta_I at s + 1, and afterwards, with r = L(ensemble) - L(instance),
/// h <- h * exp(-eta_I * r). If every live instance is on its first slot the
/// weights fall back to uniform. Instances whose interval ends at t are dropped
/// after the slot. All instances share one feature map per kernel.
class AdaRaker {
 public:
  AdaRaker(std::span<const KernelSpec> kernels, const AdaRakerOptions& options);
  AdaRaker(std::vector<FeatureMapPtr> maps, const AdaRakerOptions& options);

  // Slot that the next update() consumes.
  std::uint64_t now() const noexcept { return now_; }
  const AdaRakerOptions& options() const noexcept { return options_; }
  const std::vector<FeatureMapPtr>& feature_maps() const noexcept { return maps_; }

  EnsemblePrediction predict(std::span<const double> x) const;
  AdaSlotReport update(std::span<const double> x, double y);

  std::size_t num_instances() const noexcept { return instances_.size(); }
  std::vector<Interval> live_intervals() const;
  std::vector<double> normalized_weights() const;
  // log h per live instance; -inf during an instance's first slot.
  std::vector<double> log_ensemble_weights() const;
  const Raker& instance(std::size_t i) const { return instances_.at(i).raker; }
  double instance_rate(std::size_t i) const { return instances_.at(i).eta; }

  std::size_t state_bytes() const noexcept;

 private:
  struct Instance {
    Interval interval;
    Raker raker;
    double log_h;
    double eta;
  };

  std::vector<Interval> intervals_at(std::uint64_t t) const;
  void spawn(std::uint64_t t);
  EnsemblePrediction predict_features(const KernelFeatures& z) const;

  AdaRakerOptions options_;
  std::vector<FeatureMapPtr> maps_;
  std::vector<Instance> instances_;
  std::uint64_t now_ = 1;
};

}  // namespace raker
