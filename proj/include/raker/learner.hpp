#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "raker/feature_map.hpp"
#include "raker/losses.hpp"

namespace raker {

enum class StepSchedule {
  Constant,      // eta every step
  InverseSqrtT,  // eta / sqrt(t) at the t-th step
};

// eta0 / sqrt(T) when the horizon is known, eta0 otherwise.
double default_stepsize(double eta0, std::optional<std::size_t> horizon);

struct LearnerOptions {
  double eta = 0.1;
  LossSpec loss{};
  StepSchedule schedule = StepSchedule::Constant;
  // If set, theta is projected onto the ball ||theta|| <= radius after each step.
  std::optional<double> projection_radius;
};

/// Online gradient descent on theta for f(x) = theta^T z(x) in one kernel's
/// random-feature space. theta starts at zero.
class KernelLearner {
 public:
  KernelLearner(std::shared_ptr<const FeatureMap> map, LearnerOptions options);

  const FeatureMap& feature_map() const noexcept { return *map_; }
  const std::shared_ptr<const FeatureMap>& shared_map() const noexcept { return map_; }
  const LearnerOptions& options() const noexcept { return options_; }

  double predict(std::span<const double> z) const;
  double predict_input(std::span<const double> x) const;

  // Regularized loss of the current theta on (z, y).
  double loss(std::span<const double> z, double y) const;

  // theta <- theta - eta_t * grad. Throws NumericError on a non-finite gradient
  // or iterate.
  void step(std::span<const double> z, double y);

  std::span<const double> theta() const noexcept { return theta_; }
  void set_theta(std::span<const double> theta);
  double theta_sq_norm() const noexcept;

  std::size_t steps_taken() const noexcept { return steps_; }
  // Stepsize the next call to step() will use.
  double current_eta() const noexcept;

  std::size_t state_bytes() const noexcept;

 private:
  std::shared_ptr<const FeatureMap> map_;
  LearnerOptions options_;
  std::vector<double> theta_;
  std::vector<double> grad_;
  std::size_t steps_ = 0;
};

}  // namespace raker
