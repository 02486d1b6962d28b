#include "raker/learner.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "raker/errors.hpp"
#include "raker/kernels.hpp"

namespace raker {

double default_stepsize(double eta0, std::optional<std::size_t> horizon) {
  if (horizon && *horizon > 0) return eta0 / std::sqrt(static_cast<double>(*horizon));
  return eta0;
}

KernelLearner::KernelLearner(std::shared_ptr<const FeatureMap> map, LearnerOptions options)
    : map_(std::move(map)), options_(options) {
  if (!map_) throw std::invalid_argument("KernelLearner: null feature map");
  if (!(options_.eta > 0.0) || !std::isfinite(options_.eta)) {
    throw std::invalid_argument("KernelLearner: eta must be positive and finite");
  }
  if (options_.projection_radius && !(*options_.projection_radius > 0.0)) {
    throw std::invalid_argument("KernelLearner: projection radius must be positive");
  }
  options_.loss.validate();
  theta_.assign(map_->feature_dim(), 0.0);
  grad_.assign(map_->feature_dim(), 0.0);
}

double KernelLearner::predict(std::span<const double> z) const {
  require_same_length(z.size(), theta_.size(), "KernelLearner::predict");
  return kernels::dot(theta_, z);
}

double KernelLearner::predict_input(std::span<const double> x) const {
  return predict(map_->map(x));
}

double KernelLearner::loss(std::span<const double> z, double y) const {
  return loss_value(options_.loss, predict(z), y, theta_sq_norm());
}

double KernelLearner::current_eta() const noexcept {
  if (options_.schedule == StepSchedule::InverseSqrtT) {
    return options_.eta / std::sqrt(static_cast<double>(steps_ + 1));
  }
  return options_.eta;
}

void KernelLearner::step(std::span<const double> z, double y) {
  loss_gradient(options_.loss, z, theta_, y, grad_);
  const double eta = current_eta();
  for (std::size_t i = 0; i < theta_.size(); ++i) {
    if (!std::isfinite(grad_[i])) {
      throw NumericError("KernelLearner::step: non-finite gradient at step " +
                         std::to_string(steps_ + 1));
    }
    theta_[i] -= eta * grad_[i];
  }
  if (options_.projection_radius) {
    const double norm = std::sqrt(theta_sq_norm());
    if (norm > *options_.projection_radius) {
      const double shrink = *options_.projection_radius / norm;
      for (double& v : theta_) v *= shrink;
    }
  }
  ++steps_;
}

void KernelLearner::set_theta(std::span<const double> theta) {
  require_same_length(theta.size(), theta_.size(), "KernelLearner::set_theta");
  theta_.assign(theta.begin(), theta.end());
}

double KernelLearner::theta_sq_norm() const noexcept { return kernels::dot(theta_, theta_); }

std::size_t KernelLearner::state_bytes() const noexcept {
  return sizeof(*this) + (theta_.capacity() + grad_.capacity()) * sizeof(double);
}

}  // namespace raker
