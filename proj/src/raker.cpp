#include "raker/raker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "raker/errors.hpp"
#include "raker/kernels.hpp"
#include "raker/parallel.hpp"
#include "raker/rng.hpp"

namespace raker {

std::vector<FeatureMapPtr> make_feature_maps(std::span<const KernelSpec> kernels,
                                             std::size_t num_features, FeatureVariant variant,
                                             std::uint64_t seed) {
  if (kernels.empty()) throw std::invalid_argument("kernel dictionary is empty");
  std::vector<FeatureMapPtr> maps;
  maps.reserve(kernels.size());
  for (std::size_t p = 0; p < kernels.size(); ++p) {
    maps.push_back(std::make_shared<const FeatureMap>(
        FeatureMap::sample(kernels[p], num_features, variant, derive_seed(seed, p))));
  }
  return maps;
}

KernelFeatures map_all(std::span<const FeatureMapPtr> maps, std::span<const double> x) {
  KernelFeatures z;
  z.reserve(maps.size());
  for (const auto& m : maps) z.push_back(m->map(x));
  return z;
}

std::vector<double> softmax(std::span<const double> log_weights) {
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  std::vector<double> w(log_weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(log_weights[i] - top);
    total += w[i];
  }
  for (double& v : w) v /= total;
  return w;
}

namespace {

void validate_options(const RakerOptions& o) {
  if (!(o.eta_theta > 0.0) || !std::isfinite(o.eta_theta)) {
    throw std::invalid_argument("Raker: eta_theta must be positive and finite");
  }
  if (!(o.eta_weight > 0.0 && o.eta_weight < 1.0)) {
    throw std::invalid_argument("Raker: eta_weight must lie in (0, 1)");
  }
  o.loss.validate();
}

}  // namespace

Raker::Raker(std::span<const KernelSpec> kernels, const RakerOptions& options)
    : Raker(make_feature_maps(kernels, options.num_features, options.variant, options.seed),
            options) {}

Raker::Raker(std::vector<FeatureMapPtr> maps, const RakerOptions& options)
    : options_(options), maps_(std::move(maps)) {
  validate_options(options_);
  if (maps_.empty()) throw std::invalid_argument("Raker: kernel dictionary is empty");
  const std::size_t d = maps_.front()->input_dim();
  LearnerOptions lo{options_.eta_theta, options_.loss, options_.schedule,
                    options_.projection_radius};
  learners_.reserve(maps_.size());
  for (const auto& m : maps_) {
    if (!m) throw std::invalid_argument("Raker: null feature map");
    if (m->input_dim() != d) throw DimensionError("Raker: kernels disagree on input dimension");
    learners_.emplace_back(m, lo);
  }
  log_weights_.assign(maps_.size(), 0.0);
}

void Raker::check_features(const KernelFeatures& z) const {
  require_same_length(z.size(), learners_.size(), "Raker: per-kernel features");
}

MixturePrediction Raker::predict(std::span<const double> x) const {
  require_same_length(x.size(), input_dim(), "Raker::predict");
  return predict_features(map_all(maps_, x));
}

MixturePrediction Raker::predict_features(const KernelFeatures& z) const {
  check_features(z);
  const std::vector<double> w = normalized_weights();
  MixturePrediction out;
  out.per_kernel.resize(learners_.size());
  for (std::size_t p = 0; p < learners_.size(); ++p) {
    out.per_kernel[p] = learners_[p].predict(z[p]);
    out.prediction += w[p] * out.per_kernel[p];
  }
  return out;
}

double Raker::combined_sq_norm(std::span<const double> weights) const {
  double acc = 0.0;
  for (std::size_t p = 0; p < learners_.size(); ++p) {
    acc += weights[p] * weights[p] * learners_[p].theta_sq_norm();
  }
  return acc;
}

SlotReport Raker::evaluate_features(const KernelFeatures& z, double y) const {
  check_label(options_.loss, y);
  SlotReport report;
  report.t = t_ + 1;
  report.normalized_weights = normalized_weights();
  MixturePrediction pred = predict_features(z);
  report.prediction = pred.prediction;
  report.per_kernel_predictions = std::move(pred.per_kernel);
  report.per_kernel_losses.resize(learners_.size());
  for (std::size_t p = 0; p < learners_.size(); ++p) {
    report.per_kernel_losses[p] = loss_value(options_.loss, report.per_kernel_predictions[p], y,
                                             learners_[p].theta_sq_norm());
  }
  report.combined_loss = loss_value(options_.loss, report.prediction, y,
                                    combined_sq_norm(report.normalized_weights));
  if (!std::isfinite(report.combined_loss)) {
    throw NumericError("Raker: non-finite loss at slot " + std::to_string(report.t));
  }
  for (double l : report.per_kernel_losses) {
    if (!std::isfinite(l)) {
      throw NumericError("Raker: non-finite per-kernel loss at slot " + std::to_string(report.t));
    }
  }
  return report;
}

SlotReport Raker::update(std::span<const double> x, double y) {
  require_same_length(x.size(), input_dim(), "Raker::update");
  return update_features(map_all(maps_, x), y);
}

SlotReport Raker::update_features(const KernelFeatures& z, double y) {
  SlotReport report = evaluate_features(z, y);
  commit(z, y, report);
  return report;
}

void Raker::commit(const KernelFeatures& z, double y, const SlotReport& evaluated) {
  check_features(z);
  const std::size_t work = learners_.size() * maps_.front()->feature_dim();
  parallel_for(learners_.size(), work, kernels::kParallelThreshold,
               [&](std::size_t p) { learners_[p].step(z[p], y); });
  reweight(evaluated.per_kernel_losses);
  ++t_;
}

void Raker::reweight(std::span<const double> losses) {
  require_same_length(losses.size(), log_weights_.size(), "Raker::reweight");
  for (std::size_t p = 0; p < losses.size(); ++p) {
    const double l = options_.loss.clip_for_weights ? clip_unit(losses[p]) : losses[p];
    log_weights_[p] -= options_.eta_weight * l;
    if (!std::isfinite(log_weights_[p])) {
      throw NumericError("Raker: non-finite kernel weight");
    }
  }
  // Shift so the largest log-weight is 0; normalized weights are unchanged.
  const double top = *std::max_element(log_weights_.begin(), log_weights_.end());
  for (double& lw : log_weights_) lw -= top;
}

std::size_t Raker::state_bytes() const noexcept {
  std::size_t bytes = sizeof(*this) + log_weights_.capacity() * sizeof(double);
  for (const auto& l : learners_) bytes += l.state_bytes();
  return bytes;
}

}  // namespace raker
