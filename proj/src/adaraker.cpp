#include "raker/adaraker.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "raker/errors.hpp"
#include "raker/kernels.hpp"
#include "raker/parallel.hpp"

namespace raker {

namespace {
constexpr double kInfinity = std::numeric_limits<double>::infinity();
}  // namespace

std::vector<Interval> active_intervals(std::uint64_t t) {
  if (t < 1) throw std::invalid_argument("active_intervals: t must be >= 1");
  const unsigned levels = static_cast<unsigned>(std::bit_width(t));  // floor(log2 t) + 1
  std::vector<Interval> out;
  out.reserve(levels);
  for (unsigned j = 0; j < levels; ++j) {
    const std::uint64_t len = std::uint64_t{1} << j;
    const std::uint64_t start = (t >> j) << j;
    out.push_back(Interval{start, start + len - 1, j});
  }
  return out;
}

double interval_rate(double eta0, const Interval& interval) {
  return std::min(0.5, eta0 / std::sqrt(static_cast<double>(interval.length())));
}

AdaRaker::AdaRaker(std::span<const KernelSpec> kernels, const AdaRakerOptions& options)
    : AdaRaker(make_feature_maps(kernels, options.num_features, options.variant, options.seed),
               options) {}

AdaRaker::AdaRaker(std::vector<FeatureMapPtr> maps, const AdaRakerOptions& options)
    : options_(options), maps_(std::move(maps)) {
  if (maps_.empty()) throw std::invalid_argument("AdaRaker: kernel dictionary is empty");
  if (!(options_.eta0 > 0.0) || !std::isfinite(options_.eta0)) {
    throw std::invalid_argument("AdaRaker: eta0 must be positive and finite");
  }
  if (options_.single_interval_horizon && *options_.single_interval_horizon < 1) {
    throw std::invalid_argument("AdaRaker: single-interval horizon must be >= 1");
  }
  options_.loss.validate();
  spawn(now_);
}

std::vector<Interval> AdaRaker::intervals_at(std::uint64_t t) const {
  if (options_.single_interval_horizon) {
    const std::uint64_t horizon = *options_.single_interval_horizon;
    if (t > horizon) return {};
    return {Interval{1, horizon, static_cast<unsigned>(std::bit_width(horizon) - 1)}};
  }
  return active_intervals(t);
}

void AdaRaker::spawn(std::uint64_t t) {
  for (const Interval& interval : intervals_at(t)) {
    if (interval.start != t) continue;
    const double eta = interval_rate(options_.eta0, interval);
    RakerOptions ro;
    ro.eta_theta = options_.eta_theta_override.value_or(eta);
    ro.eta_weight = options_.eta_weight_override.value_or(eta);
    ro.loss = options_.loss;
    // h = 0 on the first slot: the instance trains but does not vote yet.
    instances_.push_back(Instance{interval, Raker(maps_, ro), -kInfinity, eta});
  }
  std::sort(instances_.begin(), instances_.end(),
            [](const Instance& a, const Instance& b) { return a.interval.level < b.interval.level; });
}

std::vector<Interval> AdaRaker::live_intervals() const {
  std::vector<Interval> out;
  out.reserve(instances_.size());
  for (const auto& inst : instances_) out.push_back(inst.interval);
  return out;
}

std::vector<double> AdaRaker::log_ensemble_weights() const {
  std::vector<double> out;
  out.reserve(instances_.size());
  for (const auto& inst : instances_) out.push_back(inst.log_h);
  return out;
}

std::vector<double> AdaRaker::normalized_weights() const {
  if (instances_.empty()) {
    throw std::logic_error("AdaRaker: no active instance at slot " + std::to_string(now_));
  }
  const auto log_h = log_ensemble_weights();
  if (std::none_of(log_h.begin(), log_h.end(), [](double v) { return std::isfinite(v); })) {
    // Every live instance is on its first slot (t = 1 or a power of two);
    // they all predict from theta = 0, so any convex weights will do.
    return std::vector<double>(log_h.size(), 1.0 / static_cast<double>(log_h.size()));
  }
  return softmax(log_h);
}

EnsemblePrediction AdaRaker::predict_features(const KernelFeatures& z) const {
  EnsemblePrediction out;
  out.normalized_weights = normalized_weights();
  out.intervals = live_intervals();
  out.instance_predictions.resize(instances_.size());
  for (std::size_t i = 0; i < instances_.size(); ++i) {
    out.instance_predictions[i] = instances_[i].raker.predict_features(z).prediction;
    out.prediction += out.normalized_weights[i] * out.instance_predictions[i];
  }
  return out;
}

EnsemblePrediction AdaRaker::predict(std::span<const double> x) const {
  require_same_length(x.size(), maps_.front()->input_dim(), "AdaRaker::predict");
  return predict_features(map_all(maps_, x));
}

AdaSlotReport AdaRaker::update(std::span<const double> x, double y) {
  require_same_length(x.size(), maps_.front()->input_dim(), "AdaRaker::update");
  check_label(options_.loss, y);
  if (instances_.empty()) {
    throw std::logic_error("AdaRaker: no active instance at slot " + std::to_string(now_));
  }
  const KernelFeatures z = map_all(maps_, x);
  const std::size_t n = instances_.size();
  const std::size_t work = n * maps_.size() * maps_.front()->feature_dim();

  std::vector<SlotReport> evaluated(n);
  parallel_for(n, work, kernels::kParallelThreshold, [&](std::size_t i) {
    evaluated[i] = instances_[i].raker.evaluate_features(z, y);
  });

  AdaSlotReport report;
  report.t = now_;
  report.intervals = live_intervals();
  report.normalized_weights = normalized_weights();
  report.instance_predictions.resize(n);
  report.instance_losses.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    report.instance_predictions[i] = evaluated[i].prediction;
    report.instance_losses[i] = evaluated[i].combined_loss;
    report.prediction += report.normalized_weights[i] * evaluated[i].prediction;
  }

  // Regularizer of the ensemble function: blocks sum_I hbar_I wbar_p^I theta_p^I
  // live in the shared feature space of kernel p.
  double sq_norm = 0.0;
  if (options_.loss.lambda > 0.0) {
    for (std::size_t p = 0; p < maps_.size(); ++p) {
      std::vector<double> block(maps_[p]->feature_dim(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double scale = report.normalized_weights[i] * evaluated[i].normalized_weights[p];
        const auto theta = instances_[i].raker.learners()[p].theta();
        for (std::size_t k = 0; k < block.size(); ++k) block[k] += scale * theta[k];
      }
      sq_norm += kernels::dot(block, block);
    }
  }
  report.overall_loss = loss_value(options_.loss, report.prediction, y, sq_norm);

  for (std::size_t i = 0; i < n; ++i) {
    Instance& inst = instances_[i];
    if (inst.interval.start == now_) {
      inst.log_h = std::log(inst.eta);  // h_{t+1} = eta_I after the first slot
      continue;
    }
    double r = report.overall_loss - report.instance_losses[i];
    if (options_.flip_relative_loss) r = -r;
    inst.log_h -= inst.eta * r;
    if (!std::isfinite(inst.log_h)) {
      throw NumericError("AdaRaker: non-finite ensemble weight at slot " + std::to_string(now_));
    }
  }

  parallel_for(n, work, kernels::kParallelThreshold,
               [&](std::size_t i) { instances_[i].raker.commit(z, y, evaluated[i]); });

  std::erase_if(instances_, [&](const Instance& inst) { return inst.interval.end <= now_; });
  ++now_;
  spawn(now_);
  return report;
}

std::size_t AdaRaker::state_bytes() const noexcept {
  std::size_t bytes = sizeof(*this) + instances_.capacity() * sizeof(Instance);
  for (const auto& inst : instances_) bytes += inst.raker.state_bytes() - sizeof(Raker);
  return bytes;
}

}  // namespace raker
