#include "raker/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "raker/errors.hpp"
#include "raker/kernels.hpp"
#include "raker/parallel.hpp"

namespace raker {

SupportSet::SupportSet(KernelSpec spec, std::optional<std::size_t> budget)
    : spec_(spec), budget_(budget) {
  spec_.validate();
  if (budget_ && *budget_ == 0) throw std::invalid_argument("SupportSet: budget must be >= 1");
}

double SupportSet::predict(std::span<const double> x) const {
  require_same_length(x.size(), spec_.input_dim, "SupportSet::predict");
  if (alphas_.empty()) return 0.0;
  return kernels::kernel_sum(spec_, centers_, alphas_, x);
}

void SupportSet::step(const LossSpec& loss, std::span<const double> x, double y, double eta) {
  require_same_length(x.size(), spec_.input_dim, "SupportSet::step");
  if (!(eta > 0.0)) throw std::invalid_argument("SupportSet::step: eta must be positive");
  const double f = predict(x);
  const double g = data_loss_derivative(loss, f, y);
  if (!std::isfinite(g)) throw NumericError("SupportSet::step: non-finite gradient");

  const double shrink = 1.0 - 2.0 * eta * loss.lambda;
  if (shrink != 1.0) {
    for (double& a : alphas_) a *= shrink;
    sq_norm_ *= shrink * shrink;
  }
  const double coef = -eta * g;
  if (coef == 0.0) return;

  // ||f + a k(x, .)||^2 = ||f||^2 + 2 a f(x) + a^2 k(x, x), with f already shrunk.
  sq_norm_ += 2.0 * coef * (shrink * f) + coef * coef;
  centers_.insert(centers_.end(), x.begin(), x.end());
  alphas_.push_back(coef);
  ids_.push_back(inserted_++);

  if (budget_ && alphas_.size() > *budget_) {
    const std::size_t d = spec_.input_dim;
    const double a_old = alphas_.front();
    const double f_old = predict(std::span<const double>(centers_).first(d));
    sq_norm_ += -2.0 * a_old * f_old + a_old * a_old;
    centers_.erase(centers_.begin(), centers_.begin() + static_cast<std::ptrdiff_t>(d));
    alphas_.erase(alphas_.begin());
    ids_.erase(ids_.begin());
  }
}

double SupportSet::sq_norm_exact() const {
  const std::size_t d = spec_.input_dim;
  double acc = 0.0;
  for (std::size_t i = 0; i < alphas_.size(); ++i) {
    acc += alphas_[i] * kernels::serial::kernel_sum(
                            spec_, centers_, alphas_,
                            std::span<const double>(centers_).subspan(i * d, d));
  }
  return acc;
}

std::size_t SupportSet::state_bytes() const noexcept {
  return sizeof(*this) + (centers_.capacity() + alphas_.capacity()) * sizeof(double) +
         ids_.capacity() * sizeof(std::size_t);
}

Omkl::Omkl(std::span<const KernelSpec> kernels, const OmklOptions& options) : options_(options) {
  if (kernels.empty()) throw std::invalid_argument("Omkl: kernel dictionary is empty");
  if (!(options_.eta_theta > 0.0)) throw std::invalid_argument("Omkl: eta_theta must be positive");
  if (!(options_.eta_weight > 0.0 && options_.eta_weight < 1.0)) {
    throw std::invalid_argument("Omkl: eta_weight must lie in (0, 1)");
  }
  options_.loss.validate();
  for (const auto& k : kernels) {
    if (k.input_dim != kernels.front().input_dim) {
      throw DimensionError("Omkl: kernels disagree on input dimension");
    }
    sets_.emplace_back(k, options_.budget);
  }
  log_weights_.assign(sets_.size(), 0.0);
}

MixturePrediction Omkl::predict(std::span<const double> x) const {
  const std::vector<double> w = normalized_weights();
  MixturePrediction out;
  out.per_kernel.resize(sets_.size());
  for (std::size_t p = 0; p < sets_.size(); ++p) {
    out.per_kernel[p] = sets_[p].predict(x);
    out.prediction += w[p] * out.per_kernel[p];
  }
  return out;
}

SlotReport Omkl::update(std::span<const double> x, double y) {
  check_label(options_.loss, y);
  SlotReport report;
  report.t = t_ + 1;
  report.normalized_weights = normalized_weights();
  MixturePrediction pred = predict(x);
  report.prediction = pred.prediction;
  report.per_kernel_predictions = std::move(pred.per_kernel);
  report.per_kernel_losses.resize(sets_.size());
  double combined_sq = 0.0;
  for (std::size_t p = 0; p < sets_.size(); ++p) {
    const double w = report.normalized_weights[p];
    report.per_kernel_losses[p] =
        loss_value(options_.loss, report.per_kernel_predictions[p], y, sets_[p].sq_norm());
    combined_sq += w * w * sets_[p].sq_norm();
  }
  report.combined_loss = loss_value(options_.loss, report.prediction, y, combined_sq);
  if (!std::isfinite(report.combined_loss)) {
    throw NumericError("Omkl: non-finite loss at slot " + std::to_string(report.t));
  }

  const std::size_t work = sets_.size() * sets_.front().size() * sets_.front().spec().input_dim;
  parallel_for(sets_.size(), work, kernels::kParallelThreshold, [&](std::size_t p) {
    sets_[p].step(options_.loss, x, y, options_.eta_theta);
  });

  for (std::size_t p = 0; p < sets_.size(); ++p) {
    const double l = report.per_kernel_losses[p];
    log_weights_[p] -= options_.eta_weight * (options_.loss.clip_for_weights ? clip_unit(l) : l);
  }
  const double top = *std::max_element(log_weights_.begin(), log_weights_.end());
  for (double& lw : log_weights_) lw -= top;
  ++t_;
  return report;
}

std::size_t Omkl::state_bytes() const noexcept {
  std::size_t bytes = sizeof(*this) + log_weights_.capacity() * sizeof(double);
  for (const auto& s : sets_) bytes += s.state_bytes();
  return bytes;
}

}  // namespace raker
