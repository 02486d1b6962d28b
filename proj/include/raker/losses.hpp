#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace raker {

enum class LossKind { SquaredError, Hinge, Logistic };

std::string_view to_string(LossKind kind);
LossKind parse_loss_kind(std::string_view name);

// Regularized per-slot loss C(pred, y) + lambda * ||theta||^2.
struct LossSpec {
  LossKind kind = LossKind::SquaredError;
  double lambda = 0.0;
  // Clip per-kernel losses into [-1, 1] before they enter multiplicative
  // weight updates.
  bool clip_for_weights = true;

  void validate() const;
  bool is_classification() const noexcept { return kind != LossKind::SquaredError; }
};

// Throws std::invalid_argument for labels outside {-1, +1} on classification losses.
void check_label(const LossSpec& spec, double y);

double data_loss(const LossSpec& spec, double pred, double y);
double loss_value(const LossSpec& spec, double pred, double y, double theta_sq_norm);

// dC/dpred. Hinge uses 0 at the kink (margin exactly 1).
double data_loss_derivative(const LossSpec& spec, double pred, double y);

// Gradient w.r.t. theta of C(theta^T z, y) + lambda ||theta||^2.
void loss_gradient(const LossSpec& spec, std::span<const double> z, std::span<const double> theta,
                   double y, std::span<double> out);
std::vector<double> loss_gradient(const LossSpec& spec, std::span<const double> z,
                                  std::span<const double> theta, double y);

double clip_unit(double v);

}  // namespace raker
