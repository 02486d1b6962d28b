#include "raker/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "raker/errors.hpp"
#include "raker/kernels.hpp"

namespace raker {

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::SquaredError:
      return "squared";
    case LossKind::Hinge:
      return "hinge";
    case LossKind::Logistic:
      return "logistic";
  }
  return "unknown";
}

LossKind parse_loss_kind(std::string_view name) {
  if (name == "squared" || name == "ls" || name == "squared_error") return LossKind::SquaredError;
  if (name == "hinge") return LossKind::Hinge;
  if (name == "logistic") return LossKind::Logistic;
  throw std::invalid_argument("unknown loss '" + std::string(name) + "'");
}

void LossSpec::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("LossSpec: lambda must be finite and >= 0");
  }
}

void check_label(const LossSpec& spec, double y) {
  if (spec.is_classification() && y != 1.0 && y != -1.0) {
    throw std::invalid_argument("label must be -1 or +1 for " + std::string(to_string(spec.kind)) +
                                " loss, got " + std::to_string(y));
  }
}

namespace {

// log(1 + exp(-m)) without overflow.
double softplus_neg(double m) {
  if (m > 0.0) return std::log1p(std::exp(-m));
  return -m + std::log1p(std::exp(m));
}

}  // namespace

double data_loss(const LossSpec& spec, double pred, double y) {
  check_label(spec, y);
  switch (spec.kind) {
    case LossKind::SquaredError: {
      const double r = y - pred;
      return r * r;
    }
    case LossKind::Hinge:
      return std::max(0.0, 1.0 - y * pred);
    case LossKind::Logistic:
      return softplus_neg(y * pred);
  }
  return 0.0;
}

double loss_value(const LossSpec& spec, double pred, double y, double theta_sq_norm) {
  return data_loss(spec, pred, y) + spec.lambda * theta_sq_norm;
}

double data_loss_derivative(const LossSpec& spec, double pred, double y) {
  check_label(spec, y);
  switch (spec.kind) {
    case LossKind::SquaredError:
      return 2.0 * (pred - y);
    case LossKind::Hinge:
      return (y * pred < 1.0) ? -y : 0.0;
    case LossKind::Logistic:
      // -y * sigmoid(-y * pred)
      return -y / (1.0 + std::exp(y * pred));
  }
  return 0.0;
}

void loss_gradient(const LossSpec& spec, std::span<const double> z, std::span<const double> theta,
                   double y, std::span<double> out) {
  require_same_length(z.size(), theta.size(), "loss_gradient");
  require_same_length(out.size(), theta.size(), "loss_gradient output");
  const double g = data_loss_derivative(spec, kernels::dot(theta, z), y);
  const double reg = 2.0 * spec.lambda;
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = g * z[i] + reg * theta[i];
}

std::vector<double> loss_gradient(const LossSpec& spec, std::span<const double> z,
                                  std::span<const double> theta, double y) {
  std::vector<double> out(theta.size());
  loss_gradient(spec, z, theta, y, out);
  return out;
}

double clip_unit(double v) {
  if (std::isnan(v)) throw std::invalid_argument("clip_unit: NaN input");
  return std::clamp(v, -1.0, 1.0);
}

}  // namespace raker
