#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "raker/data.hpp"
#include "raker/raker.hpp"

namespace raker {

// MSE(t) = (1/t) sum_{s <= t} (y_s - yhat_s)^2.
std::vector<double> mse_curve(std::span<const double> preds, std::span<const double> ys);

// Fraction of slots with y * yhat <= 0 (a zero prediction counts as an error).
double class_error(std::span<const double> preds, std::span<const double> ys);
// Running version of class_error.
std::vector<double> class_error_curve(std::span<const double> preds, std::span<const double> ys);

inline constexpr std::size_t kMaxOracleFeatureDim = 2000;

// Regularized least squares in one kernel's feature space:
//   min_theta sum_t (theta^T z(x_t) - y_t)^2 + lambda * T * ||theta||^2.
struct RidgeSolution {
  std::vector<double> theta;
  double loss = 0.0;                // the objective above
  std::vector<double> slot_losses;  // (theta^T z_t - y_t)^2 + lambda ||theta||^2
};

RidgeSolution solve_rf_ridge(const Stream& stream, const FeatureMap& map, double lambda);

// sum_t (theta^T z_t - y_t)^2 + lambda T ||theta||^2 for a given theta.
double rf_cumulative_loss(const Stream& stream, const FeatureMap& map,
                          std::span<const double> theta, double lambda);

// Norm of Z^T (Z theta - y) + lambda T theta; zero at the ridge optimum.
double rf_optimality_residual(const Stream& stream, const FeatureMap& map,
                              std::span<const double> theta, double lambda);

// Best fixed random-feature function in hindsight over a kernel dictionary.
struct RfOracle {
  std::vector<RidgeSolution> per_kernel;
  std::size_t best_kernel = 0;
  double oracle_loss = 0.0;
  std::span<const double> slot_losses() const { return per_kernel[best_kernel].slot_losses; }
  std::span<const double> theta_star() const { return per_kernel[best_kernel].theta; }
};

RfOracle batch_rf_oracle(const Stream& stream, std::span<const FeatureMapPtr> maps, double lambda);

inline constexpr std::size_t kMaxExactOracleSlots = 1000;

// Same comparator in the full RKHS of each kernel (kernel ridge regression,
// alpha = (K + lambda T I)^-1 y). Limited to kMaxExactOracleSlots samples.
struct ExactOracle {
  std::size_t best_kernel = 0;
  double oracle_loss = 0.0;
  std::vector<double> alpha;
  std::vector<double> slot_losses;
  std::vector<double> kernel_losses;
};

ExactOracle batch_exact_oracle(const Stream& stream, std::span<const KernelSpec> kernels,
                               double lambda);

// regret(t) = sum_{s<=t} algo_s - sum_{s<=t} oracle_s, checkpoints at powers of two.
struct RegretTrace {
  std::vector<double> cum_algo;
  std::vector<double> cum_oracle;
  std::vector<double> regret;
  struct Checkpoint {
    std::size_t t;
    double regret_over_sqrt_t;
  };
  std::vector<Checkpoint> checkpoints;

  std::size_t horizon() const noexcept { return regret.size(); }
};

RegretTrace static_regret(std::span<const double> algo_losses,
                          std::span<const double> oracle_slot_losses);
// Final regret only, when just the oracle total is known.
double static_regret(std::span<const double> algo_losses, double oracle_loss);

// t,cum_algo_loss,cum_oracle_loss,regret,regret_over_sqrt_t
void write_regret_csv(std::ostream& out, const RegretTrace& trace);

// Regret against the best fixed function per segment (m-switching comparator).
struct PiecewiseRegret {
  double algo_loss = 0.0;
  double comparator_loss = 0.0;
  double regret = 0.0;
  std::vector<RfOracle> segments;
};

// switch_points: first slot (1-based) of every segment after the first.
PiecewiseRegret dynamic_regret_piecewise(std::span<const double> algo_losses, const Stream& stream,
                                         std::span<const std::uint64_t> switch_points,
                                         std::span<const FeatureMapPtr> maps, double lambda);

}  // namespace raker
