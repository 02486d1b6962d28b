#include "raker/eval.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "raker/errors.hpp"
#include "raker/kernels.hpp"

namespace raker {

std::vector<double> mse_curve(std::span<const double> preds, std::span<const double> ys) {
  require_same_length(preds.size(), ys.size(), "mse_curve");
  std::vector<double> out(preds.size());
  double total = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double r = ys[i] - preds[i];
    total += r * r;
    out[i] = total / static_cast<double>(i + 1);
  }
  return out;
}

namespace {

bool misclassified(double pred, double y) {
  if (y != 1.0 && y != -1.0) {
    throw std::invalid_argument("class_error: labels must be -1 or +1, got " + std::to_string(y));
  }
  return !(y * pred > 0.0);
}

}  // namespace

double class_error(std::span<const double> preds, std::span<const double> ys) {
  require_same_length(preds.size(), ys.size(), "class_error");
  if (preds.empty()) return 0.0;
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) wrong += misclassified(preds[i], ys[i]) ? 1 : 0;
  return static_cast<double>(wrong) / static_cast<double>(preds.size());
}

std::vector<double> class_error_curve(std::span<const double> preds, std::span<const double> ys) {
  require_same_length(preds.size(), ys.size(), "class_error_curve");
  std::vector<double> out(preds.size());
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    wrong += misclassified(preds[i], ys[i]) ? 1 : 0;
    out[i] = static_cast<double>(wrong) / static_cast<double>(i + 1);
  }
  return out;
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct FeatureDesign {
  RowMatrix z;  // T x 2D
  Eigen::VectorXd y;
};

FeatureDesign build_design(const Stream& stream, const FeatureMap& map) {
  if (stream.empty()) throw std::invalid_argument("batch oracle: empty stream");
  const std::size_t d = map.input_dim();
  const std::size_t k = map.feature_dim();
  std::vector<double> xs(stream.size() * d);
  FeatureDesign out{RowMatrix(static_cast<Eigen::Index>(stream.size()), static_cast<Eigen::Index>(k)),
                    Eigen::VectorXd(static_cast<Eigen::Index>(stream.size()))};
  for (std::size_t t = 0; t < stream.size(); ++t) {
    require_same_length(stream[t].x.size(), d, "batch oracle: record dimension");
    std::copy(stream[t].x.begin(), stream[t].x.end(), xs.begin() + static_cast<std::ptrdiff_t>(t * d));
    out.y(static_cast<Eigen::Index>(t)) = stream[t].y;
  }
  map.map_batch(xs, std::span<double>(out.z.data(), static_cast<std::size_t>(out.z.size())));
  return out;
}

std::vector<double> slot_losses_for(const FeatureDesign& design, const Eigen::VectorXd& theta,
                                    double lambda) {
  const Eigen::VectorXd resid = design.z * theta - design.y;
  const double reg = lambda * theta.squaredNorm();
  std::vector<double> out(static_cast<std::size_t>(resid.size()));
  for (Eigen::Index t = 0; t < resid.size(); ++t) out[static_cast<std::size_t>(t)] = resid(t) * resid(t) + reg;
  return out;
}

double total(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc;
}

}  // namespace

RidgeSolution solve_rf_ridge(const Stream& stream, const FeatureMap& map, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("batch oracle: lambda must be >= 0");
  const std::size_t k = map.feature_dim();
  if (k > kMaxOracleFeatureDim) {
    throw std::invalid_argument("batch oracle: 2D = " + std::to_string(k) + " exceeds " +
                                std::to_string(kMaxOracleFeatureDim));
  }
  const FeatureDesign design = build_design(stream, map);
  const double n = static_cast<double>(stream.size());

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  {
    // gram_accumulate works on row-major storage; the Gram matrix is symmetric.
    std::vector<double> g(k * k, 0.0);
    std::vector<double> r(k, 0.0);
    kernels::gram_accumulate(std::span<const double>(design.z.data(), static_cast<std::size_t>(design.z.size())), k,
                             std::span<const double>(design.y.data(), stream.size()), g, r);
    for (std::size_t i = 0; i < k; ++i) {
      rhs(static_cast<Eigen::Index>(i)) = r[i];
      for (std::size_t j = 0; j < k; ++j) gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g[i * k + j];
    }
  }
  gram.diagonal().array() += lambda * n;

  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-14) {
    throw NumericError("batch oracle: normal equations are singular" +
                       std::string(lambda == 0.0 ? " (lambda = 0 with rank-deficient features)" : ""));
  }
  const Eigen::VectorXd theta = llt.solve(rhs);

  RidgeSolution out;
  out.theta.assign(theta.data(), theta.data() + theta.size());
  out.slot_losses = slot_losses_for(design, theta, lambda);
  out.loss = total(out.slot_losses);
  return out;
}

double rf_cumulative_loss(const Stream& stream, const FeatureMap& map,
                          std::span<const double> theta, double lambda) {
  require_same_length(theta.size(), map.feature_dim(), "rf_cumulative_loss");
  const FeatureDesign design = build_design(stream, map);
  const Eigen::Map<const Eigen::VectorXd> th(theta.data(), static_cast<Eigen::Index>(theta.size()));
  return total(slot_losses_for(design, th, lambda));
}

double rf_optimality_residual(const Stream& stream, const FeatureMap& map,
                              std::span<const double> theta, double lambda) {
  require_same_length(theta.size(), map.feature_dim(), "rf_optimality_residual");
  const FeatureDesign design = build_design(stream, map);
  const Eigen::Map<const Eigen::VectorXd> th(theta.data(), static_cast<Eigen::Index>(theta.size()));
  const Eigen::VectorXd g = design.z.transpose() * (design.z * th - design.y) +
                            lambda * static_cast<double>(stream.size()) * th;
  return g.norm();
}

RfOracle batch_rf_oracle(const Stream& stream, std::span<const FeatureMapPtr> maps, double lambda) {
  if (maps.empty()) throw std::invalid_argument("batch oracle: no kernels");
  RfOracle out;
  out.per_kernel.reserve(maps.size());
  for (const auto& m : maps) out.per_kernel.push_back(solve_rf_ridge(stream, *m, lambda));
  for (std::size_t p = 1; p < out.per_kernel.size(); ++p) {
    if (out.per_kernel[p].loss < out.per_kernel[out.best_kernel].loss) out.best_kernel = p;
  }
  out.oracle_loss = out.per_kernel[out.best_kernel].loss;
  return out;
}

ExactOracle batch_exact_oracle(const Stream& stream, std::span<const KernelSpec> kernels,
                               double lambda) {
  if (stream.empty()) throw std::invalid_argument("exact oracle: empty stream");
  if (stream.size() > kMaxExactOracleSlots) {
    throw std::invalid_argument("exact oracle: limited to " + std::to_string(kMaxExactOracleSlots) +
                                " samples");
  }
  if (kernels.empty()) throw std::invalid_argument("exact oracle: no kernels");
  const auto n = static_cast<Eigen::Index>(stream.size());
  Eigen::VectorXd y(n);
  for (Eigen::Index t = 0; t < n; ++t) y(t) = stream[static_cast<std::size_t>(t)].y;

  ExactOracle out;
  out.kernel_losses.resize(kernels.size());
  for (std::size_t p = 0; p < kernels.size(); ++p) {
    Eigen::MatrixXd gram(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        const double v = exact_eval(kernels[p], stream[static_cast<std::size_t>(i)].x,
                                    stream[static_cast<std::size_t>(j)].x);
        gram(i, j) = v;
        gram(j, i) = v;
      }
    }
    Eigen::MatrixXd system = gram;
    system.diagonal().array() += lambda * static_cast<double>(n);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
    if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-14) {
      throw NumericError("exact oracle: kernel system is singular");
    }
    const Eigen::VectorXd alpha = ldlt.solve(y);
    const Eigen::VectorXd fitted = gram * alpha;
    const double reg = lambda * alpha.dot(fitted);
    std::vector<double> slots(stream.size());
    for (Eigen::Index t = 0; t < n; ++t) {
      const double r = fitted(t) - y(t);
      slots[static_cast<std::size_t>(t)] = r * r + reg;
    }
    out.kernel_losses[p] = total(slots);
    if (p == 0 || out.kernel_losses[p] < out.oracle_loss) {
      out.best_kernel = p;
      out.oracle_loss = out.kernel_losses[p];
      out.alpha.assign(alpha.data(), alpha.data() + alpha.size());
      out.slot_losses = std::move(slots);
    }
  }
  return out;
}

RegretTrace static_regret(std::span<const double> algo_losses,
                          std::span<const double> oracle_slot_losses) {
  require_same_length(algo_losses.size(), oracle_slot_losses.size(), "static_regret");
  RegretTrace trace;
  const std::size_t n = algo_losses.size();
  trace.cum_algo.resize(n);
  trace.cum_oracle.resize(n);
  trace.regret.resize(n);
  double a = 0.0;
  double o = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    a += algo_losses[i];
    o += oracle_slot_losses[i];
    trace.cum_algo[i] = a;
    trace.cum_oracle[i] = o;
    trace.regret[i] = a - o;
    const std::size_t t = i + 1;
    if (std::has_single_bit(t)) {
      trace.checkpoints.push_back({t, trace.regret[i] / std::sqrt(static_cast<double>(t))});
    }
  }
  return trace;
}

double static_regret(std::span<const double> algo_losses, double oracle_loss) {
  return total(algo_losses) - oracle_loss;
}

void write_regret_csv(std::ostream& out, const RegretTrace& trace) {
  out << "t,cum_algo_loss,cum_oracle_loss,regret,regret_over_sqrt_t\n";
  for (std::size_t i = 0; i < trace.regret.size(); ++i) {
    const double t = static_cast<double>(i + 1);
    out << (i + 1) << ',' << format_double(trace.cum_algo[i]) << ','
        << format_double(trace.cum_oracle[i]) << ',' << format_double(trace.regret[i]) << ','
        << format_double(trace.regret[i] / std::sqrt(t)) << '\n';
  }
}

PiecewiseRegret dynamic_regret_piecewise(std::span<const double> algo_losses, const Stream& stream,
                                         std::span<const std::uint64_t> switch_points,
                                         std::span<const FeatureMapPtr> maps, double lambda) {
  require_same_length(algo_losses.size(), stream.size(), "dynamic_regret_piecewise");
  std::vector<std::size_t> bounds{0};
  for (std::uint64_t s : switch_points) {
    if (s < 2 || s > stream.size() || s - 1 <= bounds.back()) {
      throw std::invalid_argument("dynamic_regret_piecewise: switch points must be increasing and inside [2, T]");
    }
    bounds.push_back(static_cast<std::size_t>(s - 1));
  }
  bounds.push_back(stream.size());

  PiecewiseRegret out;
  out.algo_loss = total(algo_losses);
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
    const Stream segment(stream.begin() + static_cast<std::ptrdiff_t>(bounds[i]),
                         stream.begin() + static_cast<std::ptrdiff_t>(bounds[i + 1]));
    out.segments.push_back(batch_rf_oracle(segment, maps, lambda));
    out.comparator_loss += out.segments.back().oracle_loss;
  }
  out.regret = out.algo_loss - out.comparator_loss;
  return out;
}

}  // namespace raker
