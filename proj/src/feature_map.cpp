#include "raker/feature_map.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "raker/errors.hpp"
#include "raker/kernels.hpp"
#include "raker/rng.hpp"

namespace raker {

std::string_view to_string(FeatureVariant variant) {
  return variant == FeatureVariant::RF ? "rf" : "orf";
}

FeatureVariant parse_feature_variant(std::string_view name) {
  if (name == "rf" || name == "RF") return FeatureVariant::RF;
  if (name == "orf" || name == "ORF") return FeatureVariant::ORF;
  throw std::invalid_argument("unknown feature variant '" + std::string(name) + "'");
}

namespace {

std::vector<double> sample_iid(const KernelSpec& spec, std::size_t num, std::mt19937_64& rng) {
  const std::size_t d = spec.input_dim;
  std::vector<double> rows(num * d);
  switch (spec.family) {
    case KernelFamily::Gaussian: {
      std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(spec.bandwidth));
      for (double& v : rows) v = normal(rng);
      break;
    }
    case KernelFamily::Laplacian: {
      // exp(-|u|/s) per coordinate <-> Cauchy(0, 1/s).
      std::cauchy_distribution<double> cauchy(0.0, 1.0 / spec.bandwidth);
      for (double& v : rows) v = cauchy(rng);
      break;
    }
    case KernelFamily::Cauchy: {
      // 1/(1 + (u/s)^2) per coordinate <-> Laplace(0, 1/s).
      std::exponential_distribution<double> magnitude(spec.bandwidth);
      std::bernoulli_distribution negative(0.5);
      for (double& v : rows) {
        const double m = magnitude(rng);
        v = negative(rng) ? -m : m;
      }
      break;
    }
  }
  return rows;
}

std::vector<double> sample_orthogonal(const KernelSpec& spec, std::size_t num,
                                      std::mt19937_64& rng) {
  const std::size_t d = spec.input_dim;
  const auto dim = static_cast<Eigen::Index>(d);
  const double inv_sigma = 1.0 / std::sqrt(spec.bandwidth);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> rows(num * d);

  for (std::size_t block = 0; block < num / d; ++block) {
    Eigen::MatrixXd gaussian(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (Eigen::Index j = 0; j < dim; ++j) gaussian(i, j) = normal(rng);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
    // Fix the column signs so Q is Haar distributed.
    const Eigen::MatrixXd& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (r(j, j) < 0.0) q.col(j) *= -1.0;
    }
    for (std::size_t i = 0; i < d; ++i) {
      // chi_d row length, realized as the norm of a fresh standard normal d-vector.
      double sq = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double g = normal(rng);
        sq += g * g;
      }
      const double length = std::sqrt(sq) * inv_sigma;
      double* out = rows.data() + (block * d + i) * d;
      for (std::size_t k = 0; k < d; ++k) {
        out[k] = length * q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      }
    }
  }
  return rows;
}

}  // namespace

FeatureMap::FeatureMap(KernelSpec spec, std::size_t num_features, FeatureVariant variant,
                       std::uint64_t seed, std::vector<double> spectral)
    : spec_(spec),
      num_features_(num_features),
      variant_(variant),
      seed_(seed),
      spectral_(std::move(spectral)) {}

FeatureMap FeatureMap::sample(const KernelSpec& spec, std::size_t num_features,
                              FeatureVariant variant, std::uint64_t seed) {
  spec.validate();
  if (num_features == 0) {
    throw std::invalid_argument("FeatureMap: number of features must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::vector<double> rows;
  if (variant == FeatureVariant::RF) {
    rows = sample_iid(spec, num_features, rng);
  } else {
    if (spec.family != KernelFamily::Gaussian) {
      throw std::invalid_argument("FeatureMap: ORF is only defined for the Gaussian kernel");
    }
    if (num_features % spec.input_dim != 0) {
      throw std::invalid_argument("FeatureMap: ORF needs D to be a multiple of d (D=" +
                                  std::to_string(num_features) +
                                  ", d=" + std::to_string(spec.input_dim) + ")");
    }
    rows = sample_orthogonal(spec, num_features, rng);
  }
  return FeatureMap(spec, num_features, variant, seed, std::move(rows));
}

std::span<const double> FeatureMap::row(std::size_t i) const {
  if (i >= num_features_) throw std::out_of_range("FeatureMap::row");
  return std::span<const double>(spectral_).subspan(i * input_dim(), input_dim());
}

void FeatureMap::map(std::span<const double> x, std::span<double> out) const {
  require_same_length(x.size(), input_dim(), "FeatureMap::map input");
  require_same_length(out.size(), feature_dim(), "FeatureMap::map output");
  kernels::rf_features(spectral_, input_dim(), x, out);
}

FeatureVector FeatureMap::map(std::span<const double> x) const {
  FeatureVector z(feature_dim());
  map(x, z);
  return z;
}

void FeatureMap::map_batch(std::span<const double> xs, std::span<double> out) const {
  if (xs.size() % input_dim() != 0) {
    throw DimensionError("FeatureMap::map_batch: input size not a multiple of d");
  }
  require_same_length(out.size(), (xs.size() / input_dim()) * feature_dim(),
                      "FeatureMap::map_batch output");
  kernels::rf_features_batch(spectral_, input_dim(), xs, out);
}

double FeatureMap::approx_eval(std::span<const double> x, std::span<const double> x2) const {
  const FeatureVector a = map(x);
  const FeatureVector b = map(x2);
  // sin/cos pairs summed per frequency: commutative in (a, b), so symmetric bit for bit.
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double FeatureMap::mean_sq_frequency() const noexcept {
  double acc = 0.0;
  for (double v : spectral_) acc += v * v;
  return acc / static_cast<double>(num_features_);
}

}  // namespace raker
