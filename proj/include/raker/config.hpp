#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "raker/data.hpp"
#include "raker/feature_map.hpp"
#include "raker/kernel.hpp"
#include "raker/losses.hpp"

namespace raker {

struct StreamConfig {
  enum class Source { Synthetic, Csv };
  Source source = Source::Synthetic;

  // Synthetic presets: "stationary", "two-segment", "dataset1",
  // "dataset1-rescaled", "dataset2".
  std::string preset = "stationary";
  std::uint64_t horizon = 3000;
  std::size_t dim = 10;
  double noise_std = 0.05;       // stationary
  double sigma_alpha = 0.01;     // switching presets
  std::uint64_t switch_at = 1500;  // two-segment
  double sigma_sq_before = 1.0;
  double sigma_sq_after = 10.0;
  KernelFamily target_family = KernelFamily::Gaussian;  // stationary
  double target_bandwidth = 0.1;

  std::filesystem::path csv_path;
  std::string label_column;
  std::vector<std::string> feature_columns;
  bool normalize = true;
};

struct AlgorithmSpec {
  enum class Kind { Raker, AdaRaker, Single, Omkl, OmklBudget };
  Kind kind = Kind::Raker;
  std::size_t kernel_index = 0;  // Single
  std::size_t budget = 0;        // OmklBudget

  // Canonical text form: raker, adaraker, single:<p>, omkl, omkl-b:<B>.
  std::string name() const;
  // Filesystem-safe form of name().
  std::string file_stem() const;
};

AlgorithmSpec parse_algorithm(std::string_view text);

struct KernelChoice {
  KernelFamily family = KernelFamily::Gaussian;
  double bandwidth = 1.0;
};

struct ExperimentConfig {
  StreamConfig stream;
  TaskKind task = TaskKind::Regression;
  std::optional<LossKind> loss;  // squared for regression, logistic for classification
  std::vector<KernelChoice> kernels{{KernelFamily::Gaussian, 0.1},
                                    {KernelFamily::Gaussian, 1.0},
                                    {KernelFamily::Gaussian, 10.0}};
  std::size_t num_features = 50;
  FeatureVariant variant = FeatureVariant::RF;
  std::vector<AlgorithmSpec> algorithms{AlgorithmSpec{}};
  std::optional<double> eta_theta;  // default 1/sqrt(T)
  double eta_weight = 0.5;
  double eta0 = 1.0;
  double lambda = 0.01;
  bool clip_for_weights = true;
  bool flip_relative_loss = false;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";

  LossSpec loss_spec() const;
  std::vector<KernelSpec> kernel_specs(std::size_t input_dim) const;
  // Throws ConfigError describing the first violated constraint.
  void validate() const;
};

// JSON; unknown keys are rejected and the result is validated. Throws ConfigError.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace raker
