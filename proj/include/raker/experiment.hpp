#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "raker/config.hpp"
#include "raker/data.hpp"
#include "raker/eval.hpp"

namespace raker {

// Online sample source. The runner asks for features(i), predicts, and only
// then asks for label(i), once per slot, in order.
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual std::size_t size() const = 0;
  virtual std::span<const double> features(std::size_t i) = 0;
  virtual double label(std::size_t i) = 0;
};

class StreamSource : public SampleSource {
 public:
  explicit StreamSource(const Stream& stream) : stream_(stream) {}
  std::size_t size() const override { return stream_.size(); }
  std::span<const double> features(std::size_t i) override { return stream_.at(i).x; }
  double label(std::size_t i) override { return stream_.at(i).y; }

 private:
  const Stream& stream_;
};

struct StepOutcome {
  double prediction = 0.0;
  double loss = 0.0;
  std::vector<double> weights;  // one entry per weight_columns(); NaN renders empty
};

class OnlineAlgorithm {
 public:
  virtual ~OnlineAlgorithm() = default;
  virtual std::string name() const = 0;
  virtual std::vector<std::string> weight_columns() const = 0;
  virtual double predict(std::span<const double> x) = 0;
  // Must be called with the x of the preceding predict().
  virtual StepOutcome update(std::span<const double> x, double y) = 0;
  virtual std::size_t state_bytes() const = 0;
};

std::unique_ptr<OnlineAlgorithm> make_algorithm(const AlgorithmSpec& spec,
                                                const ExperimentConfig& config,
                                                std::size_t input_dim, std::size_t horizon);

// Failure inside an algorithm loop, tagged with where it happened.
class RunError : public std::runtime_error {
 public:
  RunError(const std::string& algorithm, std::size_t slot, const std::string& what)
      : std::runtime_error(algorithm + " failed at slot " + std::to_string(slot) + ": " + what),
        algorithm_(algorithm),
        slot_(slot) {}
  const std::string& algorithm() const noexcept { return algorithm_; }
  std::size_t slot() const noexcept { return slot_; }

 private:
  std::string algorithm_;
  std::size_t slot_;
};

struct RunResult {
  std::string algorithm;
  std::vector<std::string> weight_columns;
  std::vector<double> ys;
  std::vector<double> predictions;
  std::vector<double> losses;
  std::vector<double> running_metric;  // MSE(t) or classification error(t)
  std::vector<std::vector<double>> weights;
  std::string metric_name;
  double final_metric = 0.0;
  double wall_seconds = 0.0;
  double median_step_us = 0.0;
  std::size_t peak_state_bytes = 0;
};

RunResult run_online(OnlineAlgorithm& algorithm, SampleSource& source, TaskKind task);

// Columns: t,y,yhat,loss,<cum_mse|cum_err>,<weight columns>.
void write_telemetry(std::ostream& out, const RunResult& run);

Stream build_stream(const ExperimentConfig& config);

struct ExperimentSummary {
  std::vector<RunResult> runs;
  std::vector<std::filesystem::path> files;
};

// Runs every configured algorithm on the stream and writes
// telemetry_<algo>.csv per algorithm plus summary.csv into output_dir.
ExperimentSummary run_experiment(const ExperimentConfig& config);

// Static regret of one algorithm against the best fixed random-feature
// function in hindsight (same feature maps as the learners). The name may
// also be "oracle", which replays the comparator itself. Squared loss only.
RegretTrace regret_report(const ExperimentConfig& config, const std::string& algorithm,
                          const Stream& stream);
std::filesystem::path emit_regret_report(const ExperimentConfig& config,
                                         const std::string& algorithm);

}  // namespace raker
