#include "raker/experiment.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "raker/adaraker.hpp"
#include "raker/baselines.hpp"
#include "raker/errors.hpp"
#include "raker/learner.hpp"
#include "raker/raker.hpp"

namespace raker {

namespace {

double theta_stepsize(const ExperimentConfig& config, std::size_t horizon) {
  return config.eta_theta.value_or(default_stepsize(1.0, horizon));
}

// Features computed in predict() are reused by the update() that follows.
class FeatureCache {
 public:
  const KernelFeatures& get(const std::vector<FeatureMapPtr>& maps, std::span<const double> x) {
    if (!valid_ || !std::equal(x.begin(), x.end(), x_.begin(), x_.end())) {
      x_.assign(x.begin(), x.end());
      z_ = map_all(maps, x);
      valid_ = true;
    }
    return z_;
  }
  void invalidate() { valid_ = false; }

 private:
  bool valid_ = false;
  std::vector<double> x_;
  KernelFeatures z_;
};

class RakerAlgorithm final : public OnlineAlgorithm {
 public:
  RakerAlgorithm(const ExperimentConfig& c, const std::vector<KernelSpec>& kernels,
                 std::size_t horizon)
      : raker_(kernels, [&] {
          RakerOptions o;
          o.num_features = c.num_features;
          o.variant = c.variant;
          o.eta_theta = theta_stepsize(c, horizon);
          o.eta_weight = c.eta_weight;
          o.loss = c.loss_spec();
          o.seed = c.seed;
          return o;
        }()) {}

  std::string name() const override { return "raker"; }
  std::vector<std::string> weight_columns() const override {
    std::vector<std::string> cols;
    for (std::size_t p = 0; p < raker_.num_kernels(); ++p) cols.push_back("w_" + std::to_string(p + 1));
    return cols;
  }
  double predict(std::span<const double> x) override {
    return raker_.predict_features(cache_.get(raker_.feature_maps(), x)).prediction;
  }
  StepOutcome update(std::span<const double> x, double y) override {
    SlotReport r = raker_.update_features(cache_.get(raker_.feature_maps(), x), y);
    cache_.invalidate();
    return StepOutcome{r.prediction, r.combined_loss, std::move(r.normalized_weights)};
  }
  std::size_t state_bytes() const override {
    std::size_t bytes = raker_.state_bytes();
    for (const auto& m : raker_.feature_maps()) bytes += m->state_bytes();
    return bytes;
  }

 private:
  Raker raker_;
  FeatureCache cache_;
};

class AdaRakerAlgorithm final : public OnlineAlgorithm {
 public:
  AdaRakerAlgorithm(const ExperimentConfig& c, const std::vector<KernelSpec>& kernels,
                    std::size_t horizon)
      : ada_(kernels,
             [&] {
               AdaRakerOptions o;
               o.num_features = c.num_features;
               o.variant = c.variant;
               o.eta0 = c.eta0;
               o.loss = c.loss_spec();
               o.seed = c.seed;
               o.flip_relative_loss = c.flip_relative_loss;
               return o;
             }()),
        levels_(static_cast<std::size_t>(std::bit_width(std::max<std::size_t>(horizon, 1)))) {}

  std::string name() const override { return "adaraker"; }
  std::vector<std::string> weight_columns() const override {
    std::vector<std::string> cols;
    for (std::size_t j = 0; j < levels_; ++j) cols.push_back("h_" + std::to_string(j));
    return cols;
  }
  double predict(std::span<const double> x) override { return ada_.predict(x).prediction; }
  StepOutcome update(std::span<const double> x, double y) override {
    AdaSlotReport r = ada_.update(x, y);
    std::vector<double> h(levels_, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < r.intervals.size(); ++i) {
      const std::size_t level = r.intervals[i].level;
      if (level < levels_) h[level] = r.normalized_weights[i];
    }
    return StepOutcome{r.prediction, r.overall_loss, std::move(h)};
  }
  std::size_t state_bytes() const override {
    std::size_t bytes = ada_.state_bytes();
    for (const auto& m : ada_.feature_maps()) bytes += m->state_bytes();
    return bytes;
  }

 private:
  AdaRaker ada_;
  std::size_t levels_;
};

class SingleKernelAlgorithm final : public OnlineAlgorithm {
 public:
  SingleKernelAlgorithm(const ExperimentConfig& c, const std::vector<KernelSpec>& kernels,
                        std::size_t index, std::size_t horizon)
      : index_(index),
        learner_(make_feature_maps(kernels, c.num_features, c.variant, c.seed).at(index),
                 LearnerOptions{theta_stepsize(c, horizon), c.loss_spec(), StepSchedule::Constant,
                                std::nullopt}) {}

  std::string name() const override { return "single:" + std::to_string(index_); }
  std::vector<std::string> weight_columns() const override { return {}; }
  double predict(std::span<const double> x) override { return learner_.predict_input(x); }
  StepOutcome update(std::span<const double> x, double y) override {
    const FeatureVector z = learner_.feature_map().map(x);
    const double pred = learner_.predict(z);
    const double loss = learner_.loss(z, y);
    learner_.step(z, y);
    return StepOutcome{pred, loss, {}};
  }
  std::size_t state_bytes() const override {
    return learner_.state_bytes() + learner_.feature_map().state_bytes();
  }

 private:
  std::size_t index_;
  KernelLearner learner_;
};

class OmklAlgorithm final : public OnlineAlgorithm {
 public:
  OmklAlgorithm(const ExperimentConfig& c, const std::vector<KernelSpec>& kernels,
                std::optional<std::size_t> budget, std::size_t horizon)
      : omkl_(kernels, OmklOptions{theta_stepsize(c, horizon), c.eta_weight, c.loss_spec(), budget}),
        budget_(budget) {}

  std::string name() const override {
    return budget_ ? "omkl-b:" + std::to_string(*budget_) : "omkl";
  }
  std::vector<std::string> weight_columns() const override {
    std::vector<std::string> cols;
    for (std::size_t p = 0; p < omkl_.num_kernels(); ++p) cols.push_back("w_" + std::to_string(p + 1));
    return cols;
  }
  double predict(std::span<const double> x) override { return omkl_.predict(x).prediction; }
  StepOutcome update(std::span<const double> x, double y) override {
    SlotReport r = omkl_.update(x, y);
    return StepOutcome{r.prediction, r.combined_loss, std::move(r.normalized_weights)};
  }
  std::size_t state_bytes() const override { return omkl_.state_bytes(); }

 private:
  Omkl omkl_;
  std::optional<std::size_t> budget_;
};

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

}  // namespace

std::unique_ptr<OnlineAlgorithm> make_algorithm(const AlgorithmSpec& spec,
                                                const ExperimentConfig& config,
                                                std::size_t input_dim, std::size_t horizon) {
  const std::vector<KernelSpec> kernels = config.kernel_specs(input_dim);
  switch (spec.kind) {
    case AlgorithmSpec::Kind::Raker:
      return std::make_unique<RakerAlgorithm>(config, kernels, horizon);
    case AlgorithmSpec::Kind::AdaRaker:
      return std::make_unique<AdaRakerAlgorithm>(config, kernels, horizon);
    case AlgorithmSpec::Kind::Single:
      return std::make_unique<SingleKernelAlgorithm>(config, kernels, spec.kernel_index, horizon);
    case AlgorithmSpec::Kind::Omkl:
      return std::make_unique<OmklAlgorithm>(config, kernels, std::nullopt, horizon);
    case AlgorithmSpec::Kind::OmklBudget:
      return std::make_unique<OmklAlgorithm>(config, kernels, spec.budget, horizon);
  }
  throw ConfigError("unsupported algorithm");
}

RunResult run_online(OnlineAlgorithm& algorithm, SampleSource& source, TaskKind task) {
  using Clock = std::chrono::steady_clock;
  RunResult run;
  run.algorithm = algorithm.name();
  run.weight_columns = algorithm.weight_columns();
  const std::size_t n = source.size();
  run.ys.reserve(n);
  run.predictions.reserve(n);
  run.losses.reserve(n);
  run.weights.reserve(n);
  std::vector<double> step_us;
  step_us.reserve(n);

  const auto start = Clock::now();
  for (std::size_t i = 0; i < n; ++i) {
    try {
      const std::span<const double> x = source.features(i);
      const auto t0 = Clock::now();
      const double yhat = algorithm.predict(x);
      const double y = source.label(i);
      StepOutcome out = algorithm.update(x, y);
      const auto t1 = Clock::now();
      if (out.prediction != yhat) {
        throw std::logic_error("update() saw a different prediction than predict()");
      }
      step_us.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
      run.ys.push_back(y);
      run.predictions.push_back(yhat);
      run.losses.push_back(out.loss);
      run.weights.push_back(std::move(out.weights));
      run.peak_state_bytes = std::max(run.peak_state_bytes, algorithm.state_bytes());
    } catch (const std::exception& e) {
      throw RunError(algorithm.name(), i + 1, e.what());
    }
  }
  run.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  run.median_step_us = median(step_us);

  if (task == TaskKind::Regression) {
    run.metric_name = "mse";
    run.running_metric = mse_curve(run.predictions, run.ys);
  } else {
    run.metric_name = "error";
    run.running_metric = class_error_curve(run.predictions, run.ys);
  }
  run.final_metric = run.running_metric.empty() ? 0.0 : run.running_metric.back();
  return run;
}

void write_telemetry(std::ostream& out, const RunResult& run) {
  out << "t,y,yhat,loss," << (run.metric_name == "mse" ? "cum_mse" : "cum_err");
  for (const auto& c : run.weight_columns) out << ',' << c;
  out << '\n';
  for (std::size_t i = 0; i < run.ys.size(); ++i) {
    out << (i + 1) << ',' << format_double(run.ys[i]) << ',' << format_double(run.predictions[i])
        << ',' << format_double(run.losses[i]) << ',' << format_double(run.running_metric[i]);
    for (double w : run.weights[i]) {
      out << ',';
      if (!std::isnan(w)) out << format_double(w);
    }
    out << '\n';
  }
}

Stream build_stream(const ExperimentConfig& config) {
  const StreamConfig& s = config.stream;
  if (s.source == StreamConfig::Source::Csv) {
    CsvOptions opts;
    opts.label_column = s.label_column;
    opts.feature_columns = s.feature_columns;
    opts.normalize = s.normalize;
    opts.task = config.task;
    return load_csv(s.csv_path, opts);
  }
  if (s.preset == "stationary") {
    return gen_stationary_stream(KernelSpec{s.target_family, s.target_bandwidth, s.dim}, s.dim,
                                 s.horizon, s.noise_std, config.seed)
        .records;
  }
  SwitchingSchedule schedule;
  if (s.preset == "two-segment") {
    schedule = two_segment_schedule(s.horizon, s.switch_at, s.sigma_sq_before, s.sigma_sq_after);
  } else if (s.preset == "dataset1") {
    schedule = dataset1_schedule();
  } else if (s.preset == "dataset1-rescaled") {
    schedule = dataset1_schedule().rescaled(s.horizon);
  } else if (s.preset == "dataset2") {
    schedule = dataset2_schedule();
  } else {
    throw ConfigError("unknown synthetic preset '" + s.preset + "'");
  }
  try {
    return gen_switching_stream(schedule, s.dim, s.horizon, s.sigma_alpha, config.seed);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("stream: ") + e.what());
  }
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Stream stream = build_stream(config);
  const std::size_t d = stream_dim(stream);
  std::filesystem::create_directories(config.output_dir);

  ExperimentSummary summary;
  for (const auto& spec : config.algorithms) {
    auto algorithm = make_algorithm(spec, config, d, stream.size());
    StreamSource source(stream);
    RunResult run = run_online(*algorithm, source, config.task);
    const auto path = config.output_dir / ("telemetry_" + spec.file_stem() + ".csv");
    std::ofstream out = open_output(path);
    write_telemetry(out, run);
    summary.files.push_back(path);
    summary.runs.push_back(std::move(run));
  }

  const auto path = config.output_dir / "summary.csv";
  std::ofstream out = open_output(path);
  out << "algorithm,metric,final_value,wall_seconds,median_step_us,peak_state_bytes\n";
  for (const auto& run : summary.runs) {
    out << run.algorithm << ',' << run.metric_name << ',' << format_double(run.final_metric) << ','
        << format_double(run.wall_seconds) << ',' << format_double(run.median_step_us) << ','
        << run.peak_state_bytes << '\n';
  }
  summary.files.push_back(path);
  return summary;
}

RegretTrace regret_report(const ExperimentConfig& config, const std::string& algorithm,
                          const Stream& stream) {
  if (config.task != TaskKind::Regression || config.loss_spec().kind != LossKind::SquaredError) {
    throw ConfigError("regret reports need the squared loss (the batch oracle is least squares)");
  }
  const std::size_t d = stream_dim(stream);
  const auto kernels = config.kernel_specs(d);
  const auto maps = make_feature_maps(kernels, config.num_features, config.variant, config.seed);
  const RfOracle oracle = batch_rf_oracle(stream, maps, config.lambda);
  const std::span<const double> oracle_losses = oracle.slot_losses();

  if (algorithm == "oracle") return static_regret(oracle_losses, oracle_losses);

  auto algo = make_algorithm(parse_algorithm(algorithm), config, d, stream.size());
  StreamSource source(stream);
  const RunResult run = run_online(*algo, source, config.task);
  return static_regret(run.losses, oracle_losses);
}

std::filesystem::path emit_regret_report(const ExperimentConfig& config,
                                         const std::string& algorithm) {
  config.validate();
  const Stream stream = build_stream(config);
  const RegretTrace trace = regret_report(config, algorithm, stream);
  std::filesystem::create_directories(config.output_dir);
  std::string stem = algorithm;
  std::replace(stem.begin(), stem.end(), ':', '_');
  const auto path = config.output_dir / ("regret_" + stem + ".csv");
  std::ofstream out = open_output(path);
  write_regret_csv(out, trace);
  return path;
}

}  // namespace raker
