#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "raker/config.hpp"
#include "raker/errors.hpp"
#include "raker/experiment.hpp"

using namespace raker;
namespace fs = std::filesystem;

namespace {

// Records every access so the test can check the online order.
class RecordingSource : public SampleSource {
 public:
  explicit RecordingSource(const Stream& stream) : stream_(stream) {}
  std::size_t size() const override { return stream_.size(); }
  std::span<const double> features(std::size_t i) override {
    log.push_back("x" + std::to_string(i));
    return stream_.at(i).x;
  }
  double label(std::size_t i) override {
    log.push_back("y" + std::to_string(i));
    return stream_.at(i).y;
  }
  std::vector<std::string> log;

 private:
  const Stream& stream_;
};

// Wraps an algorithm and checks that labels never reach predict().
class Spy : public OnlineAlgorithm {
 public:
  Spy(std::unique_ptr<OnlineAlgorithm> inner, RecordingSource& source)
      : inner_(std::move(inner)), source_(source) {}
  std::string name() const override { return inner_->name(); }
  std::vector<std::string> weight_columns() const override { return inner_->weight_columns(); }
  double predict(std::span<const double> x) override {
    events.push_back("predict@" + std::to_string(source_.log.size()));
    return inner_->predict(x);
  }
  StepOutcome update(std::span<const double> x, double y) override {
    events.push_back("update@" + std::to_string(source_.log.size()));
    return inner_->update(x, y);
  }
  std::size_t state_bytes() const override { return inner_->state_bytes(); }
  std::vector<std::string> events;

 private:
  std::unique_ptr<OnlineAlgorithm> inner_;
  RecordingSource& source_;
};

ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig config;
  config.stream.horizon = 120;
  config.stream.dim = 3;
  config.num_features = 10;
  config.output_dir = out;
  return config;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("parse_config: defaults and fields") {
  const auto config = parse_config(R"({"stream": {"preset": "two-segment", "T": 500, "d": 4}})");
  CHECK(config.stream.preset == "two-segment");
  CHECK(config.stream.horizon == 500);
  CHECK(config.lambda == 0.01);
  CHECK(config.eta_weight == 0.5);
  CHECK(config.num_features == 50);
  REQUIRE(config.kernels.size() == 3);
  CHECK(config.kernels[0].bandwidth == 0.1);
  CHECK(config.kernels[2].bandwidth == 10.0);
  CHECK(config.algorithms.size() == 1);

  const auto full = parse_config(R"({
    "algorithms": ["raker", "adaraker", "single:0", "omkl", "omkl-b:50"],
    "kernels": [{"family": "laplacian", "bandwidth": 2.0}],
    "D": 20, "variant": "orf", "eta_theta": 0.05, "seed": 9, "output_dir": "x"})");
  REQUIRE(full.algorithms.size() == 5);
  CHECK(full.algorithms[2].kind == AlgorithmSpec::Kind::Single);
  CHECK(full.algorithms[2].kernel_index == 0);
  CHECK_THROWS_AS(parse_config(R"({"algorithms": ["single:3"]})"), ConfigError);
  CHECK(full.algorithms[4].budget == 50);
  CHECK(full.algorithms[4].file_stem() == "omkl-b_50");
  CHECK(full.num_features == 20);
  CHECK(full.variant == FeatureVariant::ORF);
  CHECK(full.seed == 9);
}

TEST_CASE("parse_config: errors") {
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"bogus": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"algorithms": []})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"algorithms": ["nope"]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"eta_weight": 1.5})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"lambda": -1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"D": 0})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"stream": {"preset": "mystery"}})"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("run_online: prediction strictly before label, each sample once") {
  auto config = small_config("unused");
  const auto stream = build_stream(config);
  RecordingSource source(stream);
  Spy spy(make_algorithm(parse_algorithm("adaraker"), config, 3, stream.size()), source);
  const auto result = run_online(spy, source, TaskKind::Regression);
  REQUIRE(source.log.size() == 2 * stream.size());
  REQUIRE(spy.events.size() == 2 * stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    CHECK(source.log[2 * i] == "x" + std::to_string(i));
    CHECK(source.log[2 * i + 1] == "y" + std::to_string(i));
    // predict sees only the features of slot i; update comes after the label.
    CHECK(spy.events[2 * i] == "predict@" + std::to_string(2 * i + 1));
    CHECK(spy.events[2 * i + 1] == "update@" + std::to_string(2 * i + 2));
  }
  CHECK(result.predictions.size() == stream.size());
  CHECK(std::isfinite(result.final_metric));
}

TEST_CASE("run_experiment: telemetry, summary and determinism") {
  const fs::path root = fs::temp_directory_path() / "raker_experiment_test";
  fs::remove_all(root);
  auto config = small_config(root / "a" / "nested");
  config.algorithms = {parse_algorithm("raker"), parse_algorithm("single:1"), parse_algorithm("omkl-b:20")};
  const auto summary = run_experiment(config);
  REQUIRE(summary.runs.size() == 3);
  const auto telemetry = config.output_dir / "telemetry_raker.csv";
  REQUIRE(fs::exists(telemetry));
  REQUIRE(fs::exists(config.output_dir / "summary.csv"));
  REQUIRE(fs::exists(config.output_dir / "telemetry_single_1.csv"));

  const auto text = slurp(telemetry);
  CHECK(text.rfind("t,y,yhat,loss,cum_mse,w_1,w_2,w_3\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 121);
  const auto summary_text = slurp(config.output_dir / "summary.csv");
  CHECK(summary_text.rfind("algorithm,metric,final_value,wall_seconds,median_step_us,peak_state_bytes\n", 0) == 0);
  for (const auto& run : summary.runs) CHECK(std::isfinite(run.final_metric));

  auto again = config;
  again.output_dir = root / "b";
  run_experiment(again);
  CHECK(slurp(again.output_dir / "telemetry_raker.csv") == text);
  CHECK(slurp(again.output_dir / "telemetry_omkl-b_20.csv") ==
        slurp(config.output_dir / "telemetry_omkl-b_20.csv"));
  fs::remove_all(root);
}

TEST_CASE("adaraker telemetry has one column per level") {
  auto config = small_config("unused");
  const auto stream = build_stream(config);
  StreamSource source(stream);
  auto algo = make_algorithm(parse_algorithm("adaraker"), config, 3, stream.size());
  const auto run = run_online(*algo, source, TaskKind::Regression);
  CHECK(run.weight_columns.size() == 7);  // levels 0..6 for T = 120
  CHECK(run.weight_columns.front() == "h_0");
  std::ostringstream out;
  write_telemetry(out, run);
  CHECK(out.str().rfind("t,y,yhat,loss,cum_mse,h_0,h_1", 0) == 0);
}

TEST_CASE("regret report: oracle replay is zero, classification rejected") {
  auto config = small_config("unused");
  const auto stream = build_stream(config);
  const auto replay = regret_report(config, "oracle", stream);
  for (double r : replay.regret) CHECK(std::abs(r) < 1e-8);
  const auto raker = regret_report(config, "raker", stream);
  CHECK(raker.horizon() == stream.size());
  CHECK(raker.checkpoints.back().t == 64);

  auto classification = config;
  classification.task = TaskKind::BinaryClassification;
  CHECK_THROWS_AS(regret_report(classification, "raker", stream), ConfigError);
}

TEST_CASE("runtime failures are tagged with algorithm and slot") {
  auto config = small_config("unused");
  config.eta_theta = 1e300;
  config.clip_for_weights = false;
  const auto stream = build_stream(config);
  StreamSource source(stream);
  auto algo = make_algorithm(parse_algorithm("single:0"), config, 3, stream.size());
  try {
    run_online(*algo, source, TaskKind::Regression);
    FAIL("expected RunError");
  } catch (const RunError& e) {
    CHECK(e.algorithm() == "single:0");
    CHECK(e.slot() >= 1);
  }
}
