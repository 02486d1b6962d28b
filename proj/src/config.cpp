#include "raker/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "raker/errors.hpp"

namespace raker {

using nlohmann::json;

std::string AlgorithmSpec::name() const {
  switch (kind) {
    case Kind::Raker:
      return "raker";
    case Kind::AdaRaker:
      return "adaraker";
    case Kind::Single:
      return "single:" + std::to_string(kernel_index);
    case Kind::Omkl:
      return "omkl";
    case Kind::OmklBudget:
      return "omkl-b:" + std::to_string(budget);
  }
  return "unknown";
}

std::string AlgorithmSpec::file_stem() const {
  std::string s = name();
  for (char& c : s) {
    if (c == ':') c = '_';
  }
  return s;
}

namespace {

std::size_t parse_count(std::string_view digits, std::string_view what) {
  if (digits.empty()) throw ConfigError(std::string(what) + ": missing number");
  std::size_t v = 0;
  for (char c : digits) {
    if (c < '0' || c > '9') throw ConfigError(std::string(what) + ": not a number");
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  return v;
}

}  // namespace

AlgorithmSpec parse_algorithm(std::string_view text) {
  AlgorithmSpec a;
  if (text == "raker") {
    a.kind = AlgorithmSpec::Kind::Raker;
  } else if (text == "adaraker") {
    a.kind = AlgorithmSpec::Kind::AdaRaker;
  } else if (text == "omkl") {
    a.kind = AlgorithmSpec::Kind::Omkl;
  } else if (text.starts_with("single:")) {
    a.kind = AlgorithmSpec::Kind::Single;
    a.kernel_index = parse_count(text.substr(7), "single:<p>");
  } else if (text.starts_with("omkl-b:")) {
    a.kind = AlgorithmSpec::Kind::OmklBudget;
    a.budget = parse_count(text.substr(7), "omkl-b:<B>");
    if (a.budget == 0) throw ConfigError("omkl-b:<B>: budget must be >= 1");
  } else {
    throw ConfigError("unknown algorithm '" + std::string(text) +
                      "' (expected raker, adaraker, single:<p>, omkl, omkl-b:<B>)");
  }
  return a;
}

LossSpec ExperimentConfig::loss_spec() const {
  LossSpec spec;
  spec.kind = loss.value_or(task == TaskKind::Regression ? LossKind::SquaredError
                                                         : LossKind::Logistic);
  spec.lambda = lambda;
  spec.clip_for_weights = clip_for_weights;
  return spec;
}

std::vector<KernelSpec> ExperimentConfig::kernel_specs(std::size_t input_dim) const {
  std::vector<KernelSpec> out;
  out.reserve(kernels.size());
  for (const auto& k : kernels) out.push_back(KernelSpec{k.family, k.bandwidth, input_dim});
  return out;
}

void ExperimentConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
  };
  if (algorithms.empty()) throw ConfigError("at least one algorithm is required");
  if (kernels.empty()) throw ConfigError("kernel dictionary is empty");
  for (const auto& k : kernels) positive(k.bandwidth, "kernel bandwidth");
  if (num_features == 0) throw ConfigError("num_features must be >= 1");
  if (eta_theta) positive(*eta_theta, "eta_theta");
  positive(eta_weight, "eta_weight");
  if (eta_weight >= 1.0) throw ConfigError("eta_weight must be < 1");
  positive(eta0, "eta0");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  const LossKind kind = loss_spec().kind;
  if ((task == TaskKind::Regression) != (kind == LossKind::SquaredError)) {
    throw ConfigError("loss '" + std::string(to_string(kind)) + "' does not match the task");
  }
  for (const auto& a : algorithms) {
    if (a.kind == AlgorithmSpec::Kind::Single && a.kernel_index >= kernels.size()) {
      throw ConfigError("algorithm " + a.name() + ": kernel index out of range");
    }
  }
  if (stream.source == StreamConfig::Source::Csv) {
    if (stream.csv_path.empty()) throw ConfigError("stream.path is required for csv input");
    if (stream.label_column.empty()) throw ConfigError("stream.label_column is required");
    if (!std::filesystem::exists(stream.csv_path)) {
      throw ConfigError("csv file not found: " + stream.csv_path.string());
    }
  } else {
    static const std::set<std::string> presets{"stationary", "two-segment", "dataset1",
                                               "dataset1-rescaled", "dataset2"};
    if (!presets.contains(stream.preset)) {
      throw ConfigError("unknown synthetic preset '" + stream.preset + "'");
    }
    if (stream.horizon < 1) throw ConfigError("stream.T must be >= 1");
    if (stream.dim < 1) throw ConfigError("stream.d must be >= 1");
    if (task != TaskKind::Regression) {
      throw ConfigError("synthetic presets are regression streams");
    }
  }
}

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const char* where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(std::string("unknown key '") + key + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key) && !obj.at(key).is_null()) out = obj.at(key).get<T>();
}

StreamConfig parse_stream(const json& j) {
  reject_unknown(j,
                 {"source", "preset", "T", "d", "noise_std", "sigma_alpha", "switch_at",
                  "sigma_sq_before", "sigma_sq_after", "target_kernel", "path", "label_column",
                  "feature_columns", "normalize"},
                 "stream");
  StreamConfig s;
  const std::string source = j.value("source", std::string("synthetic"));
  if (source == "synthetic") {
    s.source = StreamConfig::Source::Synthetic;
  } else if (source == "csv") {
    s.source = StreamConfig::Source::Csv;
  } else {
    throw ConfigError("stream.source must be 'synthetic' or 'csv'");
  }
  read(j, "preset", s.preset);
  read(j, "T", s.horizon);
  read(j, "d", s.dim);
  read(j, "noise_std", s.noise_std);
  read(j, "sigma_alpha", s.sigma_alpha);
  read(j, "switch_at", s.switch_at);
  read(j, "sigma_sq_before", s.sigma_sq_before);
  read(j, "sigma_sq_after", s.sigma_sq_after);
  if (j.contains("target_kernel")) {
    const json& k = j.at("target_kernel");
    s.target_family = parse_kernel_family(k.value("family", std::string("gaussian")));
    s.target_bandwidth = k.value("bandwidth", s.target_bandwidth);
  }
  std::string path;
  read(j, "path", path);
  s.csv_path = path;
  read(j, "label_column", s.label_column);
  read(j, "feature_columns", s.feature_columns);
  read(j, "normalize", s.normalize);
  return s;
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  ExperimentConfig c;
  try {
    const json j = json::parse(json_text);
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(j,
                   {"stream", "task", "loss", "kernels", "num_features", "D", "variant",
                    "algorithms", "eta_theta", "eta_weight", "eta0", "lambda", "clip_for_weights",
                    "flip_relative_loss", "seed", "output_dir"},
                   "config");
    if (j.contains("stream")) c.stream = parse_stream(j.at("stream"));
    if (j.contains("task")) {
      const auto task = j.at("task").get<std::string>();
      if (task == "regression") {
        c.task = TaskKind::Regression;
      } else if (task == "classification") {
        c.task = TaskKind::BinaryClassification;
      } else {
        throw ConfigError("task must be 'regression' or 'classification'");
      }
    }
    if (j.contains("loss") && !j.at("loss").is_null()) {
      c.loss = parse_loss_kind(j.at("loss").get<std::string>());
    }
    if (j.contains("kernels")) {
      c.kernels.clear();
      for (const auto& k : j.at("kernels")) {
        reject_unknown(k, {"family", "bandwidth"}, "kernels[]");
        c.kernels.push_back(KernelChoice{parse_kernel_family(k.value("family", std::string("gaussian"))),
                                         k.at("bandwidth").get<double>()});
      }
    }
    read(j, "num_features", c.num_features);
    read(j, "D", c.num_features);
    if (j.contains("variant")) c.variant = parse_feature_variant(j.at("variant").get<std::string>());
    if (j.contains("algorithms")) {
      c.algorithms.clear();
      for (const auto& a : j.at("algorithms")) c.algorithms.push_back(parse_algorithm(a.get<std::string>()));
    }
    if (j.contains("eta_theta") && !j.at("eta_theta").is_null()) {
      c.eta_theta = j.at("eta_theta").get<double>();
    }
    read(j, "eta_weight", c.eta_weight);
    read(j, "eta0", c.eta0);
    read(j, "lambda", c.lambda);
    read(j, "clip_for_weights", c.clip_for_weights);
    read(j, "flip_relative_loss", c.flip_relative_loss);
    read(j, "seed", c.seed);
    std::string out;
    read(j, "output_dir", out);
    if (!out.empty()) c.output_dir = out;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace raker
