// raker: run online multi-kernel learning experiments from a JSON config.
//
//   raker run    --config exp.json [--out DIR] [--seed N]
//   raker synth  --config exp.json [--out DIR] [--seed N]
//   raker regret --config exp.json [--algorithm raker] [--out DIR] [--seed N]
//
// Exit codes: 0 ok, 1 configuration/input error, 2 runtime error.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "raker/config.hpp"
#include "raker/data.hpp"
#include "raker/errors.hpp"
#include "raker/experiment.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct CommonArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "Experiment config (JSON)")->required();
  cmd->add_option("--out", args.out, "Output directory (overrides output_dir)");
  cmd->add_option("--seed", args.seed, "Seed (overrides the config)");
}

raker::ExperimentConfig resolve(const CommonArgs& args) {
  raker::ExperimentConfig config = raker::load_config(args.config);
  if (!args.out.empty()) config.output_dir = args.out;
  if (args.seed) config.seed = *args.seed;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online multi-kernel learning with random features"};
  app.require_subcommand(1);

  CommonArgs run_args;
  CLI::App* run = app.add_subcommand("run", "Run the configured algorithms and write telemetry");
  add_common(run, run_args);

  CommonArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "Write the configured stream to <out>/stream.csv");
  add_common(synth, synth_args);

  CommonArgs regret_args;
  std::string regret_algorithm = "raker";
  CLI::App* regret = app.add_subcommand("regret", "Static regret against the batch RF oracle");
  add_common(regret, regret_args);
  regret->add_option("--algorithm", regret_algorithm,
                     "raker, adaraker, single:<p>, omkl, omkl-b:<B> or oracle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      const auto summary = raker::run_experiment(resolve(run_args));
      for (const auto& r : summary.runs) {
        std::cout << r.algorithm << ": final " << r.metric_name << " = "
                  << raker::format_double(r.final_metric) << " (" << r.wall_seconds << " s)\n";
      }
    } else if (*synth) {
      const auto config = resolve(synth_args);
      config.validate();
      const auto path = config.output_dir / "stream.csv";
      raker::save_csv(path, raker::build_stream(config));
      std::cout << "wrote " << path.string() << '\n';
    } else if (*regret) {
      const auto path = raker::emit_regret_report(resolve(regret_args), regret_algorithm);
      std::cout << "wrote " << path.string() << '\n';
    }
  } catch (const raker::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const raker::DataError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
