#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sneakpeek/experiment.hpp"

namespace {

int run_command(const std::string& config_path, const std::optional<std::string>& out_path,
                const std::optional<std::uint64_t>& seed,
                const std::optional<int>& trials, bool check_oracle) {
  sneakpeek::ExperimentConfig config = sneakpeek::load_config(config_path);
  if (seed) config.base_seed = *seed;
  if (trials) config.trials = *trials;
  if (out_path) config.output_path = *out_path;

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!config.output_path.empty()) {
    file.open(config.output_path, std::ios::binary);
    if (!file) {
      throw sneakpeek::Error("cannot open output file " + config.output_path);
    }
    out = &file;
  }

  if (check_oracle) {
    int misses = sneakpeek::oracle_check(config, *out);
    if (misses > 0) {
      std::cerr << "grouped scheduler missed the group-level optimum on " << misses
                << " instance(s)\n";
      return 1;
    }
    return 0;
  }
  sneakpeek::run_experiment(config, *out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deadline-aware inference scheduling experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  int trials = 0;

  CLI::App* run = app.add_subcommand("run", "Run trials/sweeps and emit CSV rows");
  run->add_option("--config", config_path, "Experiment config file (JSON)")->required();
  CLI::Option* run_out = run->add_option("--out", out_path, "Output CSV path");
  CLI::Option* run_seed = run->add_option("--seed", seed, "Override base_seed");
  CLI::Option* run_trials = run->add_option("--trials", trials, "Override trial count");

  CLI::App* oracle =
      app.add_subcommand("oracle-check", "Compare schedulers against exhaustive optima");
  oracle->add_option("--config", config_path, "Experiment config file (JSON)")->required();
  CLI::Option* oracle_out = oracle->add_option("--out", out_path, "Output report path");
  CLI::Option* oracle_seed = oracle->add_option("--seed", seed, "Override base_seed");
  CLI::Option* oracle_trials = oracle->add_option("--trials", trials, "Override trial count");

  CLI::App* scenarios = app.add_subcommand("scenarios", "List built-in scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (scenarios->parsed()) {
      for (const auto& name : sneakpeek::builtin_names()) {
        sneakpeek::ScenarioSpec spec = sneakpeek::builtin(name);
        std::cout << name << ": " << spec.apps.size() << " app(s), "
                  << spec.request_count << " requests, " << spec.window_ms
                  << "ms window, " << spec.deadline.mean_ms << "ms mean deadline\n";
      }
      return 0;
    }
    bool check_oracle = oracle->parsed();
    const CLI::Option* out_opt = check_oracle ? oracle_out : run_out;
    const CLI::Option* seed_opt = check_oracle ? oracle_seed : run_seed;
    const CLI::Option* trials_opt = check_oracle ? oracle_trials : run_trials;
    return run_command(config_path,
                       out_opt->count() ? std::optional<std::string>(out_path) : std::nullopt,
                       seed_opt->count() ? std::optional<std::uint64_t>(seed) : std::nullopt,
                       trials_opt->count() ? std::optional<int>(trials) : std::nullopt,
                       check_oracle);
  } catch (const sneakpeek::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
