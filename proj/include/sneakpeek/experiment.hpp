#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sneakpeek/oracle.hpp"
#include "sneakpeek/scheduling.hpp"
#include "sneakpeek/sim.hpp"
#include "sneakpeek/workload.hpp"

namespace sneakpeek {

struct SweepSpec {
  std::string param;                // one of the recognized sweep names
  std::vector<std::string> values;  // raw tokens, echoed into the CSV
};

struct ExperimentConfig {
  ScenarioSpec scenario;
  std::vector<std::string> schedulers;  // preset names
  std::optional<SweepSpec> sweep;
  int trials = 1;
  std::uint64_t base_seed = 0;
  std::string output_path;  // empty = stdout
  int worker_count = 1;
  OracleBudget budget;
};

// Preset names: maxacc-edf, lo-edf, lo-priority, grouped, sneakpeek.
SchedulerSpec scheduler_preset(const std::string& name);
std::vector<std::string> scheduler_preset_names();

// Recognized sweep parameter names.
std::vector<std::string> sweep_param_names();

// Applies one sweep value to a (scenario, scheduler) pair.
void apply_sweep_value(const std::string& param, const std::string& value,
                       ScenarioSpec& scenario, SchedulerSpec& scheduler);

// Parses the JSON experiment config; throws ConfigError with a line-anchored
// message on malformed input.
ExperimentConfig parse_config(const std::string& text, const std::string& source_name);
ExperimentConfig load_config(const std::string& path);

// Runs every sweep value x scheduler x trial and streams CSV rows
// (deterministic apart from the scheduling_overhead_ms column).
void run_experiment(const ExperimentConfig& config, std::ostream& out);

// Compares each scheduler's planned utility against the exhaustive optima,
// one report line per (trial, scheduler). Returns the number of instances
// where the grouped scheduler missed the group-level optimum.
int oracle_check(const ExperimentConfig& config, std::ostream& out);

}  // namespace sneakpeek
