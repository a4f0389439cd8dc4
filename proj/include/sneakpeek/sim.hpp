#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sneakpeek/core.hpp"
#include "sneakpeek/scheduling.hpp"
#include "sneakpeek/workload.hpp"

namespace sneakpeek {

struct TraceRow {
  std::string request_id;
  double dispatch_ms = 0.0;
  double completion_ms = 0.0;
  int worker_id = 0;
  int model_ref = 0;
  bool swap_occurred = false;
};

struct ExecutionTrace {
  std::vector<TraceRow> rows;
};

enum class TruthMode {
  TrueLabelRecall,  // realized accuracy = assigned model's recall of the truth
  SampledOutcome,   // Bernoulli-sampled correctness (illustration only)
};

struct RequestMetrics {
  std::string request_id;
  double utility = 0.0;
  double expected_accuracy = 0.0;
  double violation_ms = 0.0;
  double completion_ms = 0.0;
  int worker_id = 0;
  int model_ref = 0;
};

struct TrialMetrics {
  double mean_utility = 0.0;
  double mean_expected_accuracy = 0.0;
  double mean_violation_ms = 0.0;
  int violation_count = 0;
  std::vector<RequestMetrics> per_request;
  // Wall-clock around estimation + scheduling; excluded from determinism
  // guarantees.
  double scheduling_overhead_ms = 0.0;
};

// Runs a schedule on simulated workers: entries execute back-to-back per
// worker with sequence-dependent swaps; short-circuit entries cost nothing
// and complete at dispatch.
ExecutionTrace execute(const Schedule& schedule, const std::vector<Request>& requests,
                       const AppMap& apps, int worker_count,
                       const std::vector<double>& worker_time_scale = {});

// Scores an execution trace against ground-truth labels and deadlines.
TrialMetrics evaluate(const ExecutionTrace& trace, const std::vector<Request>& requests,
                      const AppMap& apps, TruthMode mode = TruthMode::TrueLabelRecall,
                      std::uint64_t sample_seed = 0);

// Per-request theta estimates for a generated scenario (kNN evidence, or the
// synthetic estimator when the scenario requests it).
ThetaMap estimate_thetas(const ScenarioSpec& spec, const GeneratedScenario& scenario);

// Everything a trial produced before execution; kept around so callers can
// compare the planned schedule against the exhaustive optima.
struct PreparedTrial {
  GeneratedScenario scenario;  // apps already augmented when short_circuit is on
  ThetaMap thetas;
  bool has_thetas = false;
  Schedule schedule;
  double overhead_ms = 0.0;
};

// Generates the workload, runs estimation when the scheduler needs it, and
// plans the schedule. Deterministic given the seed (overhead aside).
PreparedTrial prepare_trial(const ScenarioSpec& scenario, const SchedulerSpec& scheduler,
                            std::uint64_t seed);

// End-to-end seeded trial: generate, estimate (when the scheduler needs it),
// schedule, execute, evaluate.
TrialMetrics run_trial(const ScenarioSpec& scenario, const SchedulerSpec& scheduler,
                       std::uint64_t seed);

}  // namespace sneakpeek
