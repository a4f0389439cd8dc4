#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "sneakpeek/core.hpp"
#include "sneakpeek/estimation.hpp"

namespace sneakpeek {

enum class Ordering { FCFS, EDF, Priority };
enum class Selection { MaxAccuracy, LocallyOptimal, Grouped, GroupedDataAware };

struct SchedulerSpec {
  Ordering ordering = Ordering::EDF;
  Selection selection = Selection::LocallyOptimal;
  int brute_force_threshold = 3;  // tau: max group count solved exhaustively
  bool short_circuit = false;
  AccuracySource accuracy_source = AccuracySource::Profiled;
  int worker_count = 1;
  LatencyMode planning_latency = LatencyMode::SequenceAware;
};

struct SchedulingContext {
  double now_ms = 0.0;  // window close time
  const std::vector<Request>* requests = nullptr;
  const AppMap* apps = nullptr;
  // Per-request theta estimates; required when accuracy_source is Dynamic or
  // the selection is GroupedDataAware.
  const ThetaMap* thetas = nullptr;
  // Per-worker latency multiplier; empty means identical workers.
  std::vector<double> worker_time_scale;
};

// Flattened planning tables shared by the greedy schedulers and the
// exhaustive solvers: per request, the candidate models with their resolved
// accuracies (dynamic accuracies are baked in per request).
struct PlanCandidate {
  int model_ref = 0;
  int model_key = 0;  // unique per (app, model); sentinel entries get -1
  double infer_ms = 0.0;
  double swap_ms = 0.0;
};

struct PlanRequest {
  std::size_t request_index = 0;
  const Request* request = nullptr;
  double deadline_ms = 0.0;
  const PenaltySpec* penalty = nullptr;
  const std::vector<PlanCandidate>* candidates = nullptr;
  std::vector<double> accuracy;  // aligned with *candidates
};

struct PlanView {
  std::vector<PlanRequest> requests;  // aligned with ctx.requests
  std::map<std::string, std::vector<PlanCandidate>> app_candidates;
};

PlanView build_plan(const SchedulerSpec& spec, const SchedulingContext& ctx);

// (1 + Var[model accuracies]) * exp(-time_to_deadline_seconds); accuracy per
// spec.accuracy_source, plus the short-circuit variant's profiled accuracy
// when enabled. Past-due deadlines clamp to zero distance.
double priority_request(const SchedulerSpec& spec, const SchedulingContext& ctx,
                        const Request& request);

// Arithmetic mean of member priorities.
double priority_group(const SchedulerSpec& spec, const SchedulingContext& ctx,
                      const std::vector<std::size_t>& member_indices);

// Returns request indices ordered by the policy; ties resolved by request_id.
std::vector<std::size_t> order_requests(Ordering policy, const SchedulerSpec& spec,
                                        const SchedulingContext& ctx);

// Single-request model choice at a planned start time. resident_model_key is
// the model currently loaded on the worker (-1 for none); it decides whether
// swap latency is charged under SequenceAware planning.
int select_model(const SchedulerSpec& spec, const SchedulingContext& ctx,
                 std::size_t request_index, double t_start_ms,
                 int resident_model_key = -1);

// Groups of request indices with their per-group planning order already
// applied (members sorted by descending priority).
struct RequestGroup {
  std::string app_id;
  std::vector<std::size_t> members;  // indices into ctx.requests
};

// Partitions requests by application (GroupedDataAware additionally splits by
// estimated label) and orders members within each group by priority.
std::vector<RequestGroup> build_ordered_groups(const SchedulerSpec& spec,
                                               const SchedulingContext& ctx);

// Greedy two-phase scheduler: order requests, then assign each the
// locally-best model at its planned start time.
Schedule schedule_flat(const SchedulerSpec& spec, const SchedulingContext& ctx);

// Group-level scheduler: exhaustive over groups when their count is within
// brute_force_threshold, otherwise greedy in group-priority order with one
// model per group.
Schedule schedule_grouped(const SchedulerSpec& spec, const SchedulingContext& ctx);

// Returns the application with the zero-latency short-circuit variant
// installed as a scheduling candidate.
Application augment_short_circuit(const Application& app, const ModelProfile& profile);

// Multi-worker extension: units (requests or groups) are placed on the worker
// with the earliest availability. worker_count == 1 reduces exactly to the
// single-worker schedulers.
Schedule schedule_multiworker(const SchedulerSpec& spec, const SchedulingContext& ctx);

// Dispatches to schedule_flat / schedule_grouped / schedule_multiworker.
Schedule make_schedule(const SchedulerSpec& spec, const SchedulingContext& ctx);

}  // namespace sneakpeek
