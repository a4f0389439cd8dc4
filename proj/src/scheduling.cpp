#include "sneakpeek/scheduling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sneakpeek/oracle.hpp"

namespace sneakpeek {

namespace {

const Application& app_of(const SchedulingContext& ctx, const Request& request) {
  auto it = ctx.apps->find(request.app_id);
  if (it == ctx.apps->end()) {
    throw Error("request " + request.request_id + " references unknown app " +
                request.app_id);
  }
  return it->second;
}

const ThetaVector& theta_of(const SchedulingContext& ctx, const Request& request) {
  if (ctx.thetas == nullptr) {
    throw Error("dynamic accuracy requires theta estimates in the context");
  }
  auto it = ctx.thetas->find(request.request_id);
  if (it == ctx.thetas->end()) {
    throw Error("missing theta estimate for request " + request.request_id);
  }
  return it->second;
}

std::vector<double> candidate_accuracies(const SchedulerSpec& spec,
                                         const SchedulingContext& ctx,
                                         const Request& request) {
  const Application& app = app_of(ctx, request);
  std::vector<double> accs;
  accs.reserve(app.models.size() + 1);
  for (const auto& model : app.models) {
    if (spec.accuracy_source == AccuracySource::Dynamic) {
      accs.push_back(theta_accuracy(theta_of(ctx, request), model.per_class_recall));
    } else {
      accs.push_back(model.profiled_accuracy);
    }
  }
  if (spec.short_circuit && app.sneakpeek_model) {
    // Short-circuit candidates are always judged by their profiled accuracy.
    accs.push_back(app.sneakpeek_model->profiled_accuracy);
  }
  return accs;
}

struct WorkerState {
  double busy_ms = 0.0;
  int resident_key = -1;
  double scale = 1.0;
};

// Mean planned utility of running every member of a unit back-to-back with
// one model, starting at the worker's current availability.
double unit_mean_utility(const PlanView& plan, const std::vector<std::size_t>& members,
                         std::size_t candidate_index, const PlanCandidate& cand,
                         const WorkerState& worker, LatencyMode mode) {
  double total = 0.0;
  if (cand.model_ref == kSneakPeekModel) {
    for (std::size_t row : members) {
      const PlanRequest& pr = plan.requests[row];
      total += pr.accuracy[candidate_index] *
               (1.0 - penalty(*pr.penalty, pr.deadline_ms, worker.busy_ms));
    }
    return total / static_cast<double>(members.size());
  }

  double swap = cand.swap_ms;
  if (mode == LatencyMode::SequenceAware && worker.resident_key == cand.model_key) {
    swap = 0.0;
  }
  double cursor = worker.busy_ms;
  for (std::size_t j = 0; j < members.size(); ++j) {
    const PlanRequest& pr = plan.requests[members[j]];
    double cost = (mode == LatencyMode::PaperFlat)
                      ? (cand.infer_ms + cand.swap_ms) * worker.scale
                      : ((j == 0 ? swap : 0.0) + cand.infer_ms) * worker.scale;
    cursor += cost;
    total += pr.accuracy[candidate_index] *
             (1.0 - penalty(*pr.penalty, pr.deadline_ms, cursor));
  }
  return total / static_cast<double>(members.size());
}

// Picks a candidate for a unit on a worker: highest score, then lowest
// inference latency, then candidate list order.
std::size_t choose_candidate(const SchedulerSpec& spec, const PlanView& plan,
                             const std::vector<std::size_t>& members,
                             const WorkerState& worker) {
  const PlanRequest& first = plan.requests[members.front()];
  const auto& candidates = *first.candidates;
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  double best_latency = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    double score;
    if (spec.selection == Selection::MaxAccuracy) {
      score = first.accuracy[c];
    } else {
      score = unit_mean_utility(plan, members, c, candidates[c], worker,
                                spec.planning_latency);
    }
    if (score > best_score ||
        (score == best_score && candidates[c].infer_ms < best_latency)) {
      best = c;
      best_score = score;
      best_latency = candidates[c].infer_ms;
    }
  }
  return best;
}

// Places pre-ordered units on workers (earliest availability first) and emits
// the schedule. This is the shared engine behind the flat, grouped-greedy and
// multi-worker paths.
Schedule place_units(const SchedulerSpec& spec, const SchedulingContext& ctx,
                     const PlanView& plan,
                     const std::vector<std::vector<std::size_t>>& units,
                     int worker_count) {
  std::vector<WorkerState> workers(static_cast<std::size_t>(worker_count));
  for (std::size_t w = 0; w < workers.size(); ++w) {
    if (w < ctx.worker_time_scale.size()) {
      workers[w].scale = ctx.worker_time_scale[w];
    }
  }

  Schedule schedule;
  for (const auto& members : units) {
    if (members.empty()) continue;
    std::size_t target = 0;
    for (std::size_t w = 1; w < workers.size(); ++w) {
      if (workers[w].busy_ms < workers[target].busy_ms) target = w;
    }
    WorkerState& worker = workers[target];

    const PlanRequest& first = plan.requests[members.front()];
    const auto& candidates = *first.candidates;
    std::size_t chosen = choose_candidate(spec, plan, members, worker);
    const PlanCandidate& cand = candidates[chosen];

    for (std::size_t row : members) {
      schedule.entries.push_back(ScheduleEntry{
          (*ctx.requests)[plan.requests[row].request_index].request_id, cand.model_ref,
          static_cast<int>(target)});
    }

    if (cand.model_ref != kSneakPeekModel) {
      double swap = cand.swap_ms;
      if (spec.planning_latency == LatencyMode::SequenceAware) {
        if (worker.resident_key == cand.model_key) swap = 0.0;
        worker.busy_ms +=
            (swap + cand.infer_ms * static_cast<double>(members.size())) * worker.scale;
      } else {
        worker.busy_ms += (cand.swap_ms + cand.infer_ms) *
                          static_cast<double>(members.size()) * worker.scale;
      }
      worker.resident_key = cand.model_key;
    }
  }
  return schedule;
}

std::vector<RequestGroup> sort_groups_by_priority(const SchedulerSpec& spec,
                                                  const SchedulingContext& ctx,
                                                  std::vector<RequestGroup> groups) {
  std::vector<double> priorities(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    priorities[g] = priority_group(spec, ctx, groups[g].members);
  }
  std::vector<std::size_t> order(groups.size());
  for (std::size_t g = 0; g < order.size(); ++g) order[g] = g;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (priorities[a] != priorities[b]) return priorities[a] > priorities[b];
    if (groups[a].app_id != groups[b].app_id) return groups[a].app_id < groups[b].app_id;
    const std::string& ida = (*ctx.requests)[groups[a].members.front()].request_id;
    const std::string& idb = (*ctx.requests)[groups[b].members.front()].request_id;
    return ida < idb;
  });
  std::vector<RequestGroup> sorted;
  sorted.reserve(groups.size());
  for (std::size_t g : order) sorted.push_back(std::move(groups[g]));
  return sorted;
}

Schedule grouped_greedy(const SchedulerSpec& spec, const SchedulingContext& ctx,
                        const PlanView& plan, std::vector<RequestGroup> groups,
                        int worker_count) {
  groups = sort_groups_by_priority(spec, ctx, std::move(groups));
  std::vector<std::vector<std::size_t>> units;
  units.reserve(groups.size());
  for (auto& group : groups) units.push_back(std::move(group.members));
  return place_units(spec, ctx, plan, units, worker_count);
}

Schedule flat_greedy(const SchedulerSpec& spec, const SchedulingContext& ctx,
                     const PlanView& plan, int worker_count) {
  std::vector<std::size_t> order = order_requests(spec.ordering, spec, ctx);
  std::vector<std::vector<std::size_t>> units;
  units.reserve(order.size());
  for (std::size_t row : order) units.push_back({row});
  return place_units(spec, ctx, plan, units, worker_count);
}

}  // namespace

PlanView build_plan(const SchedulerSpec& spec, const SchedulingContext& ctx) {
  PlanView plan;
  int next_key = 0;
  for (const auto& [app_id, app] : *ctx.apps) {
    std::vector<PlanCandidate> candidates;
    candidates.reserve(app.models.size() + 1);
    for (std::size_t m = 0; m < app.models.size(); ++m) {
      candidates.push_back(PlanCandidate{static_cast<int>(m), next_key++,
                                         app.models[m].infer_latency_ms,
                                         app.models[m].swap_latency_ms});
    }
    if (spec.short_circuit && app.sneakpeek_model) {
      candidates.push_back(PlanCandidate{kSneakPeekModel, -1, 0.0, 0.0});
    }
    plan.app_candidates.emplace(app_id, std::move(candidates));
  }

  plan.requests.reserve(ctx.requests->size());
  for (std::size_t i = 0; i < ctx.requests->size(); ++i) {
    const Request& request = (*ctx.requests)[i];
    const Application& app = app_of(ctx, request);
    PlanRequest pr;
    pr.request_index = i;
    pr.request = &request;
    pr.deadline_ms = request.deadline_ms;
    pr.penalty = &app.penalty;
    pr.candidates = &plan.app_candidates.at(request.app_id);
    pr.accuracy = candidate_accuracies(spec, ctx, request);
    plan.requests.push_back(std::move(pr));
  }
  return plan;
}

double priority_request(const SchedulerSpec& spec, const SchedulingContext& ctx,
                        const Request& request) {
  std::vector<double> accs = candidate_accuracies(spec, ctx, request);
  double mean = 0.0;
  for (double a : accs) mean += a;
  mean /= static_cast<double>(accs.size());
  double variance = 0.0;
  for (double a : accs) variance += (a - mean) * (a - mean);
  variance /= static_cast<double>(accs.size());

  double to_deadline_s = std::max(0.0, request.deadline_ms - ctx.now_ms) / 1000.0;
  return (1.0 + variance) * std::exp(-to_deadline_s);
}

double priority_group(const SchedulerSpec& spec, const SchedulingContext& ctx,
                      const std::vector<std::size_t>& member_indices) {
  if (member_indices.empty()) {
    throw EmptyGroup("cannot compute the priority of an empty group");
  }
  double total = 0.0;
  for (std::size_t row : member_indices) {
    total += priority_request(spec, ctx, (*ctx.requests)[row]);
  }
  return total / static_cast<double>(member_indices.size());
}

std::vector<std::size_t> order_requests(Ordering policy, const SchedulerSpec& spec,
                                        const SchedulingContext& ctx) {
  const auto& requests = *ctx.requests;
  std::vector<std::size_t> order(requests.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<double> priorities;
  if (policy == Ordering::Priority) {
    priorities.resize(requests.size());
    for (std::size_t i = 0; i < requests.size(); ++i) {
      priorities[i] = priority_request(spec, ctx, requests[i]);
    }
  }

  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    double ka, kb;
    switch (policy) {
      case Ordering::FCFS:
        ka = requests[a].arrival_ms;
        kb = requests[b].arrival_ms;
        break;
      case Ordering::EDF:
        ka = requests[a].deadline_ms;
        kb = requests[b].deadline_ms;
        break;
      default:  // Priority: descending
        ka = -priorities[a];
        kb = -priorities[b];
        break;
    }
    if (ka != kb) return ka < kb;
    return requests[a].request_id < requests[b].request_id;
  });
  return order;
}

int select_model(const SchedulerSpec& spec, const SchedulingContext& ctx,
                 std::size_t request_index, double t_start_ms, int resident_model_key) {
  PlanView plan = build_plan(spec, ctx);
  WorkerState worker;
  worker.busy_ms = t_start_ms;
  worker.resident_key = resident_model_key;
  std::vector<std::size_t> members{request_index};
  std::size_t chosen = choose_candidate(spec, plan, members, worker);
  return (*plan.requests[request_index].candidates)[chosen].model_ref;
}

std::vector<RequestGroup> build_ordered_groups(const SchedulerSpec& spec,
                                               const SchedulingContext& ctx) {
  // Bucket by application; std::map keeps the emit order deterministic.
  std::map<std::string, std::vector<std::size_t>> by_app;
  for (std::size_t i = 0; i < ctx.requests->size(); ++i) {
    by_app[(*ctx.requests)[i].app_id].push_back(i);
  }

  std::vector<RequestGroup> groups;
  for (const auto& [app_id, members] : by_app) {
    if (spec.selection == Selection::GroupedDataAware) {
      std::vector<std::string> ids;
      std::vector<ThetaVector> thetas;
      std::map<std::string, std::size_t> index_of;
      ids.reserve(members.size());
      for (std::size_t row : members) {
        const Request& request = (*ctx.requests)[row];
        ids.push_back(request.request_id);
        thetas.push_back(theta_of(ctx, request));
        index_of[request.request_id] = row;
      }
      for (auto& subgroup_ids : split_groups(ids, thetas)) {
        RequestGroup group;
        group.app_id = app_id;
        for (const auto& id : subgroup_ids) group.members.push_back(index_of.at(id));
        groups.push_back(std::move(group));
      }
    } else {
      groups.push_back(RequestGroup{app_id, members});
    }
  }

  // Members execute in priority order inside their group.
  for (auto& group : groups) {
    std::vector<double> priorities(group.members.size());
    for (std::size_t j = 0; j < group.members.size(); ++j) {
      priorities[j] = priority_request(spec, ctx, (*ctx.requests)[group.members[j]]);
    }
    std::vector<std::size_t> order(group.members.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (priorities[a] != priorities[b]) return priorities[a] > priorities[b];
      return (*ctx.requests)[group.members[a]].request_id <
             (*ctx.requests)[group.members[b]].request_id;
    });
    std::vector<std::size_t> sorted;
    sorted.reserve(group.members.size());
    for (std::size_t j : order) sorted.push_back(group.members[j]);
    group.members = std::move(sorted);
  }
  return groups;
}

Schedule schedule_flat(const SchedulerSpec& spec, const SchedulingContext& ctx) {
  if (spec.selection != Selection::MaxAccuracy &&
      spec.selection != Selection::LocallyOptimal) {
    throw Error("schedule_flat requires a request-level selection strategy");
  }
  PlanView plan = build_plan(spec, ctx);
  return flat_greedy(spec, ctx, plan, 1);
}

Schedule schedule_grouped(const SchedulerSpec& spec, const SchedulingContext& ctx) {
  if (spec.selection != Selection::Grouped &&
      spec.selection != Selection::GroupedDataAware) {
    throw Error("schedule_grouped requires a group-level selection strategy");
  }
  PlanView plan = build_plan(spec, ctx);
  std::vector<RequestGroup> groups = build_ordered_groups(spec, ctx);
  if (groups.empty()) return Schedule{};

  if (static_cast<int>(groups.size()) <= spec.brute_force_threshold) {
    try {
      return exact_grouped(plan, groups, spec.planning_latency, OracleBudget{}).schedule;
    } catch (const BudgetExceeded&) {
      // Too many model combinations despite few groups; use the greedy path.
    }
  }
  return grouped_greedy(spec, ctx, plan, std::move(groups), 1);
}

Application augment_short_circuit(const Application& app, const ModelProfile& profile) {
  if (app.sneakpeek_model) {
    throw DuplicateSneakPeek(app.app_id);
  }
  if (profile.infer_latency_ms != 0.0 || profile.swap_latency_ms != 0.0) {
    throw Error("short-circuit variant must have zero latencies");
  }
  Application augmented = app;
  augmented.sneakpeek_model = profile;
  return augmented;
}

Schedule schedule_multiworker(const SchedulerSpec& spec, const SchedulingContext& ctx) {
  if (spec.worker_count < 1) {
    throw Error("worker_count must be positive");
  }
  bool grouped = spec.selection == Selection::Grouped ||
                 spec.selection == Selection::GroupedDataAware;
  if (spec.worker_count == 1) {
    return grouped ? schedule_grouped(spec, ctx) : schedule_flat(spec, ctx);
  }
  PlanView plan = build_plan(spec, ctx);
  if (grouped) {
    return grouped_greedy(spec, ctx, plan, build_ordered_groups(spec, ctx),
                          spec.worker_count);
  }
  return flat_greedy(spec, ctx, plan, spec.worker_count);
}

Schedule make_schedule(const SchedulerSpec& spec, const SchedulingContext& ctx) {
  return schedule_multiworker(spec, ctx);
}

}  // namespace sneakpeek
