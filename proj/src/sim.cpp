#include "sneakpeek/sim.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_map>

#include "sneakpeek/rng.hpp"

namespace sneakpeek {

namespace {

const Request& request_by_id(const std::vector<Request>& requests,
                             std::unordered_map<std::string, const Request*>& cache,
                             const std::string& id) {
  if (cache.empty()) {
    for (const auto& r : requests) cache.emplace(r.request_id, &r);
  }
  auto it = cache.find(id);
  if (it == cache.end()) {
    throw NotScheduled("unknown request " + id);
  }
  return *it->second;
}

// Confusion of the synthetic fixed-accuracy estimator measured over a
// holdout, mirroring what profile_sneakpeek does for kNN.
ModelProfile profile_simulated(double sim_accuracy, int label_count, int k,
                               const DirichletBelief& prior, const HoldoutSet& holdout,
                               std::uint64_t seed) {
  ConfusionMatrix confusion(static_cast<std::size_t>(label_count),
                            std::vector<double>(static_cast<std::size_t>(label_count), 0.0));
  for (std::size_t i = 0; i < holdout.size(); ++i) {
    ClassLabel truth = holdout[i].second;
    Evidence evidence =
        simulated_estimator(sim_accuracy, truth, label_count, k, Rng::derive(seed, i));
    ThetaVector theta = theta_estimate(posterior(prior, evidence));
    int predicted = 0;
    for (std::size_t j = 1; j < theta.size(); ++j) {
      if (theta[j] > theta[static_cast<std::size_t>(predicted)]) {
        predicted = static_cast<int>(j);
      }
    }
    confusion[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted)] += 1.0;
  }
  return ModelProfile::from_confusion("sneakpeek", std::move(confusion), 0.0, 0.0,
                                      /*allow_empty_rows=*/true);
}

DirichletBelief prior_for_app(const ScenarioSpec& spec, const Application& app,
                              std::size_t app_count) {
  std::optional<ThetaVector> hint;
  if (app.class_prior_hint) {
    hint = ThetaVector(*app.class_prior_hint);
  }
  double per_app_requests =
      static_cast<double>(spec.request_count) / static_cast<double>(app_count);
  return make_prior(spec.estimation.prior, app.label_count, hint, per_app_requests);
}

}  // namespace

ExecutionTrace execute(const Schedule& schedule, const std::vector<Request>& requests,
                       const AppMap& apps, int worker_count,
                       const std::vector<double>& worker_time_scale) {
  if (auto violation = validate(schedule, requests, apps, /*require_complete=*/false)) {
    throw Error("invalid schedule: " + violation->detail);
  }
  struct WorkerState {
    double busy_ms = 0.0;
    const std::string* resident = nullptr;
    double scale = 1.0;
  };
  std::vector<WorkerState> workers(static_cast<std::size_t>(worker_count));
  for (std::size_t w = 0; w < workers.size(); ++w) {
    if (w < worker_time_scale.size()) workers[w].scale = worker_time_scale[w];
  }

  std::unordered_map<std::string, const Request*> cache;
  ExecutionTrace trace;
  trace.rows.reserve(schedule.entries.size());
  for (const auto& entry : schedule.entries) {
    if (entry.worker_id < 0 || entry.worker_id >= worker_count) {
      throw Error("entry assigned to unknown worker " + std::to_string(entry.worker_id));
    }
    WorkerState& worker = workers[static_cast<std::size_t>(entry.worker_id)];
    const Request& request = request_by_id(requests, cache, entry.request_id);
    const ModelProfile& profile = apps.at(request.app_id).profile(entry.model_ref);

    TraceRow row;
    row.request_id = entry.request_id;
    row.worker_id = entry.worker_id;
    row.model_ref = entry.model_ref;
    row.dispatch_ms = worker.busy_ms;
    if (entry.model_ref == kSneakPeekModel) {
      row.swap_occurred = false;
      row.completion_ms = worker.busy_ms;
    } else {
      row.swap_occurred =
          worker.resident == nullptr || *worker.resident != profile.model_id;
      double cost = (profile.infer_latency_ms +
                     (row.swap_occurred ? profile.swap_latency_ms : 0.0)) *
                    worker.scale;
      row.completion_ms = worker.busy_ms + cost;
      worker.busy_ms = row.completion_ms;
      worker.resident = &profile.model_id;
    }
    trace.rows.push_back(std::move(row));
  }
  return trace;
}

TrialMetrics evaluate(const ExecutionTrace& trace, const std::vector<Request>& requests,
                      const AppMap& apps, TruthMode mode, std::uint64_t sample_seed) {
  std::unordered_map<std::string, const TraceRow*> by_id;
  for (const auto& row : trace.rows) by_id.emplace(row.request_id, &row);

  TrialMetrics metrics;
  metrics.per_request.reserve(requests.size());
  Rng rng(sample_seed);
  for (const auto& request : requests) {
    auto it = by_id.find(request.request_id);
    if (it == by_id.end()) {
      throw IncompleteTrace("no trace row for request " + request.request_id);
    }
    const TraceRow& row = *it->second;
    const Application& app = apps.at(request.app_id);
    const ModelProfile& profile = app.profile(row.model_ref);

    double recall =
        profile.per_class_recall[static_cast<std::size_t>(request.true_label)];
    double realized_accuracy = recall;
    if (mode == TruthMode::SampledOutcome) {
      realized_accuracy = rng.uniform01() < recall ? 1.0 : 0.0;
    }

    RequestMetrics rm;
    rm.request_id = request.request_id;
    rm.expected_accuracy = recall;
    rm.completion_ms = row.completion_ms;
    rm.worker_id = row.worker_id;
    rm.model_ref = row.model_ref;
    rm.utility = realized_accuracy *
                 (1.0 - penalty(app.penalty, request.deadline_ms, row.completion_ms));
    rm.violation_ms = std::max(0.0, row.completion_ms - request.deadline_ms);

    metrics.mean_utility += rm.utility;
    metrics.mean_expected_accuracy += rm.expected_accuracy;
    metrics.mean_violation_ms += rm.violation_ms;
    if (rm.violation_ms > 0.0) ++metrics.violation_count;
    metrics.per_request.push_back(std::move(rm));
  }
  double n = static_cast<double>(requests.size());
  if (n > 0) {
    metrics.mean_utility /= n;
    metrics.mean_expected_accuracy /= n;
    metrics.mean_violation_ms /= n;
  }
  return metrics;
}

ThetaMap estimate_thetas(const ScenarioSpec& spec, const GeneratedScenario& scenario) {
  ThetaMap thetas;
  for (std::size_t i = 0; i < scenario.requests.size(); ++i) {
    const Request& request = scenario.requests[i];
    const Application& app = scenario.apps.at(request.app_id);
    DirichletBelief prior = prior_for_app(spec, app, scenario.apps.size());
    Evidence evidence;
    if (spec.estimation.sim_accuracy) {
      evidence = simulated_estimator(*spec.estimation.sim_accuracy, request.true_label,
                                     app.label_count, spec.estimation.k,
                                     Rng::derive(spec.seed ^ 0x65766964ULL, i));
    } else {
      evidence = knn_evidence(request.data_point, scenario.corpora.at(request.app_id),
                              spec.estimation.k, app.label_count);
    }
    thetas.emplace(request.request_id, theta_estimate(posterior(prior, evidence)));
  }
  return thetas;
}

PreparedTrial prepare_trial(const ScenarioSpec& scenario, const SchedulerSpec& scheduler,
                            std::uint64_t seed) {
  ScenarioSpec seeded = scenario;
  seeded.seed = seed;

  PreparedTrial prepared;
  prepared.scenario = gen_scenario(seeded);
  GeneratedScenario& generated = prepared.scenario;

  prepared.has_thetas = scheduler.accuracy_source == AccuracySource::Dynamic ||
                        scheduler.selection == Selection::GroupedDataAware;

  auto started = std::chrono::steady_clock::now();

  if (scheduler.short_circuit) {
    AppMap augmented;
    for (const auto& [app_id, app] : generated.apps) {
      DirichletBelief prior = prior_for_app(seeded, app, generated.apps.size());
      ModelProfile profile;
      if (seeded.estimation.sim_accuracy) {
        profile = profile_simulated(*seeded.estimation.sim_accuracy, app.label_count,
                                    seeded.estimation.k, prior,
                                    generated.holdouts.at(app_id),
                                    Rng::derive(seed ^ 0x70726f66ULL,
                                                std::hash<std::string>{}(app_id)));
      } else {
        profile = profile_sneakpeek(generated.corpora.at(app_id), seeded.estimation.k,
                                    prior, generated.holdouts.at(app_id));
      }
      augmented.emplace(app_id, augment_short_circuit(app, profile));
    }
    generated.apps = std::move(augmented);
  }

  if (prepared.has_thetas) {
    prepared.thetas = estimate_thetas(seeded, generated);
  }

  SchedulingContext ctx;
  ctx.now_ms = seeded.window_ms;
  ctx.requests = &generated.requests;
  ctx.apps = &generated.apps;
  ctx.thetas = prepared.has_thetas ? &prepared.thetas : nullptr;

  prepared.schedule = make_schedule(scheduler, ctx);
  prepared.overhead_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
          .count();
  return prepared;
}

TrialMetrics run_trial(const ScenarioSpec& scenario, const SchedulerSpec& scheduler,
                       std::uint64_t seed) {
  PreparedTrial prepared = prepare_trial(scenario, scheduler, seed);
  ExecutionTrace trace = execute(prepared.schedule, prepared.scenario.requests,
                                 prepared.scenario.apps, scheduler.worker_count);
  TrialMetrics metrics =
      evaluate(trace, prepared.scenario.requests, prepared.scenario.apps);
  metrics.scheduling_overhead_ms = prepared.overhead_ms;
  return metrics;
}

}  // namespace sneakpeek
