#include "sneakpeek/core.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace sneakpeek {

ModelProfile ModelProfile::from_confusion(std::string model_id, ConfusionMatrix confusion,
                                          double infer_latency_ms, double swap_latency_ms,
                                          bool allow_empty_rows) {
  if (infer_latency_ms < 0.0 || swap_latency_ms < 0.0) {
    throw Error("latencies must be non-negative");
  }
  ModelProfile profile;
  profile.model_id = std::move(model_id);
  profile.profiled_accuracy = accuracy_from_confusion(confusion);
  profile.per_class_recall.resize(confusion.size());
  for (std::size_t i = 0; i < confusion.size(); ++i) {
    double row = 0.0;
    for (double v : confusion[i]) row += v;
    if (row <= 0.0) {
      if (!allow_empty_rows) {
        throw EmptyConfusion("confusion matrix row has zero sum");
      }
      profile.per_class_recall[i] = 0.0;
    } else {
      profile.per_class_recall[i] = confusion[i][i] / row;
    }
  }
  profile.confusion = std::move(confusion);
  profile.infer_latency_ms = infer_latency_ms;
  profile.swap_latency_ms = swap_latency_ms;
  return profile;
}

const ModelProfile& Application::profile(int model_ref) const {
  if (model_ref == kSneakPeekModel) {
    if (!sneakpeek_model) {
      throw Error("no short-circuit model registered for " + app_id);
    }
    return *sneakpeek_model;
  }
  if (model_ref < 0 || static_cast<std::size_t>(model_ref) >= models.size()) {
    throw Error("model_ref out of range for " + app_id);
  }
  return models[static_cast<std::size_t>(model_ref)];
}

namespace {

const Request* find_request(const std::vector<Request>& requests, const std::string& id) {
  for (const auto& r : requests) {
    if (r.request_id == id) return &r;
  }
  return nullptr;
}

// Effective latency of an entry given the worker's resident model.
// resident == nullptr means nothing is loaded yet. The sentinel costs zero
// and leaves the resident model untouched.
double effective_latency(const ModelProfile& profile, int model_ref, LatencyMode mode,
                         const std::string* resident_model_id) {
  if (model_ref == kSneakPeekModel) return 0.0;
  double latency = profile.infer_latency_ms;
  if (mode == LatencyMode::PaperFlat) {
    latency += profile.swap_latency_ms;
  } else if (resident_model_id == nullptr || *resident_model_id != profile.model_id) {
    latency += profile.swap_latency_ms;
  }
  return latency;
}

}  // namespace

std::optional<Violation> validate(const Schedule& schedule,
                                  const std::vector<Request>& requests,
                                  const AppMap& apps, bool require_complete) {
  std::unordered_set<std::string> seen;
  for (const auto& entry : schedule.entries) {
    if (!seen.insert(entry.request_id).second) {
      return Violation{ViolationKind::DuplicateRequest, entry.request_id};
    }
    const Request* request = find_request(requests, entry.request_id);
    if (request == nullptr) {
      return Violation{ViolationKind::UnknownRequest, entry.request_id};
    }
    auto it = apps.find(request->app_id);
    if (it == apps.end()) {
      return Violation{ViolationKind::InvalidModelRef,
                       entry.request_id + ": unknown app " + request->app_id};
    }
    const Application& app = it->second;
    bool valid_ref =
        (entry.model_ref == kSneakPeekModel && app.sneakpeek_model.has_value()) ||
        (entry.model_ref >= 0 &&
         static_cast<std::size_t>(entry.model_ref) < app.models.size());
    if (!valid_ref) {
      return Violation{ViolationKind::InvalidModelRef,
                       entry.request_id + ": model " + std::to_string(entry.model_ref)};
    }
  }
  if (require_complete) {
    for (const auto& request : requests) {
      if (seen.find(request.request_id) == seen.end()) {
        return Violation{ViolationKind::MissingRequest, request.request_id};
      }
    }
  }
  return std::nullopt;
}

double start_time(const Schedule& schedule, const std::string& request_id,
                  const std::vector<Request>& requests, const AppMap& apps,
                  LatencyMode mode) {
  int target_worker = -1;
  for (const auto& entry : schedule.entries) {
    if (entry.request_id == request_id) {
      target_worker = entry.worker_id;
      break;
    }
  }
  if (target_worker < 0) {
    throw NotScheduled(request_id);
  }

  double busy = 0.0;
  const std::string* resident = nullptr;
  for (const auto& entry : schedule.entries) {
    if (entry.worker_id != target_worker) continue;
    if (entry.request_id == request_id) return busy;
    const Request* request = find_request(requests, entry.request_id);
    if (request == nullptr) {
      throw NotScheduled("unknown request in schedule: " + entry.request_id);
    }
    const ModelProfile& profile = apps.at(request->app_id).profile(entry.model_ref);
    busy += effective_latency(profile, entry.model_ref, mode, resident);
    if (entry.model_ref != kSneakPeekModel) {
      resident = &profile.model_id;
    }
  }
  throw NotScheduled(request_id);
}

double schedule_utility(const Schedule& schedule, const std::vector<Request>& requests,
                        const AppMap& apps, AccuracySource accuracy_source,
                        LatencyMode mode, const ThetaMap* thetas) {
  if (auto violation = validate(schedule, requests, apps, /*require_complete=*/false)) {
    throw Error("invalid schedule: " + violation->detail);
  }
  if (requests.empty()) return 0.0;

  // Per-worker prefix walk; avoids the quadratic start_time-per-entry scan.
  std::unordered_map<int, std::pair<double, const std::string*>> workers;
  std::unordered_map<std::string, const Request*> by_id;
  for (const auto& r : requests) by_id.emplace(r.request_id, &r);

  double total = 0.0;
  for (const auto& entry : schedule.entries) {
    const Request& request = *by_id.at(entry.request_id);
    const Application& app = apps.at(request.app_id);
    const ModelProfile& profile = app.profile(entry.model_ref);

    auto& [busy, resident] = workers[entry.worker_id];
    double latency = effective_latency(profile, entry.model_ref, mode, resident);

    double accuracy = profile.profiled_accuracy;
    if (accuracy_source == AccuracySource::Dynamic && entry.model_ref != kSneakPeekModel) {
      if (thetas == nullptr) {
        throw Error("dynamic accuracy requires theta estimates");
      }
      accuracy = theta_accuracy(thetas->at(entry.request_id), profile.per_class_recall);
    }
    total += utility(accuracy, app.penalty, request.deadline_ms, busy, latency);

    busy += latency;
    if (entry.model_ref != kSneakPeekModel) {
      resident = &profile.model_id;
    }
  }
  return total / static_cast<double>(requests.size());
}

}  // namespace sneakpeek
