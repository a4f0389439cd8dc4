#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sneakpeek/scoring.hpp"

namespace sneakpeek {

using ClassLabel = int;

// Sentinel model_ref for answering a request directly from the estimation
// model (zero latency, never resident in accelerator memory).
constexpr int kSneakPeekModel = -1;

// Everything the scheduler knows about one model variant.
struct ModelProfile {
  std::string model_id;
  ConfusionMatrix confusion;  // rows = true label, columns = predicted
  double infer_latency_ms = 0.0;
  double swap_latency_ms = 0.0;
  double profiled_accuracy = 0.0;        // trace / sum, cached
  std::vector<double> per_class_recall;  // diag / row sums, cached

  // Builds a profile and derives the cached accuracy fields. Rows with zero
  // sum are rejected unless allow_empty_rows is set, in which case their
  // recall is pinned to 0 (used when a profiling holdout missed a class).
  static ModelProfile from_confusion(std::string model_id, ConfusionMatrix confusion,
                                     double infer_latency_ms, double swap_latency_ms,
                                     bool allow_empty_rows = false);
};

struct Application {
  std::string app_id;
  int label_count = 0;
  std::vector<ModelProfile> models;
  PenaltySpec penalty;
  std::optional<std::vector<double>> class_prior_hint;
  // Installed by augment_short_circuit; candidate referenced by the
  // kSneakPeekModel sentinel.
  std::optional<ModelProfile> sneakpeek_model;

  const ModelProfile& profile(int model_ref) const;
};

struct Request {
  std::string request_id;
  std::string app_id;
  double arrival_ms = 0.0;
  double deadline_ms = 0.0;  // absolute: arrival + per-request offset
  std::vector<double> data_point;
  // Ground truth; consumed only by the simulator, metrics, and corpus
  // generation. Schedulers must not read it.
  ClassLabel true_label = 0;
};

struct ScheduleEntry {
  std::string request_id;
  int model_ref = 0;  // index into the app's models, or kSneakPeekModel
  int worker_id = 0;
};

// Execution plan: per worker, entries run in list order. The positional
// encoding makes duplicate-order violations impossible by construction.
struct Schedule {
  std::vector<ScheduleEntry> entries;
};

enum class LatencyMode {
  PaperFlat,      // every entry pays infer + swap
  SequenceAware,  // swap only when the worker's resident model changes
};

enum class AccuracySource { Profiled, Dynamic };

using AppMap = std::map<std::string, Application>;
using ThetaMap = std::map<std::string, ThetaVector>;

enum class ViolationKind {
  DuplicateRequest,
  MissingRequest,
  UnknownRequest,
  InvalidModelRef,
  DuplicatePosition,
};

struct Violation {
  ViolationKind kind;
  std::string detail;
};

// Returns the first violated schedule constraint, or nullopt when valid.
// require_complete additionally demands that every request is scheduled.
std::optional<Violation> validate(const Schedule& schedule,
                                  const std::vector<Request>& requests,
                                  const AppMap& apps, bool require_complete = true);

// Sum of effective latencies of all entries ordered before the request on the
// same worker. Throws NotScheduled for unknown request ids.
double start_time(const Schedule& schedule, const std::string& request_id,
                  const std::vector<Request>& requests, const AppMap& apps,
                  LatencyMode mode);

// Mean per-request utility of a schedule; requests absent from the schedule
// contribute zero. Dynamic accuracy requires a theta entry per scheduled
// request (the sentinel model always uses its profiled accuracy).
double schedule_utility(const Schedule& schedule, const std::vector<Request>& requests,
                        const AppMap& apps, AccuracySource accuracy_source,
                        LatencyMode mode, const ThetaMap* thetas = nullptr);

}  // namespace sneakpeek
