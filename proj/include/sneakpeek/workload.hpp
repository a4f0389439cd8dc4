#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sneakpeek/core.hpp"
#include "sneakpeek/estimation.hpp"

namespace sneakpeek {

struct ModelSpec {
  double accuracy = 0.8;
  double infer_latency_ms = 20.0;
  double swap_latency_ms = 10.0;
  // Per-model override of AppSpec::recall_skew; lets different variants
  // specialize on different classes.
  std::optional<double> recall_skew;
};

// Expands to three models at mean, mean*(1-spread) and mean*(1+spread) for
// both accuracy (clamped to [0,1]) and latency.
struct VarianceSuite {
  double mean_accuracy = 0.8;
  double mean_latency_ms = 20.0;
  double spread_pct = 0.0;
  double swap_latency_ms = 10.0;
};

struct AppSpec {
  std::string app_id;
  int label_count = 2;
  std::vector<double> class_mix;  // true stream distribution, sums to 1
  double cluster_separation = 2.0;
  int feature_dim = 4;
  std::vector<ModelSpec> model_specs;         // used when variance_suite is absent
  std::optional<VarianceSuite> variance_suite;
  int corpus_size = 300;
  int holdout_size = 120;
  // Per-class recall skew: class 0 gets accuracy + skew, the remaining
  // classes accuracy - skew/(|c|-1), keeping the balanced-test accuracy at
  // the requested value.
  double recall_skew = 0.0;
};

enum class DeadlineKind { Uniform, Normal };

struct DeadlineDist {
  DeadlineKind kind = DeadlineKind::Uniform;
  double mean_ms = 150.0;
  double sd_ms = 0.0;  // Normal only; Uniform draws from [mean/2, 3*mean/2]
};

enum class HintSource { StreamMix, ProfiledTestSet };

struct EstimationSpec {
  int k = 5;
  PriorKind prior = PriorKind::Uninformative;
  HintSource hint_source = HintSource::StreamMix;
  // When set, per-request evidence comes from the synthetic fixed-accuracy
  // estimator instead of kNN.
  std::optional<double> sim_accuracy;
};

struct ScenarioSpec {
  std::vector<AppSpec> apps;
  int request_count = 12;
  double window_ms = 100.0;
  DeadlineDist deadline;
  EstimationSpec estimation;
  PenaltySpec penalty;
  std::uint64_t seed = 0;
};

using HoldoutSet = std::vector<std::pair<std::vector<double>, ClassLabel>>;

struct GeneratedScenario {
  std::vector<Request> requests;
  AppMap apps;
  std::map<std::string, NeighborIndex> corpora;
  std::map<std::string, HoldoutSet> holdouts;
};

// Seeded end-to-end generation: model profiles, disjoint corpus/holdout sets
// from per-class Gaussian clusters, and the request stream.
GeneratedScenario gen_scenario(const ScenarioSpec& spec);

// Built-in scenario presets: "fall", "voice", "heart", "default_trio".
ScenarioSpec builtin(const std::string& name);

// Names understood by builtin().
std::vector<std::string> builtin_names();

}  // namespace sneakpeek
