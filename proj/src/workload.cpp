#include "sneakpeek/workload.hpp"

#include <algorithm>
#include <cmath>

#include "sneakpeek/rng.hpp"

namespace sneakpeek {

namespace {

constexpr double kConfusionRowTotal = 1000.0;

std::vector<double> per_class_recalls(const AppSpec& app, const ModelSpec& model) {
  double accuracy = model.accuracy;
  double skew = model.recall_skew.value_or(app.recall_skew);
  std::vector<double> recalls(static_cast<std::size_t>(app.label_count), accuracy);
  if (skew != 0.0 && app.label_count > 1) {
    recalls[0] = accuracy + skew;
    double drop = skew / static_cast<double>(app.label_count - 1);
    for (std::size_t i = 1; i < recalls.size(); ++i) recalls[i] = accuracy - drop;
  }
  for (double& r : recalls) r = std::clamp(r, 0.0, 1.0);
  return recalls;
}

// Integer confusion row: recall on the diagonal, errors spread as evenly as
// possible over the wrong labels (leftovers to the lowest label indices).
std::vector<double> confusion_row(int label_count, int true_label, double recall) {
  std::vector<double> row(static_cast<std::size_t>(label_count), 0.0);
  double diagonal = std::round(recall * kConfusionRowTotal);
  diagonal = std::clamp(diagonal, 0.0, kConfusionRowTotal);
  row[static_cast<std::size_t>(true_label)] = diagonal;
  if (label_count == 1) {
    row[0] = kConfusionRowTotal;
    return row;
  }
  long long remainder = static_cast<long long>(kConfusionRowTotal - diagonal);
  long long base = remainder / (label_count - 1);
  long long leftover = remainder % (label_count - 1);
  for (int j = 0; j < label_count; ++j) {
    if (j == true_label) continue;
    row[static_cast<std::size_t>(j)] = static_cast<double>(base + (leftover > 0 ? 1 : 0));
    if (leftover > 0) --leftover;
  }
  return row;
}

ModelProfile synth_model(const AppSpec& app, const std::string& model_id,
                         const ModelSpec& spec) {
  std::vector<double> recalls = per_class_recalls(app, spec);
  ConfusionMatrix confusion;
  confusion.reserve(static_cast<std::size_t>(app.label_count));
  for (int i = 0; i < app.label_count; ++i) {
    confusion.push_back(confusion_row(app.label_count, i, recalls[static_cast<std::size_t>(i)]));
  }
  return ModelProfile::from_confusion(model_id, std::move(confusion),
                                      spec.infer_latency_ms, spec.swap_latency_ms);
}

std::vector<ModelSpec> expand_models(const AppSpec& app) {
  if (!app.variance_suite) return app.model_specs;
  const VarianceSuite& suite = *app.variance_suite;
  double s = suite.spread_pct;
  std::vector<ModelSpec> specs;
  specs.push_back(ModelSpec{std::clamp(suite.mean_accuracy * (1.0 - s), 0.0, 1.0),
                            suite.mean_latency_ms * (1.0 - s), suite.swap_latency_ms});
  specs.push_back(ModelSpec{std::clamp(suite.mean_accuracy, 0.0, 1.0),
                            suite.mean_latency_ms, suite.swap_latency_ms});
  specs.push_back(ModelSpec{std::clamp(suite.mean_accuracy * (1.0 + s), 0.0, 1.0),
                            suite.mean_latency_ms * (1.0 + s), suite.swap_latency_ms});
  return specs;
}

// Cluster centers: class j sits at (1 + j / dim) * separation along axis
// j % dim, so any two centers are at least `separation` apart.
std::vector<double> cluster_center(const AppSpec& app, ClassLabel label) {
  std::vector<double> center(static_cast<std::size_t>(app.feature_dim), 0.0);
  int axis = label % app.feature_dim;
  int ring = label / app.feature_dim;
  center[static_cast<std::size_t>(axis)] =
      (1.0 + static_cast<double>(ring)) * app.cluster_separation;
  return center;
}

std::vector<double> draw_point(const AppSpec& app, ClassLabel label, Rng& rng) {
  std::vector<double> point = cluster_center(app, label);
  for (double& coordinate : point) {
    coordinate += rng.normal(0.0, 1.0);
  }
  return point;
}

void validate_app(const AppSpec& app) {
  if (app.label_count < 2) {
    throw GenError(app.app_id + ": at least two classes required");
  }
  if (static_cast<int>(app.class_mix.size()) != app.label_count) {
    throw GenError(app.app_id + ": class_mix length must equal label_count");
  }
  double sum = 0.0;
  for (double p : app.class_mix) {
    if (p < 0.0) throw GenError(app.app_id + ": negative class_mix entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw GenError(app.app_id + ": class_mix must sum to 1");
  }
  if (!app.variance_suite && app.model_specs.empty()) {
    throw GenError(app.app_id + ": no models specified");
  }
  if (app.corpus_size < app.label_count || app.holdout_size <= 0) {
    throw GenError(app.app_id + ": corpus/holdout sizes too small");
  }
  if (app.feature_dim <= 0 || app.cluster_separation <= 0.0) {
    throw GenError(app.app_id + ": invalid feature-space parameters");
  }
}

}  // namespace

GeneratedScenario gen_scenario(const ScenarioSpec& spec) {
  if (spec.apps.empty() || spec.request_count <= 0 || spec.window_ms <= 0.0) {
    throw GenError("scenario requires apps, requests and a positive window");
  }
  if (spec.deadline.mean_ms <= 0.0) {
    throw GenError("deadline mean must be positive");
  }

  GeneratedScenario out;

  // Per-app corpora and profiles first, requests second; the draw order is
  // part of the determinism contract.
  for (const AppSpec& app_spec : spec.apps) {
    validate_app(app_spec);
    Rng rng(Rng::derive(spec.seed, std::hash<std::string>{}(app_spec.app_id)));

    Application app;
    app.app_id = app_spec.app_id;
    app.label_count = app_spec.label_count;
    app.penalty = spec.penalty;
    std::vector<ModelSpec> model_specs = expand_models(app_spec);
    for (std::size_t m = 0; m < model_specs.size(); ++m) {
      app.models.push_back(
          synth_model(app_spec, app_spec.app_id + "/m" + std::to_string(m), model_specs[m]));
    }
    if (spec.estimation.hint_source == HintSource::StreamMix) {
      app.class_prior_hint = app_spec.class_mix;
    } else {
      app.class_prior_hint = std::vector<double>(
          static_cast<std::size_t>(app_spec.label_count),
          1.0 / static_cast<double>(app_spec.label_count));
    }

    // Corpus: one seed point per class with nonzero mix, remainder from the
    // stream distribution.
    std::vector<std::vector<double>> points;
    std::vector<ClassLabel> labels;
    for (int c = 0; c < app_spec.label_count; ++c) {
      if (app_spec.class_mix[static_cast<std::size_t>(c)] > 0.0) {
        labels.push_back(c);
        points.push_back(draw_point(app_spec, c, rng));
      }
    }
    while (static_cast<int>(points.size()) < app_spec.corpus_size) {
      ClassLabel label = static_cast<ClassLabel>(rng.weighted(app_spec.class_mix));
      labels.push_back(label);
      points.push_back(draw_point(app_spec, label, rng));
    }

    // Holdout: balanced labels by rotation, freshly drawn points (disjoint
    // from the corpus with probability one).
    HoldoutSet holdout;
    holdout.reserve(static_cast<std::size_t>(app_spec.holdout_size));
    for (int i = 0; i < app_spec.holdout_size; ++i) {
      ClassLabel label = i % app_spec.label_count;
      holdout.emplace_back(draw_point(app_spec, label, rng), label);
    }

    out.apps.emplace(app.app_id, std::move(app));
    out.corpora.emplace(app_spec.app_id, NeighborIndex(std::move(points), std::move(labels)));
    out.holdouts.emplace(app_spec.app_id, std::move(holdout));
  }

  Rng rng(Rng::derive(spec.seed, 0x7265717565737473ULL));  // request stream
  int digits = spec.request_count >= 10000 ? 6 : 4;
  for (int i = 0; i < spec.request_count; ++i) {
    const AppSpec& app_spec = spec.apps[static_cast<std::size_t>(i) % spec.apps.size()];
    Request request;
    std::string number = std::to_string(i);
    std::size_t width = static_cast<std::size_t>(digits);
    std::size_t pad = number.size() < width ? width - number.size() : 0;
    request.request_id = "r" + std::string(pad, '0') + number;
    request.app_id = app_spec.app_id;
    request.true_label = static_cast<ClassLabel>(rng.weighted(app_spec.class_mix));
    request.arrival_ms = rng.uniform(0.0, spec.window_ms);
    double offset;
    if (spec.deadline.kind == DeadlineKind::Uniform) {
      offset = rng.uniform(0.75 * spec.deadline.mean_ms, 1.25 * spec.deadline.mean_ms);
    } else {
      offset = rng.normal(spec.deadline.mean_ms, spec.deadline.sd_ms);
    }
    request.deadline_ms = request.arrival_ms + std::max(1.0, offset);
    request.data_point = draw_point(app_spec, request.true_label, rng);
    out.requests.push_back(std::move(request));
  }
  return out;
}

ScenarioSpec builtin(const std::string& name) {
  // Model accuracies, latencies and per-class skews are artifact constants,
  // sized so the 12-request default window is genuinely contended and the
  // variants trade accuracy against latency with class specialists.
  // The skews make profiled accuracy a misleading guide on the skewed
  // streams: some variants owe their test-set accuracy to minority classes.
  AppSpec fall;
  fall.app_id = "fall";
  fall.label_count = 2;
  fall.class_mix = {0.95, 0.05};
  fall.cluster_separation = 2.4;
  fall.recall_skew = 0.10;
  fall.model_specs = {
      {0.66, 20.0, 32.0, 0.14}, {0.76, 22.0, 32.0, 0.08}, {0.81, 26.0, 34.0, 0.04},
      {0.86, 30.0, 34.0, 0.02}, {0.96, 34.0, 36.0, -0.04},
  };

  AppSpec voice;
  voice.app_id = "voice";
  voice.label_count = 6;
  voice.class_mix.assign(6, 1.0 / 6.0);
  voice.cluster_separation = 2.6;
  voice.recall_skew = 0.05;
  voice.model_specs = {{0.71, 18.0, 28.0, 0.06}, {0.91, 26.0, 32.0, -0.06}};

  AppSpec heart;
  heart.app_id = "heart";
  heart.label_count = 7;
  heart.class_mix.assign(7, 0.2 / 6.0);
  heart.class_mix[0] = 0.8;
  heart.cluster_separation = 2.8;
  heart.recall_skew = 0.06;
  heart.model_specs = {{0.72, 19.0, 28.0, 0.06},
                       {0.92, 18.0, 26.0, -0.10},
                       {0.92, 26.0, 30.0, 0.04},
                       {0.72, 24.0, 30.0, 0.02}};

  ScenarioSpec spec;
  spec.window_ms = 100.0;
  spec.deadline = DeadlineDist{DeadlineKind::Uniform, 150.0, 0.0};
  spec.penalty = PenaltySpec{PenaltyKind::Sigmoid, false};

  if (name == "fall") {
    spec.apps = {fall};
    spec.request_count = 12;
  } else if (name == "voice") {
    spec.apps = {voice};
    spec.request_count = 12;
  } else if (name == "heart") {
    spec.apps = {heart};
    spec.request_count = 12;
  } else if (name == "default_trio") {
    spec.apps = {fall, voice, heart};
    spec.request_count = 12;
  } else {
    throw UnknownScenario(name);
  }
  return spec;
}

std::vector<std::string> builtin_names() {
  return {"fall", "voice", "heart", "default_trio"};
}

}  // namespace sneakpeek
