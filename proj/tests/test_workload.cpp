#include <doctest.h>

#include <cmath>
#include <set>

#include "sneakpeek/estimation.hpp"
#include "sneakpeek/workload.hpp"

using namespace sneakpeek;

namespace {

ScenarioSpec tiny_scenario() {
  AppSpec app;
  app.app_id = "app";
  app.label_count = 2;
  app.class_mix = {0.7, 0.3};
  app.cluster_separation = 3.0;
  app.corpus_size = 50;
  app.holdout_size = 20;
  app.model_specs = {{0.8, 10.0, 5.0}};
  ScenarioSpec spec;
  spec.apps = {app};
  spec.request_count = 8;
  spec.seed = 7;
  return spec;
}

}  // namespace

TEST_CASE("variance suite expands to the documented triple") {
  AppSpec app;
  app.app_id = "suite";
  app.label_count = 2;
  app.class_mix = {0.5, 0.5};
  app.corpus_size = 20;
  app.holdout_size = 10;
  app.variance_suite = VarianceSuite{0.80, 20.0, 0.01, 10.0};

  ScenarioSpec spec;
  spec.apps = {app};
  spec.request_count = 4;
  GeneratedScenario generated = gen_scenario(spec);

  const auto& models = generated.apps.at("suite").models;
  REQUIRE(models.size() == 3);
  CHECK(models[0].profiled_accuracy == doctest::Approx(0.792).epsilon(1e-3));
  CHECK(models[0].infer_latency_ms == doctest::Approx(19.8));
  CHECK(models[1].profiled_accuracy == doctest::Approx(0.80).epsilon(1e-3));
  CHECK(models[1].infer_latency_ms == doctest::Approx(20.0));
  CHECK(models[2].profiled_accuracy == doctest::Approx(0.808).epsilon(1e-3));
  CHECK(models[2].infer_latency_ms == doctest::Approx(20.2));
}

TEST_CASE("one-hot class mix produces a single label") {
  ScenarioSpec spec = tiny_scenario();
  spec.apps[0].class_mix = {1.0, 0.0};
  GeneratedScenario generated = gen_scenario(spec);
  for (const auto& request : generated.requests) {
    CHECK(request.true_label == 0);
  }
}

TEST_CASE("generation is deterministic given the seed") {
  ScenarioSpec spec = tiny_scenario();
  GeneratedScenario a = gen_scenario(spec);
  GeneratedScenario b = gen_scenario(spec);
  REQUIRE(a.requests.size() == b.requests.size());
  for (std::size_t i = 0; i < a.requests.size(); ++i) {
    CHECK(a.requests[i].request_id == b.requests[i].request_id);
    CHECK(a.requests[i].arrival_ms == b.requests[i].arrival_ms);
    CHECK(a.requests[i].deadline_ms == b.requests[i].deadline_ms);
    CHECK(a.requests[i].true_label == b.requests[i].true_label);
    CHECK(a.requests[i].data_point == b.requests[i].data_point);
  }
  CHECK(a.corpora.at("app").points() == b.corpora.at("app").points());

  spec.seed = 8;
  GeneratedScenario c = gen_scenario(spec);
  bool any_difference = false;
  for (std::size_t i = 0; i < a.requests.size(); ++i) {
    if (a.requests[i].arrival_ms != c.requests[i].arrival_ms) any_difference = true;
  }
  CHECK(any_difference);
}

TEST_CASE("generated confusion matrices reproduce the requested accuracy") {
  for (double accuracy : {0.55, 0.7, 0.831, 0.96}) {
    ScenarioSpec spec = tiny_scenario();
    spec.apps[0].label_count = 5;
    spec.apps[0].class_mix = {0.2, 0.2, 0.2, 0.2, 0.2};
    spec.apps[0].model_specs = {{accuracy, 10.0, 5.0}};
    GeneratedScenario generated = gen_scenario(spec);
    double measured = generated.apps.at("app").models[0].profiled_accuracy;
    CHECK(std::abs(measured - accuracy) <= 1e-3);
  }
}

TEST_CASE("recall skew keeps the balanced accuracy but spreads recalls") {
  ScenarioSpec spec = tiny_scenario();
  spec.apps[0].recall_skew = 0.1;
  GeneratedScenario generated = gen_scenario(spec);
  const ModelProfile& model = generated.apps.at("app").models[0];
  CHECK(model.per_class_recall[0] == doctest::Approx(0.9).epsilon(1e-3));
  CHECK(model.per_class_recall[1] == doctest::Approx(0.7).epsilon(1e-3));
  CHECK(model.profiled_accuracy == doctest::Approx(0.8).epsilon(1e-3));
}

TEST_CASE("stream labels follow the class mix") {
  ScenarioSpec spec = tiny_scenario();
  spec.request_count = 100000;
  spec.apps[0].class_mix = {0.85, 0.15};
  GeneratedScenario generated = gen_scenario(spec);
  double ones = 0.0;
  for (const auto& request : generated.requests) {
    ones += request.true_label == 1 ? 1.0 : 0.0;
  }
  CHECK(std::abs(ones / 100000.0 - 0.15) < 0.01);
}

TEST_CASE("corpus covers every class and stays disjoint from the holdout") {
  ScenarioSpec spec = tiny_scenario();
  spec.apps[0].class_mix = {0.97, 0.03};
  spec.apps[0].corpus_size = 40;
  GeneratedScenario generated = gen_scenario(spec);

  const NeighborIndex& corpus = generated.corpora.at("app");
  std::set<ClassLabel> seen(corpus.labels().begin(), corpus.labels().end());
  CHECK(seen == std::set<ClassLabel>{0, 1});

  std::set<std::vector<double>> corpus_points(corpus.points().begin(),
                                              corpus.points().end());
  for (const auto& [point, label] : generated.holdouts.at("app")) {
    CHECK(corpus_points.find(point) == corpus_points.end());
  }

  // Balanced holdout labels.
  int zeros = 0;
  for (const auto& [point, label] : generated.holdouts.at("app")) {
    zeros += label == 0 ? 1 : 0;
  }
  CHECK(zeros == 10);
}

TEST_CASE("deadlines stay after arrivals and respect the distribution floor") {
  ScenarioSpec spec = tiny_scenario();
  spec.deadline = DeadlineDist{DeadlineKind::Normal, 5.0, 50.0};  // heavy clipping
  spec.request_count = 2000;
  GeneratedScenario generated = gen_scenario(spec);
  for (const auto& request : generated.requests) {
    CHECK(request.deadline_ms >= request.arrival_ms + 1.0);
    CHECK(request.arrival_ms >= 0.0);
    CHECK(request.arrival_ms <= spec.window_ms);
  }
}

TEST_CASE("builtin scenarios match their documented shapes") {
  ScenarioSpec fall = builtin("fall");
  CHECK(fall.apps.size() == 1);
  CHECK(fall.apps[0].label_count == 2);
  CHECK(fall.apps[0].class_mix == std::vector<double>{0.95, 0.05});
  CHECK(fall.apps[0].model_specs.size() == 5);

  ScenarioSpec voice = builtin("voice");
  CHECK(voice.apps[0].label_count == 6);
  CHECK(voice.apps[0].class_mix[0] == doctest::Approx(1.0 / 6.0));
  CHECK(voice.apps[0].model_specs.size() == 2);

  ScenarioSpec heart = builtin("heart");
  CHECK(heart.apps[0].label_count == 7);
  CHECK(heart.apps[0].class_mix[0] == doctest::Approx(0.8));
  double tail = 0.0;
  for (std::size_t i = 1; i < heart.apps[0].class_mix.size(); ++i) {
    tail += heart.apps[0].class_mix[i];
  }
  CHECK(tail == doctest::Approx(0.2));

  ScenarioSpec trio = builtin("default_trio");
  CHECK(trio.apps.size() == 3);
  CHECK(trio.request_count == 12);
  CHECK(trio.window_ms == doctest::Approx(100.0));
  CHECK(trio.deadline.mean_ms == doctest::Approx(150.0));

  CHECK_THROWS_AS(builtin("nope"), UnknownScenario);
}

TEST_CASE("requests round-robin across apps") {
  ScenarioSpec spec = tiny_scenario();
  spec.request_count = 7;
  spec.apps.push_back(spec.apps[0]);
  spec.apps[1].app_id = "other";
  GeneratedScenario generated = gen_scenario(spec);
  int first = 0;
  for (const auto& request : generated.requests) {
    first += request.app_id == "app" ? 1 : 0;
  }
  CHECK(first == 4);
  CHECK(generated.requests.size() == 7);
}

TEST_CASE("generator rejects malformed specs") {
  ScenarioSpec spec = tiny_scenario();
  spec.apps[0].class_mix = {0.5, 0.4};
  CHECK_THROWS_AS(gen_scenario(spec), GenError);

  spec = tiny_scenario();
  spec.apps[0].model_specs.clear();
  CHECK_THROWS_AS(gen_scenario(spec), GenError);

  spec = tiny_scenario();
  spec.deadline.mean_ms = 0.0;
  CHECK_THROWS_AS(gen_scenario(spec), GenError);
}

TEST_CASE("default scenario kNN profiles land strictly between chance and perfection") {
  ScenarioSpec trio = builtin("default_trio");
  trio.seed = 1;
  GeneratedScenario generated = gen_scenario(trio);
  for (const auto& [app_id, app] : generated.apps) {
    DirichletBelief prior = make_prior(PriorKind::Uninformative, app.label_count);
    ModelProfile profile =
        profile_sneakpeek(generated.corpora.at(app_id), 5, prior, generated.holdouts.at(app_id));
    CHECK(profile.profiled_accuracy > 0.5);
    CHECK(profile.profiled_accuracy < 1.0);
  }
}
