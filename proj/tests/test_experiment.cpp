#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "sneakpeek/experiment.hpp"

using namespace sneakpeek;

namespace {

// Drops the wall-clock overhead column (the last one) from every CSV line.
std::string strip_overhead(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    std::size_t cut = line.rfind(',');
    out += line.substr(0, cut);
    out += '\n';
  }
  return out;
}

int count_rows(const std::string& csv) {
  int rows = -1;  // header
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  return rows;
}

const char* kTinyConfig = R"({
  "scenario": {
    "base": "default_trio",
    "apps": [
      {"app_id": "a", "label_count": 2, "class_mix": [0.9, 0.1],
       "corpus_size": 40, "holdout_size": 16,
       "models": [{"accuracy": 0.85, "infer_latency_ms": 18, "swap_latency_ms": 8},
                   {"accuracy": 0.7, "infer_latency_ms": 7, "swap_latency_ms": 4}]},
      {"app_id": "b", "label_count": 2, "class_mix": [0.6, 0.4],
       "corpus_size": 40, "holdout_size": 16,
       "models": [{"accuracy": 0.8, "infer_latency_ms": 12, "swap_latency_ms": 6}]}
    ],
    "request_count": 4,
    "window_ms": 100,
    "deadline": {"dist": "uniform", "mean_ms": 120}
  },
  "schedulers": ["lo-edf", "grouped"],
  "trials": 2,
  "base_seed": 5
})";

}  // namespace

TEST_CASE("scheduler presets cover the evaluation matrix") {
  for (const auto& name : scheduler_preset_names()) {
    CHECK_NOTHROW(scheduler_preset(name));
  }
  SchedulerSpec sneak = scheduler_preset("sneakpeek");
  CHECK(sneak.selection == Selection::GroupedDataAware);
  CHECK(sneak.short_circuit);
  CHECK(sneak.accuracy_source == AccuracySource::Dynamic);
  SchedulerSpec grouped = scheduler_preset("grouped");
  CHECK(grouped.selection == Selection::Grouped);
  CHECK(!grouped.short_circuit);
  CHECK_THROWS_AS(scheduler_preset("bogus"), ConfigError);
}

TEST_CASE("config parsing accepts builtin shorthand and rejects bad syntax") {
  ExperimentConfig config =
      parse_config(R"({"scenario": "default_trio", "schedulers": ["lo-edf"]})", "test");
  CHECK(config.scenario.apps.size() == 3);
  CHECK(config.trials == 1);

  try {
    parse_config("{\n  \"scenario\": \"default_trio\",\n  oops\n}", "bad.json");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bad.json:3") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_config(R"({"schedulers": ["lo-edf"]})", "t"), ConfigError);
  CHECK_THROWS_AS(
      parse_config(R"({"scenario": "default_trio", "schedulers": []})", "t"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_config(
          R"({"scenario": "default_trio", "schedulers": ["lo-edf"], "sweep": {"param": "nope", "values": [1]}})",
          "t"),
      ConfigError);
}

TEST_CASE("sweep values apply to scenario and scheduler fields") {
  ScenarioSpec scenario = builtin("default_trio");
  SchedulerSpec scheduler = scheduler_preset("lo-edf");

  apply_sweep_value("deadline_mean", "300", scenario, scheduler);
  CHECK(scenario.deadline.mean_ms == doctest::Approx(300.0));

  apply_sweep_value("deadline_sd", "40", scenario, scheduler);
  CHECK(scenario.deadline.kind == DeadlineKind::Normal);
  CHECK(scenario.deadline.sd_ms == doctest::Approx(40.0));

  apply_sweep_value("penalty", "step", scenario, scheduler);
  CHECK(scenario.penalty.kind == PenaltyKind::Step);

  apply_sweep_value("prior", "strongly_informative", scenario, scheduler);
  CHECK(scenario.estimation.prior == PriorKind::StronglyInformative);

  apply_sweep_value("worker_count", "3", scenario, scheduler);
  CHECK(scheduler.worker_count == 3);

  apply_sweep_value("k", "9", scenario, scheduler);
  CHECK(scenario.estimation.k == 9);

  apply_sweep_value("sp_sim_accuracy", "0.35", scenario, scheduler);
  REQUIRE(scenario.estimation.sim_accuracy.has_value());
  CHECK(*scenario.estimation.sim_accuracy == doctest::Approx(0.35));

  apply_sweep_value("app_count", "5", scenario, scheduler);
  CHECK(scenario.apps.size() == 5);
  CHECK(scenario.apps[3].app_id == "fall#1");

  apply_sweep_value("spread_pct", "0.2", scenario, scheduler);
  for (const auto& app : scenario.apps) {
    REQUIRE(app.variance_suite.has_value());
    CHECK(app.variance_suite->spread_pct == doctest::Approx(0.2));
  }

  CHECK_THROWS_AS(apply_sweep_value("deadline_mean", "abc", scenario, scheduler),
                  ConfigError);
}

TEST_CASE("run_experiment emits the expected row grid") {
  ExperimentConfig config = parse_config(kTinyConfig, "tiny");
  std::ostringstream out;
  run_experiment(config, out);
  // 2 schedulers x 2 trials, no sweep.
  CHECK(count_rows(out.str()) == 4);

  ExperimentConfig swept = config;
  SweepSpec sweep;
  sweep.param = "deadline_mean";
  sweep.values = {"80", "160", "240"};
  swept.sweep = sweep;
  std::ostringstream swept_out;
  run_experiment(swept, swept_out);
  CHECK(count_rows(swept_out.str()) == 12);

  std::istringstream first_line(swept_out.str());
  std::string header;
  std::getline(first_line, header);
  CHECK(header ==
        "sweep_param,sweep_value,scheduler,trial,seed,mean_utility,"
        "mean_expected_accuracy,mean_violation_ms,violation_count,"
        "scheduling_overhead_ms");
}

TEST_CASE("reruns are byte-identical apart from the overhead column") {
  ExperimentConfig config = parse_config(kTinyConfig, "tiny");
  std::ostringstream first, second;
  run_experiment(config, first);
  run_experiment(config, second);
  CHECK(strip_overhead(first.str()) == strip_overhead(second.str()));
}

TEST_CASE("oracle_check reports zero grouped misses on small instances") {
  ExperimentConfig config = parse_config(kTinyConfig, "tiny");
  config.schedulers = {"maxacc-edf", "lo-edf", "lo-priority", "grouped", "sneakpeek"};
  config.trials = 3;
  std::ostringstream out;
  int misses = oracle_check(config, out);
  CHECK(misses == 0);
  CHECK(out.str().find("exact=yes") != std::string::npos);
  CHECK(out.str().find("gap=") != std::string::npos);
  CHECK(out.str().find("exact=NO") == std::string::npos);
}
