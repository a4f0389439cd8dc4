#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "helpers.hpp"
#include "sneakpeek/estimation.hpp"
#include "sneakpeek/rng.hpp"

using namespace sneakpeek;
using namespace sneakpeek::testing;

TEST_CASE("make_prior covers the three regimes") {
  DirichletBelief jeffreys = make_prior(PriorKind::Uninformative, 2);
  CHECK(jeffreys.alpha == std::vector<double>{0.5, 0.5});

  DirichletBelief weak = make_prior(PriorKind::WeaklyInformative, 2,
                                    ThetaVector({0.95, 0.05}));
  CHECK(weak.alpha[0] == doctest::Approx(0.95));
  CHECK(weak.alpha[1] == doctest::Approx(0.05));

  DirichletBelief strong = make_prior(PriorKind::StronglyInformative, 2,
                                      ThetaVector({0.95, 0.05}), 12.0);
  CHECK(strong.alpha[0] == doctest::Approx(11.4));
  CHECK(strong.alpha[1] == doctest::Approx(0.6));

  CHECK_THROWS_AS(make_prior(PriorKind::WeaklyInformative, 2), MissingPriorHint);
  CHECK_THROWS_AS(make_prior(PriorKind::StronglyInformative, 2, ThetaVector({0.5, 0.5})),
                  MissingPriorHint);
}

TEST_CASE("knn_evidence counts the nearest labels deterministically") {
  // Two tight clusters around 0 and 10.
  std::vector<std::vector<double>> points = {{0.0}, {0.1}, {10.0}, {10.1}, {10.2}};
  std::vector<ClassLabel> labels = {0, 0, 1, 1, 1};
  NeighborIndex index(points, labels);

  Evidence one = knn_evidence({0.0}, index, 1, 2);
  CHECK(one.counts == std::vector<int>{1, 0});

  Evidence all = knn_evidence({5.0}, index, 5, 2);
  CHECK(all.counts == std::vector<int>{2, 3});
  CHECK(all.total() == 5);

  NeighborIndex single({{0.0}, {1.0}, {2.0}}, {0, 0, 0});
  CHECK(knn_evidence({0.5}, single, 3, 1).counts == std::vector<int>{3});

  CHECK_THROWS_AS(knn_evidence({0.0, 0.0}, index, 1, 2), DimensionError);
  CHECK_THROWS_AS(knn_evidence({0.0}, index, 6, 2), InsufficientCorpus);

  // Equidistant points resolve by insertion order.
  NeighborIndex ties({{1.0}, {-1.0}, {1.0}}, {0, 1, 2});
  Evidence tie_break = knn_evidence({0.0}, ties, 2, 3);
  CHECK(tie_break.counts == std::vector<int>{1, 1, 0});

  for (int i = 0; i < 5; ++i) {
    CHECK(knn_evidence({5.0}, index, 5, 2).counts == all.counts);
  }
}

TEST_CASE("posterior is the exact conjugate update") {
  DirichletBelief prior{{0.5, 0.5}};
  CHECK(posterior(prior, Evidence{{0, 0}}).alpha == prior.alpha);
  CHECK(posterior(prior, Evidence{{2, 3}}).alpha == std::vector<double>{2.5, 3.5});
  CHECK(posterior(DirichletBelief{{1.0, 1.0, 1.0}}, Evidence{{0, 5, 0}}).alpha ==
        std::vector<double>{1.0, 6.0, 1.0});
  CHECK_THROWS_AS(posterior(prior, Evidence{{1, 2, 3}}), DimensionError);

  Rng rng(3);
  for (int iter = 0; iter < 1000; ++iter) {
    std::size_t n = 1 + rng.index(8);
    DirichletBelief fuzz_prior;
    Evidence evidence;
    for (std::size_t i = 0; i < n; ++i) {
      fuzz_prior.alpha.push_back(rng.uniform(1e-3, 20.0));
      evidence.counts.push_back(static_cast<int>(rng.index(50)));
    }
    DirichletBelief updated = posterior(fuzz_prior, evidence);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(updated.alpha[i] ==
            fuzz_prior.alpha[i] + static_cast<double>(evidence.counts[i]));
    }
  }
}

TEST_CASE("theta_estimate is the posterior mean") {
  ThetaVector theta = theta_estimate(DirichletBelief{{2.5, 3.5}});
  CHECK(theta[0] == doctest::Approx(2.5 / 6.0));
  CHECK(theta[1] == doctest::Approx(3.5 / 6.0));

  ThetaVector uniform = theta_estimate(DirichletBelief{{4.0, 4.0, 4.0}});
  CHECK(uniform[0] == doctest::Approx(1.0 / 3.0));

  ThetaVector spiked = theta_estimate(DirichletBelief{{1.0, 6.0, 1.0}});
  CHECK(spiked[0] == doctest::Approx(0.125));
  CHECK(spiked[1] == doctest::Approx(0.75));

  Rng rng(17);
  for (int iter = 0; iter < 200; ++iter) {
    std::size_t n = 1 + rng.index(10);
    DirichletBelief belief;
    for (std::size_t i = 0; i < n; ++i) belief.alpha.push_back(rng.uniform(1e-3, 30.0));
    ThetaVector estimate = theta_estimate(belief);
    double sum = 0.0;
    for (std::size_t i = 0; i < estimate.size(); ++i) {
      CHECK(estimate[i] >= 0.0);
      sum += estimate[i];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("evidence dominates a fixed prior as k grows") {
  DirichletBelief prior{{0.5, 0.5}};
  Evidence big{{7000, 3000}};
  ThetaVector theta = theta_estimate(posterior(prior, big));
  CHECK(std::abs(theta[0] - 0.7) < 0.01);
  CHECK(std::abs(theta[1] - 0.3) < 0.01);
}

TEST_CASE("a strong prior suppresses the evidence signal") {
  ThetaVector hint({0.9, 0.1});
  DirichletBelief prior = make_prior(PriorKind::StronglyInformative, 2, hint, 1e6);
  // Evidence points entirely at the minority class and barely moves theta.
  ThetaVector theta = theta_estimate(posterior(prior, Evidence{{0, 5}}));
  CHECK(std::abs(theta[0] - 0.9) < 0.01);
  CHECK(std::abs(theta[1] - 0.1) < 0.01);
}

TEST_CASE("dynamic_accuracy reduces to theta-weighted recall") {
  ModelProfile profile = ModelProfile::from_confusion(
      "m", {{95.0, 5.0}, {60.0, 40.0}}, 10.0, 0.0);
  // Theta set to the profiling row frequencies reproduces the cached value.
  ThetaVector test_freq({0.5, 0.5});
  CHECK(dynamic_accuracy(test_freq, profile) == doctest::Approx(profile.profiled_accuracy));
  CHECK(dynamic_accuracy(ThetaVector({0.0, 1.0}), profile) == doctest::Approx(0.40));
  CHECK(dynamic_accuracy(ThetaVector({0.41666667, 0.58333333}),
                         ModelProfile::from_confusion("n", {{95.0, 5.0}, {60.0, 40.0}},
                                                      1.0, 0.0)) ==
        doctest::Approx(0.41666667 * 0.95 + 0.58333333 * 0.40));
}

TEST_CASE("simulated_estimator respects the target accuracy") {
  Evidence perfect = simulated_estimator(1.0, 1, 2, 5, 42);
  CHECK(perfect.counts == std::vector<int>{0, 5});

  Evidence inverted = simulated_estimator(0.0, 0, 2, 5, 42);
  CHECK(inverted.counts == std::vector<int>{0, 5});

  Evidence coin = simulated_estimator(0.5, 0, 2, 10000, 7);
  // 3 sigma of Binomial(10000, 0.5).
  CHECK(std::abs(coin.counts[0] - 5000) < 150);

  CHECK(simulated_estimator(0.5, 0, 2, 50, 9).counts ==
        simulated_estimator(0.5, 0, 2, 50, 9).counts);
}

TEST_CASE("profile_sneakpeek on separable clusters is perfect") {
  std::vector<std::vector<double>> points;
  std::vector<ClassLabel> labels;
  for (int i = 0; i < 20; ++i) {
    points.push_back({static_cast<double>(i % 5) * 0.01 + (i < 10 ? 0.0 : 100.0)});
    labels.push_back(i < 10 ? 0 : 1);
  }
  NeighborIndex index(points, labels);
  DirichletBelief prior = make_prior(PriorKind::Uninformative, 2);

  std::vector<std::pair<std::vector<double>, ClassLabel>> holdout;
  for (int i = 0; i < 6; ++i) {
    holdout.emplace_back(std::vector<double>{i < 3 ? 0.02 : 100.02}, i < 3 ? 0 : 1);
  }
  ModelProfile profile = profile_sneakpeek(index, 1, prior, holdout);
  CHECK(profile.profiled_accuracy == doctest::Approx(1.0));
  CHECK(profile.infer_latency_ms == 0.0);
  CHECK(profile.swap_latency_ms == 0.0);

  // Holdout covering a single class still yields that class's recall.
  std::vector<std::pair<std::vector<double>, ClassLabel>> one_class;
  for (int i = 0; i < 4; ++i) one_class.emplace_back(std::vector<double>{0.03}, 0);
  ModelProfile partial = profile_sneakpeek(index, 1, prior, one_class);
  CHECK(partial.per_class_recall[0] == doctest::Approx(1.0));

  CHECK_THROWS_AS(profile_sneakpeek(index, 1, prior, {}), InsufficientCorpus);
}

TEST_CASE("split_groups follows the argmax-over-threshold rule") {
  std::vector<std::string> ids = {"a", "b", "c", "d"};

  std::vector<ThetaVector> agree(4, ThetaVector({0.9, 0.1}));
  auto one = split_groups(ids, agree);
  REQUIRE(one.size() == 1);
  CHECK(one[0].size() == 4);

  std::vector<ThetaVector> half = {ThetaVector({0.9, 0.1}), ThetaVector({0.1, 0.9}),
                                   ThetaVector({0.9, 0.1}), ThetaVector({0.1, 0.9})};
  auto two = split_groups(ids, half);
  REQUIRE(two.size() == 2);
  CHECK(two[0] == std::vector<std::string>{"a", "c"});
  CHECK(two[1] == std::vector<std::string>{"b", "d"});

  std::vector<ThetaVector> inconclusive(4, ThetaVector({0.4, 0.3, 0.3}));
  auto lone = split_groups(ids, inconclusive);
  REQUIRE(lone.size() == 1);
  CHECK(lone[0].size() == 4);

  // Inconclusive members join the largest conclusive subgroup.
  std::vector<ThetaVector> mixed = {ThetaVector({0.9, 0.1}), ThetaVector({0.9, 0.1}),
                                    ThetaVector({0.1, 0.9}), ThetaVector({0.5, 0.5})};
  auto merged = split_groups(ids, mixed);
  REQUIRE(merged.size() == 2);
  CHECK(merged[0] == std::vector<std::string>{"a", "b", "d"});
  CHECK(merged[1] == std::vector<std::string>{"c"});
}

TEST_CASE("split_groups always partitions its input") {
  Rng rng(31);
  for (int iter = 0; iter < 200; ++iter) {
    std::size_t n = 1 + rng.index(12);
    std::size_t classes = 2 + rng.index(5);
    std::vector<std::string> ids;
    std::vector<ThetaVector> thetas;
    for (std::size_t i = 0; i < n; ++i) {
      ids.push_back("r" + std::to_string(i));
      std::vector<double> theta(classes);
      double sum = 0.0;
      for (double& v : theta) {
        v = rng.uniform(1e-3, 1.0);
        sum += v;
      }
      for (double& v : theta) v /= sum;
      thetas.push_back(ThetaVector(theta));
    }
    auto subgroups = split_groups(ids, thetas);
    std::multiset<std::string> combined;
    for (const auto& subgroup : subgroups) {
      CHECK(!subgroup.empty());
      combined.insert(subgroup.begin(), subgroup.end());
    }
    CHECK(combined == std::multiset<std::string>(ids.begin(), ids.end()));
  }
}
