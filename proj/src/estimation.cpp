#include "sneakpeek/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sneakpeek/rng.hpp"

namespace sneakpeek {

NeighborIndex::NeighborIndex(std::vector<std::vector<double>> points,
                             std::vector<ClassLabel> labels)
    : points_(std::move(points)), labels_(std::move(labels)) {
  if (points_.empty() || points_.size() != labels_.size()) {
    throw InsufficientCorpus("corpus must be non-empty with one label per point");
  }
  dimension_ = points_[0].size();
  for (const auto& p : points_) {
    if (p.size() != dimension_) {
      throw DimensionError("corpus points must share one dimension");
    }
  }
}

DirichletBelief make_prior(PriorKind kind, int label_count,
                           const std::optional<ThetaVector>& class_freq_hint,
                           std::optional<double> window_request_count) {
  if (label_count <= 0) {
    throw DimensionError("label_count must be positive");
  }
  DirichletBelief belief;
  switch (kind) {
    case PriorKind::Uninformative:
      belief.alpha.assign(static_cast<std::size_t>(label_count), 0.5);
      break;
    case PriorKind::WeaklyInformative: {
      if (!class_freq_hint) {
        throw MissingPriorHint("weakly informative prior requires a class frequency hint");
      }
      if (static_cast<int>(class_freq_hint->size()) != label_count) {
        throw DimensionError("hint length must equal label count");
      }
      belief.alpha.assign(class_freq_hint->values().begin(), class_freq_hint->values().end());
      for (double& a : belief.alpha) a = std::max(a, 1e-6);
      break;
    }
    case PriorKind::StronglyInformative: {
      if (!class_freq_hint) {
        throw MissingPriorHint("strongly informative prior requires a class frequency hint");
      }
      if (!window_request_count || *window_request_count <= 0.0) {
        throw MissingPriorHint("strongly informative prior requires a window request count");
      }
      if (static_cast<int>(class_freq_hint->size()) != label_count) {
        throw DimensionError("hint length must equal label count");
      }
      belief.alpha.resize(static_cast<std::size_t>(label_count));
      for (int i = 0; i < label_count; ++i) {
        belief.alpha[static_cast<std::size_t>(i)] =
            std::max((*class_freq_hint)[static_cast<std::size_t>(i)] * *window_request_count,
                     1e-6);
      }
      break;
    }
  }
  return belief;
}

Evidence knn_evidence(const std::vector<double>& point, const NeighborIndex& index,
                      int k, int label_count) {
  if (point.size() != index.dimension()) {
    throw DimensionError("query dimension does not match corpus");
  }
  if (k <= 0 || static_cast<std::size_t>(k) > index.size()) {
    throw InsufficientCorpus("k exceeds corpus size");
  }

  std::vector<std::pair<double, std::size_t>> by_distance;
  by_distance.reserve(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto& candidate = index.points()[i];
    double sq = 0.0;
    for (std::size_t d = 0; d < point.size(); ++d) {
      double diff = point[d] - candidate[d];
      sq += diff * diff;
    }
    by_distance.emplace_back(sq, i);
  }
  // (distance, insertion order) comparison realizes the deterministic
  // tie-break at the k-th neighbor.
  std::nth_element(by_distance.begin(), by_distance.begin() + (k - 1), by_distance.end());

  Evidence evidence;
  evidence.counts.assign(static_cast<std::size_t>(label_count), 0);
  for (int i = 0; i < k; ++i) {
    ClassLabel label = index.labels()[by_distance[static_cast<std::size_t>(i)].second];
    if (label < 0 || label >= label_count) {
      throw DimensionError("corpus label out of range");
    }
    evidence.counts[static_cast<std::size_t>(label)]++;
  }
  return evidence;
}

DirichletBelief posterior(const DirichletBelief& prior, const Evidence& evidence) {
  if (prior.alpha.size() != evidence.counts.size()) {
    throw DimensionError("prior/evidence length mismatch");
  }
  DirichletBelief updated = prior;
  for (std::size_t i = 0; i < updated.alpha.size(); ++i) {
    updated.alpha[i] += static_cast<double>(evidence.counts[i]);
  }
  return updated;
}

ThetaVector theta_estimate(const DirichletBelief& belief) {
  double total = std::accumulate(belief.alpha.begin(), belief.alpha.end(), 0.0);
  std::vector<double> theta(belief.alpha.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    theta[i] = belief.alpha[i] / total;
  }
  return ThetaVector(std::move(theta));
}

double dynamic_accuracy(const ThetaVector& theta, const ModelProfile& profile) {
  return theta_accuracy(theta, profile.per_class_recall);
}

Evidence simulated_estimator(double target_accuracy, ClassLabel true_label,
                             int label_count, int k, std::uint64_t rng_seed) {
  if (label_count < 2 || true_label < 0 || true_label >= label_count) {
    throw DimensionError("need at least two classes and a valid true label");
  }
  std::vector<double> row(static_cast<std::size_t>(label_count),
                          (1.0 - target_accuracy) / static_cast<double>(label_count - 1));
  row[static_cast<std::size_t>(true_label)] = target_accuracy;

  Rng rng(rng_seed);
  Evidence evidence;
  evidence.counts.assign(static_cast<std::size_t>(label_count), 0);
  for (int i = 0; i < k; ++i) {
    evidence.counts[rng.weighted(row)]++;
  }
  return evidence;
}

ModelProfile profile_sneakpeek(
    const NeighborIndex& index, int k, const DirichletBelief& prior,
    const std::vector<std::pair<std::vector<double>, ClassLabel>>& holdout) {
  if (holdout.empty()) {
    throw InsufficientCorpus("holdout must be non-empty");
  }
  int label_count = static_cast<int>(prior.alpha.size());
  ConfusionMatrix confusion(static_cast<std::size_t>(label_count),
                            std::vector<double>(static_cast<std::size_t>(label_count), 0.0));
  for (const auto& [point, true_label] : holdout) {
    Evidence evidence = knn_evidence(point, index, k, label_count);
    ThetaVector theta = theta_estimate(posterior(prior, evidence));
    int predicted = 0;
    for (std::size_t i = 1; i < theta.size(); ++i) {
      if (theta[i] > theta[static_cast<std::size_t>(predicted)]) {
        predicted = static_cast<int>(i);
      }
    }
    confusion[static_cast<std::size_t>(true_label)][static_cast<std::size_t>(predicted)] += 1.0;
  }
  return ModelProfile::from_confusion("sneakpeek", std::move(confusion),
                                      /*infer_latency_ms=*/0.0, /*swap_latency_ms=*/0.0,
                                      /*allow_empty_rows=*/true);
}

std::vector<std::vector<std::string>> split_groups(
    const std::vector<std::string>& group_request_ids,
    const std::vector<ThetaVector>& thetas) {
  if (group_request_ids.size() != thetas.size()) {
    throw DimensionError("one theta per group member required");
  }
  if (group_request_ids.empty()) return {};

  std::size_t label_count = thetas.empty() ? 0 : thetas[0].size();
  std::vector<std::vector<std::string>> by_label(label_count);
  std::vector<std::string> inconclusive;
  for (std::size_t i = 0; i < group_request_ids.size(); ++i) {
    const ThetaVector& theta = thetas[i];
    std::size_t argmax = 0;
    for (std::size_t j = 1; j < theta.size(); ++j) {
      if (theta[j] > theta[argmax]) argmax = j;
    }
    if (theta[argmax] > 0.5) {
      by_label[argmax].push_back(group_request_ids[i]);
    } else {
      inconclusive.push_back(group_request_ids[i]);
    }
  }

  std::vector<std::vector<std::string>> subgroups;
  for (auto& members : by_label) {
    if (!members.empty()) subgroups.push_back(std::move(members));
  }
  if (!inconclusive.empty()) {
    if (subgroups.empty()) {
      subgroups.push_back(std::move(inconclusive));
    } else {
      // Attach to the largest conclusive subgroup (first one on ties).
      std::size_t largest = 0;
      for (std::size_t i = 1; i < subgroups.size(); ++i) {
        if (subgroups[i].size() > subgroups[largest].size()) largest = i;
      }
      for (auto& id : inconclusive) {
        subgroups[largest].push_back(std::move(id));
      }
    }
  }
  return subgroups;
}

}  // namespace sneakpeek
