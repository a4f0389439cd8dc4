#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sneakpeek/core.hpp"
#include "sneakpeek/scoring.hpp"

namespace sneakpeek {

// Dirichlet concentration parameters over class labels.
struct DirichletBelief {
  std::vector<double> alpha;  // all entries > 0
};

// Multinomial observation: per-class neighbor counts, k = sum.
struct Evidence {
  std::vector<int> counts;

  int total() const {
    int k = 0;
    for (int c : counts) k += c;
    return k;
  }
};

// Immutable exact-kNN corpus; insertion order is the distance tie-breaker.
class NeighborIndex {
 public:
  NeighborIndex(std::vector<std::vector<double>> points, std::vector<ClassLabel> labels);

  std::size_t size() const { return points_.size(); }
  std::size_t dimension() const { return dimension_; }
  const std::vector<std::vector<double>>& points() const { return points_; }
  const std::vector<ClassLabel>& labels() const { return labels_; }

 private:
  std::vector<std::vector<double>> points_;
  std::vector<ClassLabel> labels_;
  std::size_t dimension_;
};

enum class PriorKind { Uninformative, WeaklyInformative, StronglyInformative };

// Uninformative: Jeffreys, alpha_i = 0.5. Weakly: alpha_i = hint_i (total mass
// 1). Strongly: alpha_i = hint_i * window_request_count, floored at 1e-6.
DirichletBelief make_prior(PriorKind kind, int label_count,
                           const std::optional<ThetaVector>& class_freq_hint = std::nullopt,
                           std::optional<double> window_request_count = std::nullopt);

// Class counts of the k nearest corpus points by Euclidean distance; ties at
// the k-th distance resolved by lowest insertion order.
Evidence knn_evidence(const std::vector<double>& point, const NeighborIndex& index,
                      int k, int label_count);

// Conjugate update: alpha'_i = alpha_i + y_i.
DirichletBelief posterior(const DirichletBelief& prior, const Evidence& evidence);

// Posterior mean: theta_i = alpha_i / sum(alpha).
ThetaVector theta_estimate(const DirichletBelief& belief);

// Theta-weighted accuracy of a model: theta . per_class_recall.
double dynamic_accuracy(const ThetaVector& theta, const ModelProfile& profile);

// Synthetic estimator of a given accuracy: draws k pseudo-neighbor labels
// from the true label's confusion row (target accuracy on the diagonal,
// errors uniform over the remaining classes).
Evidence simulated_estimator(double target_accuracy, ClassLabel true_label,
                             int label_count, int k, std::uint64_t rng_seed);

// Runs the evidence -> posterior -> argmax pipeline over a holdout set and
// profiles the resulting classifier as a zero-latency model variant.
ModelProfile profile_sneakpeek(const NeighborIndex& index, int k,
                               const DirichletBelief& prior,
                               const std::vector<std::pair<std::vector<double>, ClassLabel>>& holdout);

// Splits a group by argmax label for members whose max theta exceeds 0.5;
// inconclusive members join the largest conclusive subgroup (or form the sole
// subgroup when none is conclusive). Output subgroups partition the input.
std::vector<std::vector<std::string>> split_groups(
    const std::vector<std::string>& group_request_ids,
    const std::vector<ThetaVector>& thetas);

}  // namespace sneakpeek
