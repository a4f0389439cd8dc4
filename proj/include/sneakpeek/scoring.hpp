#pragma once

#include <cstddef>
#include <vector>

#include "sneakpeek/errors.hpp"

namespace sneakpeek {

enum class PenaltyKind { Step, Linear, Sigmoid, ConstantZero };

struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::Sigmoid;
  // When set, late requests always incur the full penalty (the saturating
  // form of the Linear/Sigmoid curves); kept for comparison runs.
  bool literal_clamp = false;
};

// Class-frequency vector: entries in [0,1], summing to 1 within 1e-9.
class ThetaVector {
 public:
  explicit ThetaVector(std::vector<double> values);

  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
};

using ConfusionMatrix = std::vector<std::vector<double>>;

// Deadline-miss penalty in [0,1]; 0 whenever completion <= deadline and
// monotone non-decreasing in the completion time.
double penalty(const PenaltySpec& spec, double deadline_ms, double completion_ms);

// Expected accuracy discounted by the deadline penalty of the planned
// completion time t_start + latency.
double utility(double accuracy, const PenaltySpec& spec, double deadline_ms,
               double t_start_ms, double latency_ms);

// trace(Z) / sum(Z).
double accuracy_from_confusion(const ConfusionMatrix& confusion);

// Per-class recall diag(Z) / row_sum(Z); rows must have positive sums.
std::vector<double> recalls_from_confusion(const ConfusionMatrix& confusion);

// Accuracy under class frequencies theta: sum_i theta_i * recall_i.
double theta_accuracy(const ThetaVector& theta, const std::vector<double>& recalls);

// Mean quadratic score of probability vectors against true labels:
// (1/n) sum_i (2 p_{i,l(i)} - p_i . p_i).
double quadratic_score_direct(const std::vector<std::vector<double>>& probs,
                              const std::vector<int>& labels);

// Quadratic score from sufficient statistics: 2 sum_j theta_j mu_p(c_j) -
// mean_sq, where mu_p(c_j) is the mean probability assigned to c_j on points
// whose true label is c_j and mean_sq = (1/n) sum_i p_i . p_i.
double quadratic_score_theta(const ThetaVector& theta,
                             const std::vector<double>& mean_true_label_prob,
                             double mean_sq);

// Theta-weighted F1: sum_i theta_i * F1_i with precision from column sums and
// recall from row sums; a class with precision + recall == 0 scores 0.
double theta_weighted_f1(const ThetaVector& theta, const ConfusionMatrix& confusion);

}  // namespace sneakpeek
