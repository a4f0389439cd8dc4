#include "sneakpeek/scoring.hpp"

#include <algorithm>
#include <cmath>

namespace sneakpeek {

ThetaVector::ThetaVector(std::vector<double> values) : values_(std::move(values)) {
  double sum = 0.0;
  for (double v : values_) {
    if (v < -1e-12 || v > 1.0 + 1e-12) {
      throw DimensionError("theta entries must lie in [0,1]");
    }
    sum += v;
  }
  if (values_.empty() || std::abs(sum - 1.0) > 1e-9) {
    throw DimensionError("theta must be non-empty and sum to 1");
  }
}

double penalty(const PenaltySpec& spec, double deadline_ms, double completion_ms) {
  if (deadline_ms <= 0.0) {
    throw InvalidDeadline("deadline must be positive");
  }
  if (spec.kind == PenaltyKind::ConstantZero) return 0.0;
  if (completion_ms <= deadline_ms) return 0.0;
  if (spec.kind == PenaltyKind::Step || spec.literal_clamp) return 1.0;

  double x = (completion_ms - deadline_ms) / deadline_ms;
  switch (spec.kind) {
    case PenaltyKind::Linear:
      return std::min(1.0, x);
    case PenaltyKind::Sigmoid: {
      if (x >= 1.0) return 1.0;
      // 1 / (1 + (x/(1-x))^-3) == x^3 / (x^3 + (1-x)^3); the closed form
      // avoids pow() in scheduler inner loops.
      double a = x * x * x;
      double b = (1.0 - x) * (1.0 - x) * (1.0 - x);
      return a / (a + b);
    }
    default:
      return 1.0;
  }
}

double utility(double accuracy, const PenaltySpec& spec, double deadline_ms,
               double t_start_ms, double latency_ms) {
  return accuracy * (1.0 - penalty(spec, deadline_ms, t_start_ms + latency_ms));
}

double accuracy_from_confusion(const ConfusionMatrix& confusion) {
  double trace = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < confusion.size(); ++i) {
    if (confusion[i].size() != confusion.size()) {
      throw DimensionError("confusion matrix must be square");
    }
    for (std::size_t j = 0; j < confusion[i].size(); ++j) {
      total += confusion[i][j];
    }
    trace += confusion[i][i];
  }
  if (total <= 0.0) {
    throw EmptyConfusion("confusion matrix has zero total");
  }
  return trace / total;
}

std::vector<double> recalls_from_confusion(const ConfusionMatrix& confusion) {
  std::vector<double> recalls(confusion.size());
  for (std::size_t i = 0; i < confusion.size(); ++i) {
    if (confusion[i].size() != confusion.size()) {
      throw DimensionError("confusion matrix must be square");
    }
    double row = 0.0;
    for (double v : confusion[i]) row += v;
    if (row <= 0.0) {
      throw EmptyConfusion("confusion matrix row has zero sum");
    }
    recalls[i] = confusion[i][i] / row;
  }
  return recalls;
}

double theta_accuracy(const ThetaVector& theta, const std::vector<double>& recalls) {
  if (theta.size() != recalls.size()) {
    throw DimensionError("theta/recall length mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < recalls.size(); ++i) {
    acc += theta[i] * recalls[i];
  }
  return acc;
}

double quadratic_score_direct(const std::vector<std::vector<double>>& probs,
                              const std::vector<int>& labels) {
  if (probs.empty()) {
    throw EmptyInput("no probability vectors");
  }
  if (probs.size() != labels.size()) {
    throw DimensionError("probs/labels length mismatch");
  }
  double score = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const auto& p = probs[i];
    int label = labels[i];
    if (label < 0 || static_cast<std::size_t>(label) >= p.size()) {
      throw DimensionError("label out of range");
    }
    double sq = 0.0;
    for (double v : p) sq += v * v;
    score += 2.0 * p[label] - sq;
  }
  return score / static_cast<double>(probs.size());
}

double quadratic_score_theta(const ThetaVector& theta,
                             const std::vector<double>& mean_true_label_prob,
                             double mean_sq) {
  if (theta.size() != mean_true_label_prob.size()) {
    throw DimensionError("theta/mu length mismatch");
  }
  double score = 0.0;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    score += theta[j] * mean_true_label_prob[j];
  }
  return 2.0 * score - mean_sq;
}

double theta_weighted_f1(const ThetaVector& theta, const ConfusionMatrix& confusion) {
  if (theta.size() != confusion.size()) {
    throw DimensionError("theta/confusion size mismatch");
  }
  std::vector<double> recalls = recalls_from_confusion(confusion);
  std::size_t n = confusion.size();
  double score = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double col = 0.0;
    for (std::size_t j = 0; j < n; ++j) col += confusion[j][i];
    double prec = col > 0.0 ? confusion[i][i] / col : 0.0;
    double rec = recalls[i];
    double f1 = (prec + rec) > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
    score += theta[i] * f1;
  }
  return score;
}

}  // namespace sneakpeek
