#pragma once

#include <string>
#include <vector>

#include "sneakpeek/core.hpp"

namespace sneakpeek::testing {

// Uniform-error confusion with the requested accuracy on every diagonal.
inline ConfusionMatrix uniform_confusion(double accuracy, int classes) {
  ConfusionMatrix z(static_cast<std::size_t>(classes),
                    std::vector<double>(static_cast<std::size_t>(classes),
                                        classes > 1 ? (1.0 - accuracy) / (classes - 1) : 0.0));
  for (int i = 0; i < classes; ++i) {
    z[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = accuracy;
  }
  return z;
}

inline ModelProfile make_model(const std::string& id, double accuracy, double infer_ms,
                               double swap_ms, int classes = 2) {
  return ModelProfile::from_confusion(id, uniform_confusion(accuracy, classes), infer_ms,
                                      swap_ms);
}

inline Application make_app(const std::string& app_id,
                            std::vector<ModelProfile> models, int classes = 2,
                            PenaltySpec penalty = {PenaltyKind::Step, false}) {
  Application app;
  app.app_id = app_id;
  app.label_count = classes;
  app.models = std::move(models);
  app.penalty = penalty;
  return app;
}

inline Request make_request(const std::string& id, const std::string& app_id,
                            double arrival_ms, double deadline_ms, ClassLabel label = 0) {
  Request request;
  request.request_id = id;
  request.app_id = app_id;
  request.arrival_ms = arrival_ms;
  request.deadline_ms = deadline_ms;
  request.true_label = label;
  return request;
}

}  // namespace sneakpeek::testing
