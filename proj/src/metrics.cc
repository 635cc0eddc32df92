// Copyright 2026 The TENet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tenet/metrics.h"

#include <fstream>
#include <unordered_set>

#include "tenet/error.h"

namespace tenet {

std::int64_t count_hits(std::span<const std::int64_t> indices,
                        const torch::Tensor& target) {
  if (target.dim() != 1) throw DataError("target must be a vector");
  auto t = target.detach().to(torch::kCPU, torch::kFloat32).contiguous();
  const float* y = t.data_ptr<float>();
  const auto n = t.numel();
  std::unordered_set<std::int64_t> seen;
  std::int64_t hits = 0;
  for (auto i : indices) {
    if (i < 0 || i >= n) {
      throw DataError("predicted index " + std::to_string(i) +
                      " outside [0, " + std::to_string(n) + ")");
    }
    if (!seen.insert(i).second) {
      throw DataError("duplicate predicted index " + std::to_string(i));
    }
    if (y[i] != 0.0f) ++hits;
  }
  return hits;
}

namespace {

std::int64_t checked_hits(std::span<const std::int64_t> indices,
                          const torch::Tensor& target, std::int64_t k,
                          const char* what) {
  if (k < 1 || static_cast<std::int64_t>(indices.size()) != k) {
    throw DataError(std::string(what) + ": expected " + std::to_string(k) +
                    " indices, got " + std::to_string(indices.size()));
  }
  return count_hits(indices, target);
}

}  // namespace

double task_accuracy(std::span<const std::int64_t> top_class_indices,
                     const torch::Tensor& class_target, std::int64_t top_c) {
  return static_cast<double>(checked_hits(top_class_indices, class_target,
                                          top_c, "task_accuracy")) /
         static_cast<double>(top_c);
}

double explanation_accuracy(std::span<const std::int64_t> top_word_indices,
                            const torch::Tensor& word_target,
                            std::int64_t top_w) {
  return static_cast<double>(checked_hits(top_word_indices, word_target,
                                          top_w, "explanation_accuracy")) /
         static_cast<double>(top_w);
}

ImageAccuracy score_prediction(const Prediction& prediction,
                               const torch::Tensor& class_target,
                               const torch::Tensor& word_target,
                               const HyperParams& params) {
  ImageAccuracy a;
  a.image_id = prediction.image_id;
  a.class_hits = checked_hits(prediction.top_class_indices, class_target,
                              params.top_c, "task_accuracy");
  a.word_hits = checked_hits(prediction.top_word_indices, word_target,
                             params.top_w, "explanation_accuracy");
  a.acc_t = static_cast<double>(a.class_hits) / static_cast<double>(params.top_c);
  a.acc_e = static_cast<double>(a.word_hits) / static_cast<double>(params.top_w);
  a.overall = (a.acc_t + a.acc_e) / 2.0;
  return a;
}

EvalReport aggregate(std::vector<ImageAccuracy> per_image, std::int64_t top_c,
                     std::int64_t top_w) {
  if (per_image.empty()) throw DataError("cannot aggregate zero images");
  EvalReport r;
  r.n_images = static_cast<std::int64_t>(per_image.size());
  r.top_c = top_c;
  r.top_w = top_w;
  std::int64_t class_hits = 0;
  std::int64_t word_hits = 0;
  for (const auto& a : per_image) {
    class_hits += a.class_hits;
    word_hits += a.word_hits;
  }
  r.mean_acc_t = static_cast<double>(class_hits) /
                 static_cast<double>(r.n_images * top_c);
  r.mean_acc_e = static_cast<double>(word_hits) /
                 static_cast<double>(r.n_images * top_w);
  r.mean_overall = (r.mean_acc_t + r.mean_acc_e) / 2.0;
  r.per_image = std::move(per_image);
  return r;
}

EvalReport evaluate_predictions(std::span<const Prediction> predictions,
                                const EncodedDataset& targets,
                                const HyperParams& params) {
  if (predictions.size() != targets.size()) {
    throw DataError("have " + std::to_string(predictions.size()) +
                    " predictions for " + std::to_string(targets.size()) +
                    " samples");
  }
  std::vector<ImageAccuracy> per_image;
  per_image.reserve(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i].image_id != targets.image_id(i)) {
      throw DataError("prediction " + std::to_string(i) + " is for image " +
                      std::to_string(predictions[i].image_id) +
                      ", expected " + std::to_string(targets.image_id(i)));
    }
    per_image.push_back(score_prediction(predictions[i],
                                         targets.class_target(i),
                                         targets.word_target(i), params));
  }
  return aggregate(std::move(per_image), params.top_c, params.top_w);
}

EvalReport evaluate(TENetModel& model, const EncodedDataset& validation,
                    const HyperParams& params) {
  if (validation.empty()) throw DataError("evaluate: empty validation set");
  auto predictions = predict_dataset(model, validation, params);
  return evaluate_predictions(predictions, validation, params);
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json images = nlohmann::json::array();
  for (const auto& a : r.per_image) {
    images.push_back({{"image_id", a.image_id},
                      {"acc_t", a.acc_t},
                      {"acc_e", a.acc_e},
                      {"overall", a.overall}});
  }
  return {{"n_images", r.n_images},
          {"top_c", r.top_c},
          {"top_w", r.top_w},
          {"mean_acc_t", r.mean_acc_t},
          {"mean_acc_e", r.mean_acc_e},
          {"mean_overall", r.mean_overall},
          {"per_image", images}};
}

void write_eval_report(const std::filesystem::path& path,
                       const EvalReport& report) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << to_json(report).dump(2) << '\n';
}

}  // namespace tenet
