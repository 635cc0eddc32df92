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

// Task, explanation and overall accuracy of ranked predictions.

#ifndef TENET_METRICS_H_
#define TENET_METRICS_H_

#include <torch/torch.h>

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "json.hpp"
#include "tenet/dataset.h"
#include "tenet/hyperparams.h"
#include "tenet/model.h"
#include "tenet/predictor.h"

namespace tenet {

// Number of predicted indices whose target entry is 1. Throws DataError on
// duplicate or out-of-range indices.
std::int64_t count_hits(std::span<const std::int64_t> indices,
                        const torch::Tensor& target);

// Fraction of the top_c predicted classes that are ground-truth positives.
// Throws DataError unless exactly top_c distinct valid indices are given.
double task_accuracy(std::span<const std::int64_t> top_class_indices,
                     const torch::Tensor& class_target, std::int64_t top_c);

// Fraction of the top_w predicted words that occur in the captions.
double explanation_accuracy(std::span<const std::int64_t> top_word_indices,
                            const torch::Tensor& word_target,
                            std::int64_t top_w);

struct ImageAccuracy {
  std::int64_t image_id = 0;
  std::int64_t class_hits = 0;
  std::int64_t word_hits = 0;
  double acc_t = 0.0;
  double acc_e = 0.0;
  double overall = 0.0;  // (acc_t + acc_e) / 2
};

struct EvalReport {
  std::vector<ImageAccuracy> per_image;
  double mean_acc_t = 0.0;
  double mean_acc_e = 0.0;
  double mean_overall = 0.0;
  std::int64_t n_images = 0;
  std::int64_t top_c = 0;
  std::int64_t top_w = 0;
};

ImageAccuracy score_prediction(const Prediction& prediction,
                               const torch::Tensor& class_target,
                               const torch::Tensor& word_target,
                               const HyperParams& params);

// Means are formed from integer hit totals, so they are independent of the
// order of `per_image`. Throws DataError if `per_image` is empty.
EvalReport aggregate(std::vector<ImageAccuracy> per_image, std::int64_t top_c,
                     std::int64_t top_w);

// predictions[i] is scored against sample i of `targets`.
EvalReport evaluate_predictions(std::span<const Prediction> predictions,
                                const EncodedDataset& targets,
                                const HyperParams& params);

// Predicts every sample in eval mode and scores it. Throws DataError for an
// empty set.
EvalReport evaluate(TENetModel& model, const EncodedDataset& validation,
                    const HyperParams& params);

nlohmann::json to_json(const EvalReport& report);
void write_eval_report(const std::filesystem::path& path,
                       const EvalReport& report);

}  // namespace tenet

#endif  // TENET_METRICS_H_
