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

// Ranking-based prediction: the TOP_C classes and TOP_W words with the
// largest raw logits.

#ifndef TENET_PREDICTOR_H_
#define TENET_PREDICTOR_H_

#include <torch/torch.h>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tenet/coco_categories.h"
#include "tenet/dataset.h"
#include "tenet/hyperparams.h"
#include "tenet/model.h"
#include "tenet/vocab.h"

namespace tenet {

struct TopK {
  std::vector<std::int64_t> indices;
  std::vector<float> scores;  // non-increasing
};

// Indices of the k largest values, largest first. Equal values are ordered
// by ascending index; NaNs rank below every number. Throws ShapeError unless
// 1 <= k <= values.size().
TopK top_k(std::span<const float> values, std::int64_t k);
// Same for a 1-D tensor.
TopK top_k(const torch::Tensor& values, std::int64_t k);

struct Prediction {
  std::int64_t image_id = 0;
  std::vector<std::int64_t> top_class_indices;
  std::vector<float> top_class_scores;
  std::vector<std::int64_t> top_word_indices;
  std::vector<float> top_word_scores;

  bool operator==(const Prediction&) const = default;
};

// Ranks already computed logits.
Prediction rank_logits(std::int64_t image_id, const torch::Tensor& class_logits,
                       const torch::Tensor& word_logits,
                       const HyperParams& params);

// One forward pass in eval mode without gradient tracking. The model's
// training flag is restored afterwards.
Prediction predict(TENetModel& model, const torch::Tensor& image,
                   std::int64_t image_id, const HyperParams& params);

// Batched version of predict for a (B, 3, H, W) tensor.
std::vector<Prediction> predict_batch(TENetModel& model,
                                      const torch::Tensor& images,
                                      std::span<const std::int64_t> image_ids,
                                      const HyperParams& params);

// Predicts every sample of `data` in batches of params.batch_size.
std::vector<Prediction> predict_dataset(TENetModel& model,
                                        const EncodedDataset& data,
                                        const HyperParams& params);

struct DecodedPrediction {
  std::int64_t image_id = 0;
  std::vector<std::string> classes;
  std::vector<float> class_scores;
  std::vector<std::string> words;
  std::vector<float> word_scores;
};

// Class indices become COCO category names and word indices vocabulary
// words, in prediction order. Throws std::out_of_range for invalid indices.
DecodedPrediction decode(const Prediction& prediction,
                         const ClassIndexMap& classes, const Vocabulary& vocab);

nlohmann::json to_json(const DecodedPrediction& decoded);

// One decoded prediction per line.
void write_predictions_jsonl(const std::filesystem::path& path,
                             std::span<const Prediction> predictions,
                             const Vocabulary& vocab);

}  // namespace tenet

#endif  // TENET_PREDICTOR_H_
