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

#include "tenet/predictor.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "tenet/error.h"

namespace tenet {

TopK top_k(std::span<const float> values, std::int64_t k) {
  const auto n = static_cast<std::int64_t>(values.size());
  if (k < 1 || k > n) {
    throw ShapeError("top_k: k = " + std::to_string(k) +
                     " outside [1, " + std::to_string(n) + "]");
  }
  std::vector<std::int64_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  auto before = [&](std::int64_t a, std::int64_t b) {
    const float va = values[a];
    const float vb = values[b];
    const bool nan_a = std::isnan(va);
    const bool nan_b = std::isnan(vb);
    if (nan_a != nan_b) return nan_b;
    if (!nan_a && va != vb) return va > vb;
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + k, order.end(), before);
  TopK out;
  out.indices.assign(order.begin(), order.begin() + k);
  out.scores.reserve(k);
  for (auto i : out.indices) out.scores.push_back(values[i]);
  return out;
}

TopK top_k(const torch::Tensor& values, std::int64_t k) {
  if (values.dim() != 1) {
    throw ShapeError("top_k expects a 1-D tensor, got rank " +
                     std::to_string(values.dim()));
  }
  auto v = values.detach().to(torch::kCPU, torch::kFloat32).contiguous();
  return top_k(std::span<const float>(v.data_ptr<float>(), v.numel()), k);
}

Prediction rank_logits(std::int64_t image_id, const torch::Tensor& class_logits,
                       const torch::Tensor& word_logits,
                       const HyperParams& params) {
  Prediction p;
  p.image_id = image_id;
  auto classes = top_k(class_logits, params.top_c);
  auto words = top_k(word_logits, params.top_w);
  p.top_class_indices = std::move(classes.indices);
  p.top_class_scores = std::move(classes.scores);
  p.top_word_indices = std::move(words.indices);
  p.top_word_scores = std::move(words.scores);
  return p;
}

std::vector<Prediction> predict_batch(TENetModel& model,
                                      const torch::Tensor& images,
                                      std::span<const std::int64_t> image_ids,
                                      const HyperParams& params) {
  if (images.dim() != 4 ||
      images.size(0) != static_cast<std::int64_t>(image_ids.size())) {
    throw ShapeError("predict_batch: need one image id per image");
  }
  const bool was_training = model->is_training();
  model->eval();
  ModelOutput out;
  {
    torch::NoGradGuard no_grad;
    try {
      out = model->forward(images);
    } catch (...) {
      model->train(was_training);
      throw;
    }
  }
  model->train(was_training);
  std::vector<Prediction> predictions;
  predictions.reserve(image_ids.size());
  for (std::size_t i = 0; i < image_ids.size(); ++i) {
    const auto row = static_cast<std::int64_t>(i);
    predictions.push_back(rank_logits(image_ids[i], out.class_logits[row],
                                      out.word_logits[row], params));
  }
  return predictions;
}

Prediction predict(TENetModel& model, const torch::Tensor& image,
                   std::int64_t image_id, const HyperParams& params) {
  if (image.dim() != 3) {
    throw ShapeError("predict expects a single (3, H, W) image");
  }
  const std::int64_t ids[] = {image_id};
  return predict_batch(model, image.unsqueeze(0), ids, params).front();
}

std::vector<Prediction> predict_dataset(TENetModel& model,
                                        const EncodedDataset& data,
                                        const HyperParams& params) {
  std::vector<Prediction> predictions;
  predictions.reserve(data.size());
  const auto batch = static_cast<std::size_t>(params.batch_size);
  for (std::size_t start = 0; start < data.size(); start += batch) {
    std::vector<std::size_t> indices(std::min(batch, data.size() - start));
    std::iota(indices.begin(), indices.end(), start);
    auto b = data.make_batch(indices);
    auto part = predict_batch(model, b.images, b.image_ids, params);
    predictions.insert(predictions.end(), part.begin(), part.end());
  }
  return predictions;
}

DecodedPrediction decode(const Prediction& prediction,
                         const ClassIndexMap& classes, const Vocabulary& vocab) {
  DecodedPrediction d;
  d.image_id = prediction.image_id;
  for (auto c : prediction.top_class_indices) {
    d.classes.emplace_back(classes.name(c));
  }
  for (auto w : prediction.top_word_indices) {
    if (w < 0) throw std::out_of_range("negative word index");
    d.words.push_back(vocab.word(static_cast<std::size_t>(w)));
  }
  d.class_scores = prediction.top_class_scores;
  d.word_scores = prediction.top_word_scores;
  return d;
}

nlohmann::json to_json(const DecodedPrediction& d) {
  return {{"image_id", d.image_id},
          {"classes", d.classes},
          {"class_scores", d.class_scores},
          {"words", d.words},
          {"word_scores", d.word_scores}};
}

void write_predictions_jsonl(const std::filesystem::path& path,
                             std::span<const Prediction> predictions,
                             const Vocabulary& vocab) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  const auto classes = class_index_map();
  for (const auto& p : predictions) {
    auto j = to_json(decode(p, classes, vocab));
    j["class_indices"] = p.top_class_indices;
    j["word_indices"] = p.top_word_indices;
    out << j.dump() << '\n';
  }
}

}  // namespace tenet
