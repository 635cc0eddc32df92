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

// The dual-head network: one backbone pass feeds a classification head and an
// explanation (caption-word) head.

#ifndef TENET_MODEL_H_
#define TENET_MODEL_H_

#include <torch/torch.h>

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "tenet/backbone.h"
#include "tenet/hyperparams.h"
#include "tenet/vocab.h"

namespace tenet {

struct BackboneSpec {
  std::string name = "resnet50";
  bool pretrained = true;
  // torchvision state dict for pretrained weights, as written by
  // tools/export_torchvision_weights.py.
  std::string weights_path;
  // Excludes backbone parameters from optimization.
  bool freeze = false;
  // Filled in by build_model.
  std::int64_t feature_dim = 0;

  bool operator==(const BackboneSpec&) const = default;
};

nlohmann::json to_json(const BackboneSpec& spec);
BackboneSpec backbone_spec_from_json(const nlohmann::json& j);

struct ModelOutput {
  torch::Tensor class_logits;  // (B, num_classes)
  torch::Tensor word_logits;   // (B, vocab size)
};

class TENetModelImpl : public torch::nn::Module {
 public:
  TENetModelImpl(BackbonePtr backbone, BackboneSpec spec,
                 std::int64_t num_classes, std::int64_t vocab_size);

  // Raw logits for a (B, 3, H, W) batch. Throws ShapeError on bad input or
  // if the backbone output does not match the probed feature width.
  ModelOutput forward(const torch::Tensor& images);

  BackboneImpl& backbone() { return *backbone_; }
  const BackboneSpec& spec() const { return spec_; }
  std::int64_t num_classes() const { return classification_head->options.out_features(); }
  std::int64_t vocab_size() const { return caption_head->options.out_features(); }

  torch::nn::Linear classification_head{nullptr};
  torch::nn::Linear caption_head{nullptr};

 private:
  BackbonePtr backbone_;
  BackboneSpec spec_;
};
TORCH_MODULE(TENetModel);

// Creates the backbone from the registry, loads pretrained weights when
// requested, probes its feature width at (height, width) and attaches two
// freshly initialized heads (uniform in +-1/sqrt(feature_dim), zero bias).
// All random initialization is drawn after seeding with `seed`.
TENetModel build_model(const BackboneSpec& spec, std::int64_t num_classes,
                       std::int64_t vocab_size, std::int64_t height,
                       std::int64_t width, std::uint64_t seed);

// Parameters the optimizer should update: everything, or only the heads if
// the backbone is frozen.
std::vector<torch::Tensor> trainable_parameters(TENetModel& model);

struct Checkpoint {
  TENetModel model{nullptr};
  HyperParams params;
  Vocabulary vocab;
  int epoch = 0;
  nlohmann::json extra;
};

// Writes weights plus everything needed to predict without the original
// config: backbone spec, feature width, hyperparameters and the vocabulary
// with its fingerprint. The file is written to a temporary name and renamed.
void save_checkpoint(const std::filesystem::path& path, TENetModel& model,
                     const HyperParams& params, const Vocabulary& vocab,
                     int epoch, const nlohmann::json& extra = {});

// Throws DataError for unreadable files or a vocabulary that does not match
// its recorded fingerprint.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace tenet

#endif  // TENET_MODEL_H_
