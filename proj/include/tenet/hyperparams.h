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

#ifndef TENET_HYPERPARAMS_H_
#define TENET_HYPERPARAMS_H_

#include <cstdint>
#include <string>

#include "json.hpp"

namespace tenet {

// Training and prediction hyperparameters. Defaults are the canonical
// COCO setting; optimizer fields are additions with conservative
// fine-tuning defaults.
struct HyperParams {
  std::int64_t num_classes = 91;
  std::int64_t vocab_size = 1000;
  std::int64_t num_epochs = 20;
  std::int64_t batch_size = 32;
  std::int64_t height = 400;
  std::int64_t width = 400;
  std::int64_t top_c = 3;
  std::int64_t top_w = 10;

  std::string optimizer = "adamw";  // adamw | adam | sgd
  double learning_rate = 1e-4;
  double weight_decay = 1e-4;
  std::uint64_t seed = 0;
  // Multiplies the explanation-head loss. 1.0 is the plain sum.
  double explanation_loss_weight = 1.0;

  // Throws ConfigError naming the first offending field.
  void validate() const;

  bool operator==(const HyperParams&) const = default;
};

nlohmann::json to_json(const HyperParams& params);
HyperParams hyperparams_from_json(const nlohmann::json& j);

}  // namespace tenet

#endif  // TENET_HYPERPARAMS_H_
