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

#include "tenet/hyperparams.h"

#include <cmath>

#include "tenet/error.h"

namespace tenet {
namespace {

void require_positive(std::int64_t value, const char* name) {
  if (value <= 0) {
    throw ConfigError(std::string(name) + " must be positive, got " +
                      std::to_string(value));
  }
}

}  // namespace

void HyperParams::validate() const {
  require_positive(num_classes, "num_classes");
  require_positive(vocab_size, "vocab_size");
  if (num_epochs < 0) throw ConfigError("num_epochs must be non-negative");
  require_positive(batch_size, "batch_size");
  require_positive(height, "height");
  require_positive(width, "width");
  require_positive(top_c, "top_c");
  require_positive(top_w, "top_w");
  if (top_c > num_classes) {
    throw ConfigError("top_c (" + std::to_string(top_c) +
                      ") exceeds num_classes (" + std::to_string(num_classes) +
                      ")");
  }
  if (top_w > vocab_size) {
    throw ConfigError("top_w (" + std::to_string(top_w) +
                      ") exceeds vocab_size (" + std::to_string(vocab_size) +
                      ")");
  }
  if (optimizer != "adamw" && optimizer != "adam" && optimizer != "sgd") {
    throw ConfigError("unknown optimizer '" + optimizer +
                      "' (supported: adamw, adam, sgd)");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be positive and finite");
  }
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
    throw ConfigError("weight_decay must be non-negative and finite");
  }
  if (!(explanation_loss_weight >= 0.0) ||
      !std::isfinite(explanation_loss_weight)) {
    throw ConfigError("explanation_loss_weight must be non-negative");
  }
}

nlohmann::json to_json(const HyperParams& p) {
  return {{"num_classes", p.num_classes},
          {"vocab_size", p.vocab_size},
          {"num_epochs", p.num_epochs},
          {"batch_size", p.batch_size},
          {"height", p.height},
          {"width", p.width},
          {"top_c", p.top_c},
          {"top_w", p.top_w},
          {"optimizer", p.optimizer},
          {"learning_rate", p.learning_rate},
          {"weight_decay", p.weight_decay},
          {"seed", p.seed},
          {"explanation_loss_weight", p.explanation_loss_weight}};
}

HyperParams hyperparams_from_json(const nlohmann::json& j) {
  HyperParams p;
  p.num_classes = j.at("num_classes").get<std::int64_t>();
  p.vocab_size = j.at("vocab_size").get<std::int64_t>();
  p.num_epochs = j.at("num_epochs").get<std::int64_t>();
  p.batch_size = j.at("batch_size").get<std::int64_t>();
  p.height = j.at("height").get<std::int64_t>();
  p.width = j.at("width").get<std::int64_t>();
  p.top_c = j.at("top_c").get<std::int64_t>();
  p.top_w = j.at("top_w").get<std::int64_t>();
  p.optimizer = j.at("optimizer").get<std::string>();
  p.learning_rate = j.at("learning_rate").get<double>();
  p.weight_decay = j.at("weight_decay").get<double>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.explanation_loss_weight = j.value("explanation_loss_weight", 1.0);
  return p;
}

}  // namespace tenet
