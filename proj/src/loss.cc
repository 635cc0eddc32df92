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

#include "tenet/loss.h"

#include <sstream>

#include "tenet/error.h"

namespace tenet {

torch::Tensor bce_loss(const torch::Tensor& logits,
                       const torch::Tensor& targets) {
  if (logits.sizes() != targets.sizes()) {
    std::ostringstream msg;
    msg << "bce_loss: logits " << logits.sizes() << " and targets "
        << targets.sizes() << " differ in shape";
    throw ShapeError(msg.str());
  }
  return torch::nn::functional::binary_cross_entropy_with_logits(
      logits, targets.to(logits.dtype()));
}

LossParts total_loss(const torch::Tensor& class_logits,
                     const torch::Tensor& class_targets,
                     const torch::Tensor& word_logits,
                     const torch::Tensor& word_targets, double word_weight) {
  LossParts parts;
  parts.class_part = bce_loss(class_logits, class_targets);
  parts.word_part = bce_loss(word_logits, word_targets);
  parts.total = word_weight == 1.0 ? parts.class_part + parts.word_part
                                   : parts.class_part + word_weight * parts.word_part;
  return parts;
}

}  // namespace tenet
