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

// Binary cross-entropy objectives for the two heads.

#ifndef TENET_LOSS_H_
#define TENET_LOSS_H_

#include <torch/torch.h>

namespace tenet {

// Mean over all elements of the binary cross entropy between sigmoid(logits)
// and targets, evaluated in the overflow-free form
// max(z, 0) - z * y + log(1 + exp(-|z|)). Throws ShapeError unless the shapes
// match exactly.
torch::Tensor bce_loss(const torch::Tensor& logits, const torch::Tensor& targets);

struct LossParts {
  torch::Tensor total;
  torch::Tensor class_part;
  torch::Tensor word_part;
};

// total = class_part + word_weight * word_part, each part a mean-reduced BCE.
LossParts total_loss(const torch::Tensor& class_logits,
                     const torch::Tensor& class_targets,
                     const torch::Tensor& word_logits,
                     const torch::Tensor& word_targets,
                     double word_weight = 1.0);

}  // namespace tenet

#endif  // TENET_LOSS_H_
