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

// Small convolutional feature extractor for desk-scale runs and tests.

#include "backbones/layers.h"

namespace tenet::backbones {
namespace {

namespace nn = torch::nn;

constexpr std::int64_t kWidths[] = {16, 32, 64};

class TinyCnnImpl : public BackboneImpl {
 public:
  TinyCnnImpl() {
    std::int64_t in = 3;
    for (std::size_t i = 0; i < std::size(kWidths); ++i) {
      convs.push_back(register_module(
          "conv" + std::to_string(i + 1),
          nn::Conv2d(nn::Conv2dOptions(in, kWidths[i], 3).padding(1))));
      in = kWidths[i];
    }
  }

  torch::Tensor forward(torch::Tensor x) override {
    for (std::size_t i = 0; i < convs.size(); ++i) {
      x = torch::relu(convs[i](x));
      if (i + 1 < convs.size()) x = torch::max_pool2d(x, 2);
    }
    return torch::adaptive_avg_pool2d(x, {1, 1}).flatten(1);
  }

 private:
  std::vector<nn::Conv2d> convs;
};

}  // namespace

BackbonePtr make_tiny_cnn() { return std::make_shared<TinyCnnImpl>(); }

}  // namespace tenet::backbones
