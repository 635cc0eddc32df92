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

// ConvNeXt-Small. The classifier keeps its LayerNorm; only the Linear goes.

#include "backbones/layers.h"

namespace tenet::backbones {
namespace {

namespace nn = torch::nn;

constexpr std::int64_t kDims[] = {96, 192, 384, 768};
constexpr std::int64_t kDepths[] = {3, 3, 27, 3};
constexpr double kStochasticDepth = 0.4;
constexpr double kLayerScale = 1e-6;
constexpr double kNormEps = 1e-6;

class CNBlockImpl : public nn::Module {
 public:
  CNBlockImpl(std::int64_t dim, double stochastic_depth_prob)
      : sd_prob_(stochastic_depth_prob) {
    layer_scale =
        register_parameter("layer_scale", torch::full({dim, 1, 1}, kLayerScale));
    auto block = std::make_shared<nn::Module>();
    dwconv = block->register_module(
        "0", nn::Conv2d(nn::Conv2dOptions(dim, dim, 7).padding(3).groups(dim)));
    norm = block->register_module(
        "2", nn::LayerNorm(nn::LayerNormOptions({dim}).eps(kNormEps)));
    pw1 = block->register_module("3", nn::Linear(dim, 4 * dim));
    pw2 = block->register_module("5", nn::Linear(4 * dim, dim));
    register_module("block", block);
  }

  torch::Tensor forward(const torch::Tensor& x) {
    auto y = dwconv(x).permute({0, 2, 3, 1});
    y = pw2(torch::gelu(pw1(norm(y))));
    y = layer_scale * y.permute({0, 3, 1, 2});
    return stochastic_depth(y, sd_prob_, is_training()) + x;
  }

  torch::Tensor layer_scale;
  nn::Conv2d dwconv{nullptr};
  nn::LayerNorm norm{nullptr};
  nn::Linear pw1{nullptr}, pw2{nullptr};

 private:
  double sd_prob_;
};
TORCH_MODULE(CNBlock);

class ConvNeXtSmallImpl : public BackboneImpl {
 public:
  ConvNeXtSmallImpl() {
    auto features = std::make_shared<nn::Module>();
    auto add = [&](nn::Sequential part) {
      parts.push_back(features->register_module(std::to_string(parts.size()), part));
    };
    add(nn::Sequential(nn::Conv2d(nn::Conv2dOptions(3, kDims[0], 4).stride(4)),
                       LayerNorm2d(kDims[0], kNormEps)));
    std::int64_t total = 0;
    for (auto d : kDepths) total += d;
    std::int64_t block_id = 0;
    for (int s = 0; s < 4; ++s) {
      nn::Sequential stage;
      for (std::int64_t i = 0; i < kDepths[s]; ++i, ++block_id) {
        stage->push_back(CNBlock(
            kDims[s], kStochasticDepth * static_cast<double>(block_id) /
                          static_cast<double>(total - 1)));
      }
      add(stage);
      if (s < 3) {
        add(nn::Sequential(
            LayerNorm2d(kDims[s], kNormEps),
            nn::Conv2d(nn::Conv2dOptions(kDims[s], kDims[s + 1], 2).stride(2))));
      }
    }
    register_module("features", features);
    auto classifier = std::make_shared<nn::Module>();
    head_norm = classifier->register_module("0", LayerNorm2d(kDims[3], kNormEps));
    register_module("classifier", classifier);

    torch::NoGradGuard no_grad;
    for (auto& m : modules(/*include_self=*/false)) {
      if (auto* c = m->as<nn::Conv2d>()) {
        c->weight.normal_(0.0, 0.02);
        if (c->bias.defined()) c->bias.zero_();
      } else if (auto* l = m->as<nn::Linear>()) {
        l->weight.normal_(0.0, 0.02);
        l->bias.zero_();
      }
    }
  }

  torch::Tensor forward(torch::Tensor x) override {
    for (auto& part : parts) x = part->forward(x);
    x = torch::adaptive_avg_pool2d(x, {1, 1});
    return head_norm(x).flatten(1);
  }

 private:
  std::vector<nn::Sequential> parts;
  LayerNorm2d head_norm{nullptr};
};

}  // namespace

BackbonePtr make_convnext_small() {
  return std::make_shared<ConvNeXtSmallImpl>();
}

}  // namespace tenet::backbones
