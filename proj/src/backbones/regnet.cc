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

// RegNetY-400MF: depth 16, w0 48, wa 27.89, wm 2.09, group width 8,
// squeeze-excitation ratio 0.25. The quantized stage layout is fixed below.

#include <cmath>

#include "backbones/layers.h"

namespace tenet::backbones {
namespace {

namespace nn = torch::nn;

constexpr std::int64_t kStemWidth = 32;
constexpr std::int64_t kDepths[] = {1, 3, 6, 6};
constexpr std::int64_t kWidths[] = {48, 104, 208, 440};
constexpr std::int64_t kGroupWidth = 8;
constexpr double kSeRatio = 0.25;

class ResBottleneckBlockImpl : public nn::Module {
 public:
  ResBottleneckBlockImpl(std::int64_t width_in, std::int64_t width_out,
                         std::int64_t stride) {
    if (width_in != width_out || stride != 1) {
      proj = register_module(
          "proj", ConvNormAct(ConvNormActOptions{width_in, width_out, 1, stride,
                                                 1, Activation::kNone}));
    }
    // Bottleneck multiplier is 1, so the inner width equals width_out.
    const std::int64_t inner = width_out;
    auto f = std::make_shared<nn::Module>();
    a = f->register_module(
        "a", ConvNormAct(ConvNormActOptions{width_in, inner, 1, 1, 1,
                                            Activation::kReLU}));
    b = f->register_module(
        "b", ConvNormAct(ConvNormActOptions{inner, inner, 3, stride,
                                            inner / kGroupWidth,
                                            Activation::kReLU}));
    se = f->register_module(
        "se", SqueezeExcitation(
                  inner, static_cast<std::int64_t>(std::round(kSeRatio * width_in)),
                  /*hard_sigmoid_gate=*/false));
    c = f->register_module(
        "c", ConvNormAct(ConvNormActOptions{inner, width_out, 1, 1, 1,
                                            Activation::kNone}));
    register_module("f", f);
  }

  torch::Tensor forward(const torch::Tensor& x) {
    auto branch = c(se(b(a(x))));
    auto shortcut = proj.is_empty() ? x : proj(x);
    return torch::relu(shortcut + branch);
  }

  ConvNormAct proj{nullptr};
  ConvNormAct a{nullptr}, b{nullptr}, c{nullptr};
  SqueezeExcitation se{nullptr};
};
TORCH_MODULE(ResBottleneckBlock);

class RegNetY400MFImpl : public BackboneImpl {
 public:
  RegNetY400MFImpl() {
    stem = register_module(
        "stem", ConvNormAct(ConvNormActOptions{3, kStemWidth, 3, 2, 1,
                                               Activation::kReLU}));
    auto trunk = std::make_shared<nn::Module>();
    std::int64_t width = kStemWidth;
    for (int s = 0; s < 4; ++s) {
      auto stage = std::make_shared<nn::Module>();
      const auto stage_name = "block" + std::to_string(s + 1);
      for (std::int64_t i = 0; i < kDepths[s]; ++i) {
        auto block = stage->register_module(
            stage_name + "-" + std::to_string(i),
            ResBottleneckBlock(i == 0 ? width : kWidths[s], kWidths[s],
                               i == 0 ? 2 : 1));
        blocks.push_back(block);
      }
      trunk->register_module(stage_name, stage);
      width = kWidths[s];
    }
    register_module("trunk_output", trunk);

    init_conv_kaiming_fan_out(*this);
    init_batchnorm_unit(*this);
  }

  torch::Tensor forward(torch::Tensor x) override {
    x = stem(x);
    for (auto& block : blocks) x = block(x);
    return torch::adaptive_avg_pool2d(x, {1, 1}).flatten(1);
  }

 private:
  ConvNormAct stem{nullptr};
  std::vector<ResBottleneckBlock> blocks;
};

}  // namespace

BackbonePtr make_regnet_y_400mf() {
  return std::make_shared<RegNetY400MFImpl>();
}

}  // namespace tenet::backbones
