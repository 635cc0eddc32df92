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

// MobileNetV3-Small. Only the last classifier Linear is dropped, so features
// are the 1024-wide hidden layer of the classifier.

#include "backbones/layers.h"

namespace tenet::backbones {
namespace {

namespace nn = torch::nn;

constexpr double kBnEps = 1e-3;
constexpr double kBnMomentum = 0.01;

struct BlockConfig {
  std::int64_t input_channels;
  std::int64_t kernel;
  std::int64_t expanded_channels;
  std::int64_t out_channels;
  bool use_se;
  bool use_hardswish;
  std::int64_t stride;
};

constexpr BlockConfig kSmallSetting[] = {
    {16, 3, 16, 16, true, false, 2},   {16, 3, 72, 24, false, false, 2},
    {24, 3, 88, 24, false, false, 1},  {24, 5, 96, 40, true, true, 2},
    {40, 5, 240, 40, true, true, 1},   {40, 5, 240, 40, true, true, 1},
    {40, 5, 120, 48, true, true, 1},   {48, 5, 144, 48, true, true, 1},
    {48, 5, 288, 96, true, true, 2},   {96, 5, 576, 96, true, true, 1},
    {96, 5, 576, 96, true, true, 1},
};

ConvNormAct conv_bn(std::int64_t in, std::int64_t out, std::int64_t k,
                    std::int64_t stride, std::int64_t groups, Activation act) {
  return ConvNormAct(
      ConvNormActOptions{in, out, k, stride, groups, act, kBnEps, kBnMomentum});
}

class InvertedResidualImpl : public nn::Module {
 public:
  explicit InvertedResidualImpl(const BlockConfig& cfg)
      : use_residual_(cfg.stride == 1 &&
                      cfg.input_channels == cfg.out_channels) {
    const auto act =
        cfg.use_hardswish ? Activation::kHardswish : Activation::kReLU;
    block = register_module("block", nn::Sequential());
    if (cfg.expanded_channels != cfg.input_channels) {
      block->push_back(conv_bn(cfg.input_channels, cfg.expanded_channels, 1,
                               1, 1, act));
    }
    block->push_back(conv_bn(cfg.expanded_channels, cfg.expanded_channels,
                             cfg.kernel, cfg.stride, cfg.expanded_channels,
                             act));
    if (cfg.use_se) {
      block->push_back(SqueezeExcitation(
          cfg.expanded_channels, make_divisible(cfg.expanded_channels / 4, 8),
          /*hard_sigmoid_gate=*/true));
    }
    block->push_back(conv_bn(cfg.expanded_channels, cfg.out_channels, 1, 1, 1,
                             Activation::kNone));
  }

  torch::Tensor forward(const torch::Tensor& x) {
    auto out = block->forward(x);
    return use_residual_ ? out + x : out;
  }

  nn::Sequential block{nullptr};

 private:
  bool use_residual_;
};
TORCH_MODULE(InvertedResidual);

class MobileNetV3SmallImpl : public BackboneImpl {
 public:
  MobileNetV3SmallImpl() {
    features = register_module("features", nn::Sequential());
    features->push_back(conv_bn(3, 16, 3, 2, 1, Activation::kHardswish));
    for (const auto& cfg : kSmallSetting) {
      features->push_back(InvertedResidual(cfg));
    }
    features->push_back(conv_bn(96, 576, 1, 1, 1, Activation::kHardswish));

    auto classifier = std::make_shared<nn::Module>();
    hidden = classifier->register_module("0", nn::Linear(576, 1024));
    dropout = classifier->register_module(
        "2", nn::Dropout(nn::DropoutOptions(0.2)));
    register_module("classifier", classifier);

    init_conv_kaiming_fan_out(*this);
    init_batchnorm_unit(*this);
    torch::NoGradGuard no_grad;
    torch::nn::init::normal_(hidden->weight, 0.0, 0.01);
    hidden->bias.zero_();
  }

  torch::Tensor forward(torch::Tensor x) override {
    x = features->forward(x);
    x = torch::adaptive_avg_pool2d(x, {1, 1}).flatten(1);
    return dropout(torch::hardswish(hidden(x)));
  }

 private:
  nn::Sequential features{nullptr};
  nn::Linear hidden{nullptr};
  nn::Dropout dropout{nullptr};
};

}  // namespace

BackbonePtr make_mobilenet_v3_small() {
  return std::make_shared<MobileNetV3SmallImpl>();
}

}  // namespace tenet::backbones
