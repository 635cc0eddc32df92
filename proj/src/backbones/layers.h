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

// Building blocks shared by the torchvision-compatible backbones. Child
// module names mirror torchvision so state dicts line up key for key.

#ifndef TENET_SRC_BACKBONES_LAYERS_H_
#define TENET_SRC_BACKBONES_LAYERS_H_

#include <torch/torch.h>

#include "tenet/backbone.h"

namespace tenet::backbones {

enum class Activation { kNone, kReLU, kHardswish };

torch::Tensor activate(const torch::Tensor& x, Activation act);

struct ConvNormActOptions {
  std::int64_t in_channels = 0;
  std::int64_t out_channels = 0;
  std::int64_t kernel_size = 3;
  std::int64_t stride = 1;
  std::int64_t groups = 1;
  Activation activation = Activation::kReLU;
  double bn_eps = 1e-5;
  double bn_momentum = 0.1;
};

// Conv2d without bias ("0") followed by BatchNorm2d ("1") and an activation;
// torchvision's Conv2dNormActivation with same-size padding.
class ConvNormActImpl : public torch::nn::Module {
 public:
  explicit ConvNormActImpl(const ConvNormActOptions& options);
  torch::Tensor forward(const torch::Tensor& x);

  torch::nn::Conv2d conv{nullptr};
  torch::nn::BatchNorm2d norm{nullptr};

 private:
  Activation activation_;
};
TORCH_MODULE(ConvNormAct);

// Channel attention: global pool, 1x1 conv "fc1", activation, 1x1 conv
// "fc2", gate.
class SqueezeExcitationImpl : public torch::nn::Module {
 public:
  SqueezeExcitationImpl(std::int64_t channels, std::int64_t squeeze_channels,
                        bool hard_sigmoid_gate);
  torch::Tensor forward(const torch::Tensor& x);

  torch::nn::Conv2d fc1{nullptr};
  torch::nn::Conv2d fc2{nullptr};

 private:
  bool hard_sigmoid_gate_;
};
TORCH_MODULE(SqueezeExcitation);

// LayerNorm over the channel dimension of an NCHW tensor. Owns "weight" and
// "bias" directly, like torchvision's LayerNorm2d.
class LayerNorm2dImpl : public torch::nn::Module {
 public:
  LayerNorm2dImpl(std::int64_t channels, double eps);
  torch::Tensor forward(const torch::Tensor& x);

  torch::Tensor weight;
  torch::Tensor bias;

 private:
  std::int64_t channels_;
  double eps_;
};
TORCH_MODULE(LayerNorm2d);

// Randomly drops whole residual branches per sample while training and
// rescales the survivors; identity in eval mode.
torch::Tensor stochastic_depth(const torch::Tensor& x, double p, bool training);

// Rounds `value` to a multiple of `divisor`, never going below 90% of it.
std::int64_t make_divisible(double value, std::int64_t divisor);

// Common initializations.
void init_conv_kaiming_fan_out(torch::nn::Module& module);
void init_batchnorm_unit(torch::nn::Module& module);

// Factories for the registry.
BackbonePtr make_resnet50();
BackbonePtr make_regnet_y_400mf();
BackbonePtr make_mobilenet_v3_small();
BackbonePtr make_convnext_small();
BackbonePtr make_swin_v2_b();
BackbonePtr make_vit_b_16();
BackbonePtr make_tiny_cnn();

}  // namespace tenet::backbones

#endif  // TENET_SRC_BACKBONES_LAYERS_H_
