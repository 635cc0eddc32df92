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

#include "backbones/layers.h"

#include <algorithm>

namespace tenet::backbones {

namespace F = torch::nn::functional;

torch::Tensor activate(const torch::Tensor& x, Activation act) {
  switch (act) {
    case Activation::kReLU:
      return torch::relu(x);
    case Activation::kHardswish:
      return torch::hardswish(x);
    case Activation::kNone:
      break;
  }
  return x;
}

ConvNormActImpl::ConvNormActImpl(const ConvNormActOptions& o)
    : activation_(o.activation) {
  conv = register_module(
      "0", torch::nn::Conv2d(
               torch::nn::Conv2dOptions(o.in_channels, o.out_channels,
                                        o.kernel_size)
                   .stride(o.stride)
                   .padding((o.kernel_size - 1) / 2)
                   .groups(o.groups)
                   .bias(false)));
  norm = register_module(
      "1", torch::nn::BatchNorm2d(torch::nn::BatchNorm2dOptions(o.out_channels)
                                      .eps(o.bn_eps)
                                      .momentum(o.bn_momentum)));
}

torch::Tensor ConvNormActImpl::forward(const torch::Tensor& x) {
  return activate(norm(conv(x)), activation_);
}

SqueezeExcitationImpl::SqueezeExcitationImpl(std::int64_t channels,
                                             std::int64_t squeeze_channels,
                                             bool hard_sigmoid_gate)
    : hard_sigmoid_gate_(hard_sigmoid_gate) {
  fc1 = register_module("fc1", torch::nn::Conv2d(torch::nn::Conv2dOptions(
                                   channels, squeeze_channels, 1)));
  fc2 = register_module("fc2", torch::nn::Conv2d(torch::nn::Conv2dOptions(
                                   squeeze_channels, channels, 1)));
}

torch::Tensor SqueezeExcitationImpl::forward(const torch::Tensor& x) {
  auto scale = F::adaptive_avg_pool2d(x, F::AdaptiveAvgPool2dFuncOptions(1));
  scale = fc2(torch::relu(fc1(scale)));
  scale = hard_sigmoid_gate_ ? torch::hardsigmoid(scale) : torch::sigmoid(scale);
  return x * scale;
}

LayerNorm2dImpl::LayerNorm2dImpl(std::int64_t channels, double eps)
    : channels_(channels), eps_(eps) {
  weight = register_parameter("weight", torch::ones({channels}));
  bias = register_parameter("bias", torch::zeros({channels}));
}

torch::Tensor LayerNorm2dImpl::forward(const torch::Tensor& x) {
  auto nhwc = x.permute({0, 2, 3, 1});
  nhwc = torch::layer_norm(nhwc, {channels_}, weight, bias, eps_);
  return nhwc.permute({0, 3, 1, 2});
}

torch::Tensor stochastic_depth(const torch::Tensor& x, double p,
                               bool training) {
  if (!training || p <= 0.0) return x;
  const double survival = 1.0 - p;
  std::vector<std::int64_t> shape(x.dim(), 1);
  shape[0] = x.size(0);
  auto noise = torch::empty(shape, x.options()).bernoulli_(survival);
  if (survival > 0.0) noise.div_(survival);
  return x * noise;
}

std::int64_t make_divisible(double value, std::int64_t divisor) {
  auto rounded = std::max<std::int64_t>(
      divisor, static_cast<std::int64_t>(value + divisor / 2.0) / divisor *
                   divisor);
  if (static_cast<double>(rounded) < 0.9 * value) rounded += divisor;
  return rounded;
}

void init_conv_kaiming_fan_out(torch::nn::Module& module) {
  torch::NoGradGuard no_grad;
  for (auto& m : module.modules(/*include_self=*/false)) {
    if (auto* conv = m->as<torch::nn::Conv2d>()) {
      torch::nn::init::kaiming_normal_(conv->weight, 0.0, torch::kFanOut,
                                       torch::kReLU);
      if (conv->bias.defined()) conv->bias.zero_();
    }
  }
}

void init_batchnorm_unit(torch::nn::Module& module) {
  torch::NoGradGuard no_grad;
  for (auto& m : module.modules(/*include_self=*/false)) {
    if (auto* bn = m->as<torch::nn::BatchNorm2d>()) {
      bn->weight.fill_(1.0);
      bn->bias.zero_();
    }
  }
}

}  // namespace tenet::backbones
