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

// ResNet-50 (v1.5: stride on the 3x3 convolution), fc removed.

#include "backbones/layers.h"

namespace tenet::backbones {
namespace {

namespace nn = torch::nn;

nn::Conv2d conv(std::int64_t in, std::int64_t out, std::int64_t k,
                std::int64_t stride = 1) {
  return nn::Conv2d(nn::Conv2dOptions(in, out, k)
                        .stride(stride)
                        .padding((k - 1) / 2)
                        .bias(false));
}

class BottleneckImpl : public nn::Module {
 public:
  static constexpr std::int64_t kExpansion = 4;

  BottleneckImpl(std::int64_t inplanes, std::int64_t planes,
                 std::int64_t stride) {
    conv1 = register_module("conv1", conv(inplanes, planes, 1));
    bn1 = register_module("bn1", nn::BatchNorm2d(planes));
    conv2 = register_module("conv2", conv(planes, planes, 3, stride));
    bn2 = register_module("bn2", nn::BatchNorm2d(planes));
    conv3 = register_module("conv3", conv(planes, planes * kExpansion, 1));
    bn3 = register_module("bn3", nn::BatchNorm2d(planes * kExpansion));
    if (stride != 1 || inplanes != planes * kExpansion) {
      downsample = register_module(
          "downsample",
          nn::Sequential(conv(inplanes, planes * kExpansion, 1, stride),
                         nn::BatchNorm2d(planes * kExpansion)));
    }
  }

  torch::Tensor forward(const torch::Tensor& x) {
    auto out = torch::relu(bn1(conv1(x)));
    out = torch::relu(bn2(conv2(out)));
    out = bn3(conv3(out));
    auto identity = downsample.is_empty() ? x : downsample->forward(x);
    return torch::relu(out + identity);
  }

  nn::Conv2d conv1{nullptr}, conv2{nullptr}, conv3{nullptr};
  nn::BatchNorm2d bn1{nullptr}, bn2{nullptr}, bn3{nullptr};
  nn::Sequential downsample{nullptr};
};
TORCH_MODULE(Bottleneck);

class ResNet50Impl : public BackboneImpl {
 public:
  ResNet50Impl() {
    conv1 = register_module(
        "conv1", nn::Conv2d(nn::Conv2dOptions(3, 64, 7).stride(2).padding(3).bias(false)));
    bn1 = register_module("bn1", nn::BatchNorm2d(64));
    const std::int64_t blocks[] = {3, 4, 6, 3};
    const std::int64_t planes[] = {64, 128, 256, 512};
    std::int64_t inplanes = 64;
    for (int s = 0; s < 4; ++s) {
      nn::Sequential stage;
      for (std::int64_t b = 0; b < blocks[s]; ++b) {
        const std::int64_t stride = (s > 0 && b == 0) ? 2 : 1;
        stage->push_back(Bottleneck(inplanes, planes[s], stride));
        inplanes = planes[s] * BottleneckImpl::kExpansion;
      }
      layers.push_back(register_module("layer" + std::to_string(s + 1), stage));
    }
    init_conv_kaiming_fan_out(*this);
    init_batchnorm_unit(*this);
  }

  torch::Tensor forward(torch::Tensor x) override {
    x = torch::relu(bn1(conv1(x)));
    x = torch::max_pool2d(x, 3, 2, 1);
    for (auto& stage : layers) x = stage->forward(x);
    return torch::adaptive_avg_pool2d(x, {1, 1}).flatten(1);
  }

 private:
  nn::Conv2d conv1{nullptr};
  nn::BatchNorm2d bn1{nullptr};
  std::vector<nn::Sequential> layers;
};

}  // namespace

BackbonePtr make_resnet50() { return std::make_shared<ResNet50Impl>(); }

}  // namespace tenet::backbones
