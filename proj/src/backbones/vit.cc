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

// ViT-B/16. Features are the final class token. Position embeddings are
// stored for a 224x224 input (14x14 patches); other input sizes get them
// bicubically resampled to the actual patch grid on the fly.

#include <cmath>

#include "backbones/layers.h"

namespace tenet::backbones {
namespace {

namespace nn = torch::nn;
namespace F = torch::nn::functional;

constexpr std::int64_t kPatch = 16;
constexpr std::int64_t kReferenceImage = 224;
constexpr std::int64_t kHidden = 768;
constexpr std::int64_t kMlp = 3072;
constexpr std::int64_t kHeads = 12;
constexpr std::int64_t kLayers = 12;
constexpr double kNormEps = 1e-6;

class SelfAttentionImpl : public nn::Module {
 public:
  SelfAttentionImpl() {
    in_proj_weight =
        register_parameter("in_proj_weight", torch::empty({3 * kHidden, kHidden}));
    in_proj_bias = register_parameter("in_proj_bias", torch::zeros({3 * kHidden}));
    out_proj = register_module("out_proj", nn::Linear(kHidden, kHidden));
    torch::NoGradGuard no_grad;
    nn::init::xavier_uniform_(in_proj_weight);
    out_proj->bias.zero_();
  }

  // x: (B, N, D)
  torch::Tensor forward(const torch::Tensor& x) {
    const auto batch = x.size(0);
    const auto tokens = x.size(1);
    const auto head_dim = kHidden / kHeads;
    auto qkv = F::linear(x, in_proj_weight, in_proj_bias)
                   .view({batch, tokens, 3, kHeads, head_dim})
                   .permute({2, 0, 3, 1, 4});
    auto q = qkv[0] / std::sqrt(static_cast<double>(head_dim));
    auto attn = torch::softmax(q.matmul(qkv[1].transpose(-2, -1)), -1);
    auto out = attn.matmul(qkv[2]).transpose(1, 2).reshape({batch, tokens, kHidden});
    return out_proj(out);
  }

  torch::Tensor in_proj_weight;
  torch::Tensor in_proj_bias;
  nn::Linear out_proj{nullptr};
};
TORCH_MODULE(SelfAttention);

class EncoderBlockImpl : public nn::Module {
 public:
  EncoderBlockImpl() {
    ln_1 = register_module("ln_1", nn::LayerNorm(nn::LayerNormOptions({kHidden}).eps(kNormEps)));
    self_attention = register_module("self_attention", SelfAttention());
    ln_2 = register_module("ln_2", nn::LayerNorm(nn::LayerNormOptions({kHidden}).eps(kNormEps)));
    auto mlp = std::make_shared<nn::Module>();
    fc1 = mlp->register_module("0", nn::Linear(kHidden, kMlp));
    fc2 = mlp->register_module("3", nn::Linear(kMlp, kHidden));
    register_module("mlp", mlp);
    torch::NoGradGuard no_grad;
    for (auto* l : {&fc1, &fc2}) {
      nn::init::xavier_uniform_((*l)->weight);
      (*l)->bias.normal_(0.0, 1e-6);
    }
  }

  torch::Tensor forward(const torch::Tensor& input) {
    auto x = self_attention(ln_1(input)) + input;
    return x + fc2(torch::gelu(fc1(ln_2(x))));
  }

  nn::LayerNorm ln_1{nullptr}, ln_2{nullptr};
  SelfAttention self_attention{nullptr};
  nn::Linear fc1{nullptr}, fc2{nullptr};
};
TORCH_MODULE(EncoderBlock);

class ViTB16Impl : public BackboneImpl {
 public:
  ViTB16Impl() {
    conv_proj = register_module(
        "conv_proj", nn::Conv2d(nn::Conv2dOptions(3, kHidden, kPatch).stride(kPatch)));
    class_token = register_parameter("class_token", torch::zeros({1, 1, kHidden}));
    auto encoder = std::make_shared<nn::Module>();
    const auto grid = kReferenceImage / kPatch;
    pos_embedding = encoder->register_parameter(
        "pos_embedding", torch::empty({1, grid * grid + 1, kHidden}).normal_(0.0, 0.02));
    auto layers = std::make_shared<nn::Module>();
    for (std::int64_t i = 0; i < kLayers; ++i) {
      blocks.push_back(layers->register_module(
          "encoder_layer_" + std::to_string(i), EncoderBlock()));
    }
    encoder->register_module("layers", layers);
    ln = encoder->register_module("ln", nn::LayerNorm(nn::LayerNormOptions({kHidden}).eps(kNormEps)));
    register_module("encoder", encoder);

    torch::NoGradGuard no_grad;
    const double fan_in = 3.0 * kPatch * kPatch;
    conv_proj->weight.normal_(0.0, std::sqrt(1.0 / fan_in));
    conv_proj->bias.zero_();
  }

  torch::Tensor forward(torch::Tensor x) override {
    const auto batch = x.size(0);
    x = conv_proj(x);  // (B, D, gh, gw)
    const auto gh = x.size(2);
    const auto gw = x.size(3);
    x = x.flatten(2).transpose(1, 2);
    x = torch::cat({class_token.expand({batch, -1, -1}), x}, 1);
    x = x + position_embedding(gh, gw);
    for (auto& block : blocks) x = block(x);
    return ln(x).select(1, 0);
  }

 private:
  torch::Tensor position_embedding(std::int64_t gh, std::int64_t gw) const {
    const auto stored = kReferenceImage / kPatch;
    if (gh == stored && gw == stored) return pos_embedding;
    auto cls = pos_embedding.narrow(1, 0, 1);
    auto grid = pos_embedding.narrow(1, 1, stored * stored)
                    .reshape({1, stored, stored, kHidden})
                    .permute({0, 3, 1, 2});
    grid = F::interpolate(grid, F::InterpolateFuncOptions()
                                    .size(std::vector<std::int64_t>{gh, gw})
                                    .mode(torch::kBicubic)
                                    .align_corners(true));
    grid = grid.permute({0, 2, 3, 1}).reshape({1, gh * gw, kHidden});
    return torch::cat({cls, grid}, 1);
  }

  nn::Conv2d conv_proj{nullptr};
  torch::Tensor class_token;
  torch::Tensor pos_embedding;
  std::vector<EncoderBlock> blocks;
  nn::LayerNorm ln{nullptr};
};

}  // namespace

BackbonePtr make_vit_b_16() { return std::make_shared<ViTB16Impl>(); }

}  // namespace tenet::backbones
