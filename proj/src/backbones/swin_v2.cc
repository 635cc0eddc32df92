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

// Swin Transformer V2-B: shifted-window cosine attention with a continuous
// (MLP generated) relative position bias and post-norm residual blocks.
// Feature maps are kept channels-last (B, H, W, C) between stages.

#include <cmath>

#include "backbones/layers.h"

namespace tenet::backbones {
namespace {

namespace nn = torch::nn;
namespace F = torch::nn::functional;

constexpr std::int64_t kPatch = 4;
constexpr std::int64_t kEmbed = 128;
constexpr std::int64_t kDepths[] = {2, 2, 18, 2};
constexpr std::int64_t kHeads[] = {4, 8, 16, 32};
constexpr std::int64_t kWindow = 8;
constexpr double kStochasticDepth = 0.5;
constexpr double kNormEps = 1e-5;

nn::LayerNorm layer_norm(std::int64_t dim) {
  return nn::LayerNorm(nn::LayerNormOptions({dim}).eps(kNormEps));
}

class WindowAttentionImpl : public nn::Module {
 public:
  WindowAttentionImpl(std::int64_t dim, std::int64_t num_heads,
                      std::int64_t shift)
      : dim_(dim), num_heads_(num_heads), shift_(shift) {
    qkv = register_module("qkv", nn::Linear(dim, dim * 3));
    proj = register_module("proj", nn::Linear(dim, dim));
    logit_scale = register_parameter(
        "logit_scale", torch::log(10 * torch::ones({num_heads, 1, 1})));
    auto cpb = std::make_shared<nn::Module>();
    cpb_fc1 = cpb->register_module("0", nn::Linear(2, 512));
    cpb_fc2 = cpb->register_module(
        "2", nn::Linear(nn::LinearOptions(512, num_heads).bias(false)));
    register_module("cpb_mlp", cpb);

    // Log-spaced relative offsets in [-8, 8] for the bias MLP.
    auto range = torch::arange(-(kWindow - 1), kWindow, torch::kFloat32);
    auto grid = torch::meshgrid({range, range}, "ij");
    auto table = torch::stack({grid[0], grid[1]}).permute({1, 2, 0}).unsqueeze(0);
    table = table / static_cast<double>(kWindow - 1) * 8.0;
    table = torch::sign(table) * torch::log2(torch::abs(table) + 1.0) / 3.0;
    relative_coords_table = register_buffer("relative_coords_table", table.contiguous());

    auto coords = torch::arange(kWindow);
    auto mesh = torch::meshgrid({coords, coords}, "ij");
    auto flat = torch::stack({mesh[0], mesh[1]}).flatten(1);  // 2, N
    auto rel = (flat.unsqueeze(2) - flat.unsqueeze(1)).permute({1, 2, 0}).contiguous();
    rel.select(2, 0).add_(kWindow - 1).mul_(2 * kWindow - 1);
    rel.select(2, 1).add_(kWindow - 1);
    relative_position_index =
        register_buffer("relative_position_index", rel.sum(-1).flatten());
  }

  torch::Tensor position_bias() {
    auto table = cpb_fc2(torch::relu(cpb_fc1(relative_coords_table)))
                     .view({-1, num_heads_});
    const auto n = kWindow * kWindow;
    auto bias = table.index_select(0, relative_position_index)
                    .view({n, n, -1})
                    .permute({2, 0, 1})
                    .contiguous()
                    .unsqueeze(0);
    return 16 * torch::sigmoid(bias);
  }

  // x: (B, H, W, C)
  torch::Tensor forward(const torch::Tensor& input) {
    const auto B = input.size(0);
    const auto H = input.size(1);
    const auto W = input.size(2);
    const auto C = input.size(3);
    const auto pad_r = (kWindow - W % kWindow) % kWindow;
    const auto pad_b = (kWindow - H % kWindow) % kWindow;
    auto x = F::pad(input, F::PadFuncOptions({0, 0, 0, pad_r, 0, pad_b}));
    const auto pad_h = x.size(1);
    const auto pad_w = x.size(2);

    std::int64_t shift_h = kWindow >= pad_h ? 0 : shift_;
    std::int64_t shift_w = kWindow >= pad_w ? 0 : shift_;
    const bool shifted = shift_h + shift_w > 0;
    if (shifted) x = torch::roll(x, {-shift_h, -shift_w}, {1, 2});

    const auto nh = pad_h / kWindow;
    const auto nw = pad_w / kWindow;
    const auto num_windows = nh * nw;
    const auto n = kWindow * kWindow;
    x = x.view({B, nh, kWindow, nw, kWindow, C})
            .permute({0, 1, 3, 2, 4, 5})
            .reshape({B * num_windows, n, C});

    // The key bias is held at zero.
    auto bias = qkv->bias.clone();
    bias.narrow(0, dim_, dim_).zero_();
    auto qkv_out = F::linear(x, qkv->weight, bias)
                       .reshape({x.size(0), n, 3, num_heads_, C / num_heads_})
                       .permute({2, 0, 3, 1, 4});
    auto q = F::normalize(qkv_out[0], F::NormalizeFuncOptions().dim(-1));
    auto k = F::normalize(qkv_out[1], F::NormalizeFuncOptions().dim(-1));
    auto attn = q.matmul(k.transpose(-2, -1));
    attn = attn * torch::clamp(logit_scale, c10::nullopt, std::log(100.0)).exp();
    attn = attn + position_bias();

    if (shifted) {
      auto mask = shift_mask(pad_h, pad_w, shift_h, shift_w, x.options());
      attn = attn.view({B, num_windows, num_heads_, n, n}) +
             mask.unsqueeze(1).unsqueeze(0);
      attn = attn.view({-1, num_heads_, n, n});
    }
    attn = torch::softmax(attn, -1);
    x = attn.matmul(qkv_out[2]).transpose(1, 2).reshape({x.size(0), n, C});
    x = proj(x);

    x = x.view({B, nh, nw, kWindow, kWindow, C})
            .permute({0, 1, 3, 2, 4, 5})
            .reshape({B, pad_h, pad_w, C});
    if (shifted) x = torch::roll(x, {shift_h, shift_w}, {1, 2});
    return x.narrow(1, 0, H).narrow(2, 0, W).contiguous();
  }

  nn::Linear qkv{nullptr}, proj{nullptr};
  nn::Linear cpb_fc1{nullptr}, cpb_fc2{nullptr};
  torch::Tensor logit_scale;
  torch::Tensor relative_coords_table;
  torch::Tensor relative_position_index;

 private:
  // -100 between tokens that came from different regions before the roll.
  static torch::Tensor shift_mask(std::int64_t pad_h, std::int64_t pad_w,
                                  std::int64_t shift_h, std::int64_t shift_w,
                                  const torch::TensorOptions& options) {
    auto regions = torch::zeros({pad_h, pad_w}, options);
    const std::int64_t h_bounds[] = {0, pad_h - kWindow, pad_h - shift_h, pad_h};
    const std::int64_t w_bounds[] = {0, pad_w - kWindow, pad_w - shift_w, pad_w};
    double label = 0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const auto h_len = h_bounds[i + 1] - h_bounds[i];
        const auto w_len = w_bounds[j + 1] - w_bounds[j];
        if (h_len > 0 && w_len > 0) {
          regions.narrow(0, h_bounds[i], h_len)
              .narrow(1, w_bounds[j], w_len)
              .fill_(label);
        }
        label += 1;
      }
    }
    const auto n = kWindow * kWindow;
    regions = regions.view({pad_h / kWindow, kWindow, pad_w / kWindow, kWindow})
                  .permute({0, 2, 1, 3})
                  .reshape({-1, n});
    auto diff = regions.unsqueeze(1) - regions.unsqueeze(2);
    return torch::where(diff != 0, torch::full_like(diff, -100.0),
                        torch::zeros_like(diff));
  }

  std::int64_t dim_;
  std::int64_t num_heads_;
  std::int64_t shift_;
};
TORCH_MODULE(WindowAttention);

class SwinBlockImpl : public nn::Module {
 public:
  SwinBlockImpl(std::int64_t dim, std::int64_t num_heads, std::int64_t shift,
                double sd_prob)
      : sd_prob_(sd_prob) {
    norm1 = register_module("norm1", layer_norm(dim));
    attn = register_module("attn", WindowAttention(dim, num_heads, shift));
    norm2 = register_module("norm2", layer_norm(dim));
    auto mlp = std::make_shared<nn::Module>();
    fc1 = mlp->register_module("0", nn::Linear(dim, 4 * dim));
    fc2 = mlp->register_module("3", nn::Linear(4 * dim, dim));
    register_module("mlp", mlp);
  }

  torch::Tensor forward(const torch::Tensor& input) {
    auto x = input +
             stochastic_depth(norm1(attn(input)), sd_prob_, is_training());
    return x + stochastic_depth(norm2(fc2(torch::gelu(fc1(x)))), sd_prob_,
                                is_training());
  }

  nn::LayerNorm norm1{nullptr}, norm2{nullptr};
  WindowAttention attn{nullptr};
  nn::Linear fc1{nullptr}, fc2{nullptr};

 private:
  double sd_prob_;
};
TORCH_MODULE(SwinBlock);

class PatchMergingImpl : public nn::Module {
 public:
  explicit PatchMergingImpl(std::int64_t dim) {
    reduction = register_module(
        "reduction", nn::Linear(nn::LinearOptions(4 * dim, 2 * dim).bias(false)));
    norm = register_module("norm", layer_norm(2 * dim));
  }

  torch::Tensor forward(const torch::Tensor& input) {
    const auto H = input.size(-3);
    const auto W = input.size(-2);
    auto x = F::pad(input, F::PadFuncOptions({0, 0, 0, W % 2, 0, H % 2}));
    using torch::indexing::Slice;
    auto x0 = x.index({"...", Slice(0, c10::nullopt, 2), Slice(0, c10::nullopt, 2), Slice()});
    auto x1 = x.index({"...", Slice(1, c10::nullopt, 2), Slice(0, c10::nullopt, 2), Slice()});
    auto x2 = x.index({"...", Slice(0, c10::nullopt, 2), Slice(1, c10::nullopt, 2), Slice()});
    auto x3 = x.index({"...", Slice(1, c10::nullopt, 2), Slice(1, c10::nullopt, 2), Slice()});
    return norm(reduction(torch::cat({x0, x1, x2, x3}, -1)));
  }

  nn::Linear reduction{nullptr};
  nn::LayerNorm norm{nullptr};
};
TORCH_MODULE(PatchMerging);

class SwinV2BImpl : public BackboneImpl {
 public:
  SwinV2BImpl() {
    auto features = std::make_shared<nn::Module>();
    auto patch_embed = std::make_shared<nn::Module>();
    patch_conv = patch_embed->register_module(
        "0", nn::Conv2d(nn::Conv2dOptions(3, kEmbed, kPatch).stride(kPatch)));
    patch_norm = patch_embed->register_module("2", layer_norm(kEmbed));
    features->register_module("0", patch_embed);

    std::int64_t total = 0;
    for (auto d : kDepths) total += d;
    std::int64_t block_id = 0;
    std::int64_t index = 1;
    for (int s = 0; s < 4; ++s) {
      const auto dim = kEmbed << s;
      nn::Sequential stage;
      for (std::int64_t i = 0; i < kDepths[s]; ++i, ++block_id) {
        stage->push_back(SwinBlock(
            dim, kHeads[s], i % 2 == 0 ? 0 : kWindow / 2,
            kStochasticDepth * static_cast<double>(block_id) /
                static_cast<double>(total - 1)));
      }
      stages.push_back(features->register_module(std::to_string(index++), stage));
      if (s < 3) {
        merges.push_back(
            features->register_module(std::to_string(index++), PatchMerging(dim)));
      }
    }
    register_module("features", features);
    norm = register_module("norm", layer_norm(kEmbed << 3));

    torch::NoGradGuard no_grad;
    for (auto& m : modules(/*include_self=*/false)) {
      if (auto* l = m->as<nn::Linear>()) {
        l->weight.normal_(0.0, 0.02);
        if (l->bias.defined()) l->bias.zero_();
      }
    }
  }

  torch::Tensor forward(torch::Tensor x) override {
    x = patch_norm(patch_conv(x).permute({0, 2, 3, 1}));
    for (std::size_t s = 0; s < stages.size(); ++s) {
      x = stages[s]->forward(x);
      if (s < merges.size()) x = merges[s](x);
    }
    x = norm(x).permute({0, 3, 1, 2});
    return torch::adaptive_avg_pool2d(x, {1, 1}).flatten(1);
  }

 private:
  nn::Conv2d patch_conv{nullptr};
  nn::LayerNorm patch_norm{nullptr};
  std::vector<nn::Sequential> stages;
  std::vector<PatchMerging> merges;
  nn::LayerNorm norm{nullptr};
};

}  // namespace

BackbonePtr make_swin_v2_b() { return std::make_shared<SwinV2BImpl>(); }

}  // namespace tenet::backbones
