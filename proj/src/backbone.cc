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

#include "tenet/backbone.h"

#include <torch/serialize.h>

#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "backbones/layers.h"
#include "tenet/error.h"

namespace tenet {

BackboneRegistry::BackboneRegistry() {
  factories_ = {
      {"resnet50", backbones::make_resnet50},
      {"regnet_y_400mf", backbones::make_regnet_y_400mf},
      {"mobilenet_v3_small", backbones::make_mobilenet_v3_small},
      {"convnext_small", backbones::make_convnext_small},
      {"swin_v2_b", backbones::make_swin_v2_b},
      {"vit_b_16", backbones::make_vit_b_16},
      {"tiny_cnn", backbones::make_tiny_cnn},
  };
}

BackboneRegistry& BackboneRegistry::instance() {
  static BackboneRegistry registry;
  return registry;
}

void BackboneRegistry::add(const std::string& name, Factory factory) {
  std::lock_guard lock(mu_);
  factories_[name] = std::move(factory);
}

bool BackboneRegistry::contains(const std::string& name) const {
  std::lock_guard lock(mu_);
  return factories_.count(name) > 0;
}

std::vector<std::string> BackboneRegistry::names() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [name, factory] : factories_) out.push_back(name);
  return out;
}

BackbonePtr BackboneRegistry::create(const std::string& name) const {
  Factory factory;
  {
    std::lock_guard lock(mu_);
    auto it = factories_.find(name);
    if (it != factories_.end()) factory = it->second;
  }
  if (!factory) {
    std::string known;
    for (const auto& n : names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown backbone '" + name + "'; supported: " + known);
  }
  return factory();
}

std::int64_t probe_feature_dim(BackboneImpl& backbone, std::int64_t height,
                               std::int64_t width) {
  torch::NoGradGuard no_grad;
  const bool was_training = backbone.is_training();
  backbone.eval();
  torch::Tensor out;
  try {
    out = backbone.forward(torch::zeros({1, 3, height, width}));
  } catch (...) {
    backbone.train(was_training);
    throw;
  }
  backbone.train(was_training);
  if (out.dim() != 2) {
    std::ostringstream shape;
    shape << out.sizes();
    throw ShapeError("backbone output must be rank 2 (batch, features), got " +
                     shape.str());
  }
  return out.size(1);
}

namespace {

bool has_prefix(const std::string& key,
                const std::vector<std::string>& prefixes) {
  for (const auto& p : prefixes) {
    if (key.rfind(p, 0) == 0) return true;
  }
  return false;
}

}  // namespace

void load_python_state_dict(torch::nn::Module& module, const std::string& path,
                            const std::vector<std::string>& ignore_prefixes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open weights file " + path);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  c10::IValue value;
  try {
    value = torch::pickle_load(bytes);
  } catch (const c10::Error& e) {
    throw DataError("cannot parse weights file " + path + ": " +
                    e.what_without_backtrace());
  }
  if (!value.isGenericDict()) {
    throw DataError("weights file " + path + " does not hold a state dict");
  }

  std::map<std::string, torch::Tensor> loaded;
  for (const auto& item : value.toGenericDict()) {
    const auto key = item.key().toStringRef();
    if (has_prefix(key, ignore_prefixes)) continue;
    // BatchNorm's step counter has no counterpart worth checking.
    if (key.size() >= 20 &&
        key.compare(key.size() - 20, 20, ".num_batches_tracked") == 0) {
      continue;
    }
    loaded[key] = item.value().toTensor();
  }

  torch::NoGradGuard no_grad;
  std::set<std::string> seen;
  auto assign = [&](const std::string& name, torch::Tensor& target) {
    if (name.size() >= 20 &&
        name.compare(name.size() - 20, 20, ".num_batches_tracked") == 0) {
      return;
    }
    auto it = loaded.find(name);
    if (it == loaded.end()) {
      throw DataError("weights file " + path + " lacks '" + name + "'");
    }
    if (it->second.sizes() != target.sizes()) {
      std::ostringstream msg;
      msg << "shape mismatch for '" << name << "' in " << path << ": file "
          << it->second.sizes() << ", model " << target.sizes();
      throw DataError(msg.str());
    }
    target.copy_(it->second);
    seen.insert(name);
  };
  for (auto& p : module.named_parameters()) assign(p.key(), p.value());
  for (auto& b : module.named_buffers()) assign(b.key(), b.value());
  for (const auto& [key, tensor] : loaded) {
    if (!seen.count(key)) {
      throw DataError("unexpected key '" + key + "' in weights file " + path);
    }
  }
}

std::vector<std::string> replaced_layer_prefixes(const std::string& backbone) {
  static const std::map<std::string, std::vector<std::string>> kPrefixes = {
      {"resnet50", {"fc."}},
      {"regnet_y_400mf", {"fc."}},
      {"mobilenet_v3_small", {"classifier.3."}},
      {"convnext_small", {"classifier.2."}},
      {"swin_v2_b", {"head."}},
      {"vit_b_16", {"heads."}},
  };
  auto it = kPrefixes.find(backbone);
  return it == kPrefixes.end() ? std::vector<std::string>{} : it->second;
}

}  // namespace tenet
