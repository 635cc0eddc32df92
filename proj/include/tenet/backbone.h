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

// Image feature extractors. Every backbone maps (B, 3, H, W) images to
// (B, feature_dim) features: the network with its final classification layer
// replaced by an identity.
//
// The built-in torchvision architectures use torchvision's parameter names,
// so a state dict exported from torchvision loads unchanged.

#ifndef TENET_BACKBONE_H_
#define TENET_BACKBONE_H_

#include <torch/torch.h>

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace tenet {

class BackboneImpl : public torch::nn::Module {
 public:
  virtual torch::Tensor forward(torch::Tensor images) = 0;
};

using BackbonePtr = std::shared_ptr<BackboneImpl>;

class BackboneRegistry {
 public:
  using Factory = std::function<BackbonePtr()>;

  // Holds the built-in backbones; tests and plugins may add more.
  static BackboneRegistry& instance();

  // Replaces any existing factory of the same name.
  void add(const std::string& name, Factory factory);
  bool contains(const std::string& name) const;
  std::vector<std::string> names() const;

  // Throws ConfigError listing the registered names if `name` is unknown.
  BackbonePtr create(const std::string& name) const;

 private:
  BackboneRegistry();

  mutable std::mutex mu_;
  std::map<std::string, Factory> factories_;
};

// Feature width of `backbone` for (1, 3, height, width) inputs, found by
// running one random input through it without gradient tracking. Throws
// ShapeError if the output is not rank 2. The backbone's train/eval mode is
// restored afterwards.
std::int64_t probe_feature_dim(BackboneImpl& backbone, std::int64_t height,
                               std::int64_t width);

// Loads a state dict saved from Python with torch.save(dict_of_tensors) into
// `module`, matching parameters and buffers by dotted name. Keys listed in
// `ignore_prefixes` (e.g. a dropped classifier) are skipped. Throws DataError
// on missing keys, unexpected keys, or shape mismatches.
void load_python_state_dict(torch::nn::Module& module,
                            const std::string& path,
                            const std::vector<std::string>& ignore_prefixes = {});

// The torchvision state-dict keys that belong to the replaced final layer of
// a built-in backbone (e.g. "fc." for resnet50).
std::vector<std::string> replaced_layer_prefixes(const std::string& backbone);

}  // namespace tenet

#endif  // TENET_BACKBONE_H_
