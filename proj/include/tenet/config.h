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

// Experiment configuration: a flat "key = value" file.
//
//   # comment
//   backbone = resnet50
//   seeds = 0,1,2
//
// Every key has a default, unknown or repeated keys are errors, and
// serialization writes every key in a fixed order so that a parsed and
// re-serialized file is stable.

#ifndef TENET_CONFIG_H_
#define TENET_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tenet/hyperparams.h"
#include "tenet/model.h"

namespace tenet {

struct ExperimentConfig {
  HyperParams params;
  BackboneSpec backbone;

  std::int64_t min_count = 4;
  std::int64_t min_length = 3;
  // Existing vocabulary TSV; built from the training captions when empty.
  std::string vocab_path;

  std::string train_images = "data/coco/train2017";
  std::string train_instances = "data/coco/annotations/instances_train2017.json";
  std::string train_captions = "data/coco/annotations/captions_train2017.json";
  std::string val_images = "data/coco/val2017";
  std::string val_instances = "data/coco/annotations/instances_val2017.json";
  std::string val_captions = "data/coco/annotations/captions_val2017.json";

  std::string output_dir = "runs/default";
  std::vector<std::uint64_t> seeds = {0};

  // Replace the COCO paths by a generated synthetic dataset under
  // fixture_dir (default: <output_dir>/fixture).
  bool fixture = false;
  std::string fixture_dir;

  bool augment = true;
  // Decode every image once up front instead of once per batch.
  bool cache_images = false;
  bool save_checkpoints = true;
  // Seeds run concurrently in separate processes when > 1.
  std::int64_t parallel_seeds = 1;

  // Throws ConfigError for inconsistent settings.
  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

// The canonical COCO setup: resnet50, pretrained, ten seeds.
ExperimentConfig default_config();

// Small, fast settings for the synthetic dataset: a tiny CNN trained from
// scratch on 32x32 images.
ExperimentConfig fixture_preset();

// Throws ConfigError naming the line for syntax errors, unknown keys,
// duplicate keys and unparsable values. Keys absent from the text keep the
// values of `base`.
ExperimentConfig parse_config(std::string_view text,
                              const ExperimentConfig& base = {});
ExperimentConfig load_config(const std::filesystem::path& path,
                             const ExperimentConfig& base = {});

std::string serialize_config(const ExperimentConfig& config);
void save_config(const std::filesystem::path& path,
                 const ExperimentConfig& config);

// Assigns one key from its textual value, as a config line would.
void set_config_value(ExperimentConfig& config, const std::string& key,
                      const std::string& value);

std::vector<std::string> config_keys();

}  // namespace tenet

#endif  // TENET_CONFIG_H_
