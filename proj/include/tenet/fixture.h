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

// Synthetic COCO-format dataset for desk-scale runs: small solid-color images
// with deterministic categories and captions, laid out like the real
// release (train2017/, val2017/, annotations/*.json).

#ifndef TENET_FIXTURE_H_
#define TENET_FIXTURE_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tenet {

struct FixtureOptions {
  int num_train = 20;
  int num_val = 8;
  int image_size = 64;
  int captions_per_image = 5;
  // Each image gets at least this many categories and planted words; keep
  // them >= top_c / top_w so a perfect ranker can score 1.0.
  int min_categories = 3;
  int max_categories = 5;
  int words_per_image = 12;
  std::uint64_t seed = 2024;
};

struct PlantedImage {
  std::int64_t image_id = 0;
  std::string file_name;
  std::vector<int> category_ids;   // sorted
  std::vector<std::string> words;  // planted caption words
};

struct FixtureLayout {
  std::filesystem::path root;
  std::filesystem::path train_images;
  std::filesystem::path train_instances;
  std::filesystem::path train_captions;
  std::filesystem::path val_images;
  std::filesystem::path val_instances;
  std::filesystem::path val_captions;
  std::vector<PlantedImage> train;
  std::vector<PlantedImage> val;
};

// Paths the generator would write under `root`, without touching disk.
FixtureLayout fixture_layout(const std::filesystem::path& root);

// Writes the fixture under `root` (created if needed, existing fixture files
// overwritten). Output is a pure function of the options.
FixtureLayout generate_fixture(const std::filesystem::path& root,
                               const FixtureOptions& options = {});

}  // namespace tenet

#endif  // TENET_FIXTURE_H_
