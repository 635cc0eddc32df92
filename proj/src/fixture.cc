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

#include "tenet/fixture.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#include <random>

#include "json.hpp"
#include "tenet/coco_categories.h"
#include "tenet/error.h"

namespace tenet {
namespace {

// Descriptive caption words, all at least three characters long.
constexpr const char* kWordPool[] = {
    "sunny",   "wooden",  "bright",  "small",   "large",  "old",
    "young",   "happy",   "quiet",   "busy",    "street", "kitchen",
    "field",   "beach",   "table",   "window",  "green",  "blue",
    "yellow",  "purple",  "sitting", "standing", "walking", "holding",
    "playing", "looking", "near",    "front",   "top",    "side"};
constexpr int kPoolSize = sizeof(kWordPool) / sizeof(kWordPool[0]);

// Short fillers never survive the three-character vocabulary filter.
constexpr const char* kFillers[] = {"a", "on", "in", "of", "by", "at"};

// Category ids that actually occur in released COCO annotations.
std::vector<int> populated_category_ids() {
  static const int kUnused[] = {12, 26, 29, 30, 45, 66, 68, 69, 71, 83, 91};
  std::vector<int> ids;
  for (const auto& c : kCocoCategories) {
    if (std::find(std::begin(kUnused), std::end(kUnused), c.id) ==
        std::end(kUnused)) {
      ids.push_back(c.id);
    }
  }
  return ids;
}

std::string coco_file_name(std::int64_t id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%012lld.png", static_cast<long long>(id));
  return buf;
}

PlantedImage plan_image(int global_index, std::int64_t image_id,
                        const FixtureOptions& options, std::mt19937_64& rng) {
  static const std::vector<int> populated = populated_category_ids();
  PlantedImage image;
  image.image_id = image_id;
  image.file_name = coco_file_name(image_id);

  const int span = options.max_categories - options.min_categories + 1;
  const int n_categories = options.min_categories + global_index % span;
  std::vector<int> pool = populated;
  for (int i = 0; i < n_categories; ++i) {
    const auto j = i + static_cast<int>(rng() % (pool.size() - i));
    std::swap(pool[i], pool[j]);
    image.category_ids.push_back(pool[i]);
  }
  std::sort(image.category_ids.begin(), image.category_ids.end());

  // Overlapping windows over the pool so every word recurs across images.
  for (int j = 0; j < options.words_per_image; ++j) {
    image.words.emplace_back(kWordPool[(global_index * 5 + j) % kPoolSize]);
  }
  return image;
}

// Each planted word lands in two of the image's captions.
std::vector<std::string> make_captions(const PlantedImage& image,
                                       int captions_per_image) {
  std::vector<std::string> captions;
  for (int k = 0; k < captions_per_image; ++k) {
    std::string caption = "A";
    int filler = k;
    for (std::size_t j = 0; j < image.words.size(); ++j) {
      const int first = static_cast<int>(j) % captions_per_image;
      const int second = (first + 1) % captions_per_image;
      if (k != first && k != second) continue;
      caption += ' ';
      caption += image.words[j];
      caption += ' ';
      caption += kFillers[filler++ % std::size(kFillers)];
    }
    caption += '.';
    captions.push_back(std::move(caption));
  }
  return captions;
}

cv::Scalar color_for(int global_index, int total) {
  cv::Mat hsv(1, 1, CV_8UC3,
              cv::Scalar(static_cast<double>(global_index) * 180.0 / total,
                         global_index % 2 == 0 ? 230 : 160,
                         global_index % 3 == 0 ? 255 : 190));
  cv::Mat bgr;
  cv::cvtColor(hsv, bgr, cv::COLOR_HSV2BGR);
  const auto px = bgr.at<cv::Vec3b>(0, 0);
  return cv::Scalar(px[0], px[1], px[2]);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

void write_split(const std::vector<PlantedImage>& images, int first_global,
                 int total, const std::filesystem::path& image_dir,
                 const std::filesystem::path& instances_path,
                 const std::filesystem::path& captions_path,
                 const FixtureOptions& options) {
  std::filesystem::create_directories(image_dir);
  nlohmann::json categories = nlohmann::json::array();
  for (const auto& c : kCocoCategories) {
    categories.push_back(
        {{"id", c.id}, {"name", std::string(c.name)}, {"supercategory", "x"}});
  }
  nlohmann::json image_list = nlohmann::json::array();
  nlohmann::json instances = nlohmann::json::array();
  nlohmann::json captions = nlohmann::json::array();
  std::int64_t ann_id = 1;
  const int size = options.image_size;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto& image = images[i];
    const int global = first_global + static_cast<int>(i);
    cv::Mat pixels(size, size, CV_8UC3, color_for(global, total));
    if (!cv::imwrite((image_dir / image.file_name).string(), pixels)) {
      throw DataError("cannot write fixture image " + image.file_name);
    }
    image_list.push_back({{"id", image.image_id},
                          {"file_name", image.file_name},
                          {"height", size},
                          {"width", size}});
    for (std::size_t c = 0; c < image.category_ids.size(); ++c) {
      // The first category gets two instances, as crowded scenes do.
      const int copies = c == 0 ? 2 : 1;
      for (int r = 0; r < copies; ++r) {
        instances.push_back({{"id", ann_id++},
                             {"image_id", image.image_id},
                             {"category_id", image.category_ids[c]},
                             {"bbox", {0, 0, size, size}},
                             {"area", size * size},
                             {"iscrowd", 0}});
      }
    }
    for (const auto& text : make_captions(image, options.captions_per_image)) {
      captions.push_back(
          {{"id", ann_id++}, {"image_id", image.image_id}, {"caption", text}});
    }
  }
  nlohmann::json info = {{"description", "synthetic fixture"}};
  write_json(instances_path, {{"info", info},
                              {"images", image_list},
                              {"annotations", instances},
                              {"categories", categories}});
  write_json(captions_path,
             {{"info", info}, {"images", image_list}, {"annotations", captions}});
}

}  // namespace

FixtureLayout fixture_layout(const std::filesystem::path& root) {
  FixtureLayout layout;
  layout.root = root;
  layout.train_images = root / "train2017";
  layout.val_images = root / "val2017";
  layout.train_instances = root / "annotations" / "instances_train2017.json";
  layout.train_captions = root / "annotations" / "captions_train2017.json";
  layout.val_instances = root / "annotations" / "instances_val2017.json";
  layout.val_captions = root / "annotations" / "captions_val2017.json";
  return layout;
}

FixtureLayout generate_fixture(const std::filesystem::path& root,
                               const FixtureOptions& options) {
  if (options.num_train < 0 || options.num_val < 0 ||
      options.image_size < 1 || options.captions_per_image < 2 ||
      options.min_categories < 1 ||
      options.max_categories < options.min_categories ||
      options.max_categories > 80 || options.words_per_image < 1 ||
      options.words_per_image > kPoolSize) {
    throw ConfigError("invalid fixture options");
  }
  FixtureLayout layout = fixture_layout(root);
  std::filesystem::create_directories(root / "annotations");

  std::mt19937_64 rng(options.seed);
  const int total = options.num_train + options.num_val;
  for (int i = 0; i < options.num_train; ++i) {
    layout.train.push_back(plan_image(i, 1 + i, options, rng));
  }
  for (int i = 0; i < options.num_val; ++i) {
    layout.val.push_back(
        plan_image(options.num_train + i, 1'000'000 + i, options, rng));
  }
  write_split(layout.train, 0, total, layout.train_images,
              layout.train_instances, layout.train_captions, options);
  write_split(layout.val, options.num_train, total, layout.val_images,
              layout.val_instances, layout.val_captions, options);
  return layout;
}

}  // namespace tenet
