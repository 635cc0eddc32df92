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

// COCO ingestion and joint class/word target encoding.

#ifndef TENET_DATASET_H_
#define TENET_DATASET_H_

#include <torch/torch.h>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tenet/coco_categories.h"
#include "tenet/hyperparams.h"
#include "tenet/vocab.h"

namespace tenet {

struct RawSample {
  std::int64_t image_id = 0;
  std::filesystem::path image_path;
  std::vector<int> category_ids;  // sorted, unique
  std::vector<std::string> captions;
};

struct IndexResult {
  std::vector<RawSample> samples;  // ascending image id
  std::size_t missing_images = 0;  // listed in the instances file, not on disk
  std::size_t orphan_caption_images = 0;  // captioned but not in instances
};

// Joins a COCO instances file and a captions file by image id. Every image
// listed in the instances file yields one sample, including images with no
// instance annotations. Images missing from `images_dir` and caption-only
// image ids are skipped with a warning and counted. Throws DataError for
// unreadable or malformed annotation files.
IndexResult index_coco(const std::filesystem::path& instances_file,
                       const std::filesystem::path& captions_file,
                       const std::filesystem::path& images_dir);

// Throws DataError if any image id occurs in both lists.
void check_split_disjoint(std::span<const RawSample> train,
                          std::span<const RawSample> validation);

inline constexpr std::array<float, 3> kImageNetMean = {0.485f, 0.456f, 0.406f};
inline constexpr std::array<float, 3> kImageNetStd = {0.229f, 0.224f, 0.225f};

// Decodes an image file to a float tensor of shape (3, height, width):
// RGB, bilinear resize without aspect preservation, scaled to [0, 1], then
// normalized with ImageNet channel statistics. Throws ImageDecodeError.
torch::Tensor load_image(const std::filesystem::path& path,
                         std::int64_t height, std::int64_t width);

// Flips a (3, H, W) or (B, 3, H, W) image tensor left-to-right.
torch::Tensor horizontal_flip(const torch::Tensor& image);

struct EncodedTargets {
  torch::Tensor class_target;  // float (num_classes,), 0/1
  torch::Tensor word_target;   // float (vocab.size(),), 0/1
};

// class_target[c] = 1 iff the sample has a category with class index c;
// word_target[w] = 1 iff vocabulary word w occurs in any caption. Throws
// DataError for a category id outside the class map, and ConfigError if
// params.num_classes differs from the class map size.
EncodedTargets encode_targets(const RawSample& sample, const Vocabulary& vocab,
                              const HyperParams& params);

struct EncodedSample {
  std::int64_t image_id = 0;
  torch::Tensor image;         // (3, height, width)
  torch::Tensor class_target;  // (num_classes,)
  torch::Tensor word_target;   // (vocab.size(),)
};

EncodedSample encode(const RawSample& sample, const Vocabulary& vocab,
                     const HyperParams& params);

// Encoded-target cache written by `prepare-data`. Binary, little-endian:
//
//   magic "TENETTGT", u32 version (1), u32 num_classes, u32 vocab_size,
//   u64 vocabulary fingerprint, u64 record count, then per record:
//   i64 image_id, u32 path length, path bytes (UTF-8),
//   u32 n, n x u32 positive class indices,
//   u32 m, m x u32 positive word indices.
struct TargetCacheRecord {
  std::int64_t image_id = 0;
  std::string image_path;
  std::vector<std::uint32_t> class_indices;
  std::vector<std::uint32_t> word_indices;
};

struct TargetCache {
  std::uint32_t num_classes = 0;
  std::uint32_t vocab_size = 0;
  std::uint64_t vocab_fingerprint = 0;
  std::vector<TargetCacheRecord> records;
};

struct Batch {
  std::vector<std::int64_t> image_ids;
  torch::Tensor images;         // (B, 3, H, W)
  torch::Tensor class_targets;  // (B, num_classes)
  torch::Tensor word_targets;   // (B, vocab size)
};

// Samples with encoded targets, ready for batching. Images are decoded on
// demand (in parallel across a batch) unless they were supplied in memory or
// `cache_images` was requested.
class EncodedDataset {
 public:
  EncodedDataset() = default;

  // Encodes targets for every sample. Samples whose image fails to decode
  // are dropped (and counted) when `cache_images` is set; otherwise decode
  // errors surface when the batch is built.
  EncodedDataset(std::span<const RawSample> samples, const Vocabulary& vocab,
                 const HyperParams& params, bool cache_images = false);

  // In-memory samples, e.g. from tests or a previous encode pass.
  explicit EncodedDataset(std::vector<EncodedSample> samples);

  // Targets from a prepared cache; images still come from disk.
  static EncodedDataset from_cache(const TargetCache& cache,
                                   const HyperParams& params);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t skipped() const { return skipped_; }

  std::int64_t image_id(std::size_t i) const { return entries_.at(i).image_id; }
  const std::filesystem::path& image_path(std::size_t i) const {
    return entries_.at(i).path;
  }
  const torch::Tensor& class_target(std::size_t i) const {
    return entries_.at(i).class_target;
  }
  const torch::Tensor& word_target(std::size_t i) const {
    return entries_.at(i).word_target;
  }
  torch::Tensor image(std::size_t i) const;

  // `flip`, when non-empty, is parallel to `indices` and selects samples to
  // mirror horizontally.
  Batch make_batch(std::span<const std::size_t> indices,
                   const std::vector<bool>& flip = {}) const;

  // Entries in a new order (permutation or subset of indices).
  EncodedDataset select(std::span<const std::size_t> indices) const;

 private:
  struct Entry {
    std::int64_t image_id = 0;
    std::filesystem::path path;
    torch::Tensor image;  // undefined until decoded
    torch::Tensor class_target;
    torch::Tensor word_target;
  };

  std::vector<Entry> entries_;
  std::int64_t height_ = 0;
  std::int64_t width_ = 0;
  std::size_t skipped_ = 0;
};

TargetCache build_target_cache(std::span<const RawSample> samples,
                               const Vocabulary& vocab,
                               const HyperParams& params);
void write_target_cache(const TargetCache& cache,
                        const std::filesystem::path& path);
TargetCache read_target_cache(const std::filesystem::path& path);

}  // namespace tenet

#endif  // TENET_DATASET_H_
