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

#include "tenet/dataset.h"

#include <ATen/Parallel.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#include <set>
#include <unordered_set>

#include "tenet/coco_json.h"
#include "tenet/error.h"
#include "tenet/log.h"

namespace tenet {

IndexResult index_coco(const std::filesystem::path& instances_file,
                       const std::filesystem::path& captions_file,
                       const std::filesystem::path& images_dir) {
  struct ImageEntry {
    std::string file_name;
    std::set<int> categories;
    std::vector<std::string> captions;
  };
  std::map<std::int64_t, ImageEntry> images;

  std::vector<std::pair<std::int64_t, int>> instance_refs;
  stream_coco_records(
      instances_file, {"images", "annotations"},
      [&](std::string_view section, const CocoRecord& record) {
        const auto id = record.get_int(section == "images" ? "id" : "image_id");
        if (!id) {
          throw DataError("record without an image id in " +
                          instances_file.string());
        }
        if (section == "images") {
          auto file_name = record.get_string("file_name");
          if (!file_name) {
            throw DataError("image " + std::to_string(*id) +
                            " has no file_name in " + instances_file.string());
          }
          images[*id].file_name = std::move(*file_name);
        } else {
          const auto category = record.get_int("category_id");
          if (!category) {
            throw DataError("annotation without category_id in " +
                            instances_file.string());
          }
          instance_refs.emplace_back(*id, static_cast<int>(*category));
        }
      });
  // Annotations may precede the image list in hand-written files.
  for (const auto& [image_id, category] : instance_refs) {
    auto it = images.find(image_id);
    if (it == images.end()) {
      throw DataError("instance annotation refers to unknown image " +
                      std::to_string(image_id) + " in " +
                      instances_file.string());
    }
    it->second.categories.insert(category);
  }

  std::set<std::int64_t> orphans;
  stream_coco_records(
      captions_file, {"annotations"},
      [&](std::string_view, const CocoRecord& record) {
        const auto id = record.get_int("image_id");
        auto caption = record.get_string("caption");
        if (!id || !caption) {
          throw DataError("caption annotation without image_id or caption in " +
                          captions_file.string());
        }
        auto it = images.find(*id);
        if (it == images.end()) {
          orphans.insert(*id);
          return;
        }
        it->second.captions.push_back(std::move(*caption));
      });

  IndexResult result;
  result.orphan_caption_images = orphans.size();
  if (!orphans.empty()) {
    log::warn(orphans.size(), " captioned image ids are absent from ",
              instances_file.string(), "; skipped");
  }
  result.samples.reserve(images.size());
  for (auto& [id, entry] : images) {
    auto path = images_dir / entry.file_name;
    if (!std::filesystem::exists(path)) {
      log::warn("image ", id, " missing on disk: ", path.string());
      ++result.missing_images;
      continue;
    }
    RawSample sample;
    sample.image_id = id;
    sample.image_path = std::move(path);
    sample.category_ids.assign(entry.categories.begin(), entry.categories.end());
    sample.captions = std::move(entry.captions);
    result.samples.push_back(std::move(sample));
  }
  if (result.missing_images > 0) {
    log::warn(result.missing_images, " of ", images.size(),
              " images missing under ", images_dir.string());
  }
  return result;
}

void check_split_disjoint(std::span<const RawSample> train,
                          std::span<const RawSample> validation) {
  std::unordered_set<std::int64_t> ids;
  for (const auto& s : train) ids.insert(s.image_id);
  for (const auto& s : validation) {
    if (ids.count(s.image_id)) {
      throw DataError("image id " + std::to_string(s.image_id) +
                      " is in both the training and validation splits");
    }
  }
}

torch::Tensor load_image(const std::filesystem::path& path,
                         std::int64_t height, std::int64_t width) {
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) {
    throw ImageDecodeError("cannot decode image " + path.string());
  }
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  cv::Mat resized;
  cv::resize(rgb, resized,
             cv::Size(static_cast<int>(width), static_cast<int>(height)), 0, 0,
             cv::INTER_LINEAR);
  cv::Mat as_float;
  resized.convertTo(as_float, CV_32FC3, 1.0 / 255.0);

  auto hwc = torch::from_blob(as_float.data, {height, width, 3},
                              torch::kFloat32);
  auto chw = hwc.permute({2, 0, 1}).contiguous();  // copies out of the Mat
  auto mean = torch::tensor({kImageNetMean[0], kImageNetMean[1],
                             kImageNetMean[2]})
                  .view({3, 1, 1});
  auto stddev =
      torch::tensor({kImageNetStd[0], kImageNetStd[1], kImageNetStd[2]})
          .view({3, 1, 1});
  return (chw - mean) / stddev;
}

torch::Tensor horizontal_flip(const torch::Tensor& image) {
  return image.flip({-1});
}

EncodedTargets encode_targets(const RawSample& sample, const Vocabulary& vocab,
                              const HyperParams& params) {
  const auto classes = class_index_map();
  if (params.num_classes != classes.size()) {
    throw ConfigError("num_classes is " + std::to_string(params.num_classes) +
                      " but the COCO class map has " +
                      std::to_string(classes.size()) + " categories");
  }
  EncodedTargets targets;
  targets.class_target = torch::zeros({params.num_classes});
  auto class_acc = targets.class_target.accessor<float, 1>();
  for (int id : sample.category_ids) {
    const auto index = classes.index_of(id);
    if (!index) {
      throw DataError("category id " + std::to_string(id) + " of image " +
                      std::to_string(sample.image_id) +
                      " has no class index");
    }
    class_acc[*index] = 1.0f;
  }

  targets.word_target =
      torch::zeros({static_cast<std::int64_t>(vocab.size())});
  auto word_acc = targets.word_target.accessor<float, 1>();
  for (const auto& caption : sample.captions) {
    for (const auto& token : tokenize(caption)) {
      if (auto rank = vocab.index_of(token)) {
        word_acc[static_cast<std::int64_t>(*rank)] = 1.0f;
      }
    }
  }
  return targets;
}

EncodedSample encode(const RawSample& sample, const Vocabulary& vocab,
                     const HyperParams& params) {
  auto targets = encode_targets(sample, vocab, params);
  return {sample.image_id,
          load_image(sample.image_path, params.height, params.width),
          std::move(targets.class_target), std::move(targets.word_target)};
}

EncodedDataset::EncodedDataset(std::span<const RawSample> samples,
                               const Vocabulary& vocab,
                               const HyperParams& params, bool cache_images)
    : height_(params.height), width_(params.width) {
  entries_.reserve(samples.size());
  for (const auto& sample : samples) {
    auto targets = encode_targets(sample, vocab, params);
    Entry entry{sample.image_id, sample.image_path, {},
                std::move(targets.class_target),
                std::move(targets.word_target)};
    entries_.push_back(std::move(entry));
  }
  if (!cache_images) return;

  std::vector<std::string> errors(entries_.size());
  at::parallel_for(0, static_cast<std::int64_t>(entries_.size()), 1,
                   [&](std::int64_t begin, std::int64_t end) {
                     for (auto i = begin; i < end; ++i) {
                       try {
                         entries_[i].image =
                             load_image(entries_[i].path, height_, width_);
                       } catch (const ImageDecodeError& ex) {
                         errors[i] = ex.what();
                       }
                     }
                   });
  std::vector<Entry> kept;
  kept.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (errors[i].empty()) {
      kept.push_back(std::move(entries_[i]));
    } else {
      log::warn("skipping sample: ", errors[i]);
      ++skipped_;
    }
  }
  entries_ = std::move(kept);
}

EncodedDataset::EncodedDataset(std::vector<EncodedSample> samples) {
  entries_.reserve(samples.size());
  for (auto& s : samples) {
    if (!s.image.defined() || s.image.dim() != 3) {
      throw ShapeError("in-memory samples need a (3, H, W) image tensor");
    }
    if (height_ == 0) {
      height_ = s.image.size(1);
      width_ = s.image.size(2);
    } else if (s.image.size(1) != height_ || s.image.size(2) != width_) {
      throw ShapeError("in-memory samples differ in image size");
    }
    entries_.push_back(Entry{s.image_id, {}, std::move(s.image),
                             std::move(s.class_target),
                             std::move(s.word_target)});
  }
}

EncodedDataset EncodedDataset::from_cache(const TargetCache& cache,
                                          const HyperParams& params) {
  EncodedDataset out;
  out.height_ = params.height;
  out.width_ = params.width;
  out.entries_.reserve(cache.records.size());
  for (const auto& rec : cache.records) {
    auto class_target = torch::zeros({static_cast<std::int64_t>(cache.num_classes)});
    auto word_target = torch::zeros({static_cast<std::int64_t>(cache.vocab_size)});
    for (auto c : rec.class_indices) class_target[c] = 1.0f;
    for (auto w : rec.word_indices) word_target[w] = 1.0f;
    out.entries_.push_back(Entry{rec.image_id, rec.image_path, {},
                                 std::move(class_target),
                                 std::move(word_target)});
  }
  return out;
}

torch::Tensor EncodedDataset::image(std::size_t i) const {
  const auto& entry = entries_.at(i);
  if (entry.image.defined()) return entry.image;
  return load_image(entry.path, height_, width_);
}

Batch EncodedDataset::make_batch(std::span<const std::size_t> indices,
                                 const std::vector<bool>& flip) const {
  if (indices.empty()) throw ShapeError("empty batch");
  if (!flip.empty() && flip.size() != indices.size()) {
    throw ShapeError("flip mask does not match the batch");
  }
  const auto n = static_cast<std::int64_t>(indices.size());
  std::vector<torch::Tensor> images(indices.size());
  std::vector<std::string> errors(indices.size());
  at::parallel_for(0, n, 1, [&](std::int64_t begin, std::int64_t end) {
    for (auto b = begin; b < end; ++b) {
      try {
        images[b] = image(indices[b]);
        if (!flip.empty() && flip[b]) images[b] = horizontal_flip(images[b]);
      } catch (const std::exception& ex) {
        errors[b] = ex.what();
      }
    }
  });
  for (const auto& e : errors) {
    if (!e.empty()) throw ImageDecodeError(e);
  }

  Batch batch;
  std::vector<torch::Tensor> class_targets;
  std::vector<torch::Tensor> word_targets;
  batch.image_ids.reserve(indices.size());
  for (auto i : indices) {
    batch.image_ids.push_back(entries_.at(i).image_id);
    class_targets.push_back(entries_[i].class_target);
    word_targets.push_back(entries_[i].word_target);
  }
  batch.images = torch::stack(images);
  batch.class_targets = torch::stack(class_targets);
  batch.word_targets = torch::stack(word_targets);
  return batch;
}

EncodedDataset EncodedDataset::select(
    std::span<const std::size_t> indices) const {
  EncodedDataset out;
  out.height_ = height_;
  out.width_ = width_;
  out.entries_.reserve(indices.size());
  for (auto i : indices) out.entries_.push_back(entries_.at(i));
  return out;
}

TargetCache build_target_cache(std::span<const RawSample> samples,
                               const Vocabulary& vocab,
                               const HyperParams& params) {
  TargetCache cache;
  cache.num_classes = static_cast<std::uint32_t>(params.num_classes);
  cache.vocab_size = static_cast<std::uint32_t>(vocab.size());
  cache.vocab_fingerprint = vocab.fingerprint();
  cache.records.reserve(samples.size());
  for (const auto& sample : samples) {
    const auto targets = encode_targets(sample, vocab, params);
    TargetCacheRecord rec;
    rec.image_id = sample.image_id;
    rec.image_path = sample.image_path.string();
    auto nz_class = targets.class_target.nonzero().flatten();
    auto nz_word = targets.word_target.nonzero().flatten();
    for (std::int64_t i = 0; i < nz_class.size(0); ++i) {
      rec.class_indices.push_back(
          static_cast<std::uint32_t>(nz_class[i].item<std::int64_t>()));
    }
    for (std::int64_t i = 0; i < nz_word.size(0); ++i) {
      rec.word_indices.push_back(
          static_cast<std::uint32_t>(nz_word[i].item<std::int64_t>()));
    }
    cache.records.push_back(std::move(rec));
  }
  return cache;
}

namespace {

constexpr char kCacheMagic[8] = {'T', 'E', 'N', 'E', 'T', 'T', 'G', 'T'};
constexpr std::uint32_t kCacheVersion = 1;

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T take(std::istream& in, const std::filesystem::path& path) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw DataError("truncated target cache " + path.string());
  }
  return value;
}

void put_indices(std::ostream& out, const std::vector<std::uint32_t>& v) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(v.size()));
  for (auto x : v) put(out, x);
}

std::vector<std::uint32_t> take_indices(std::istream& in,
                                        const std::filesystem::path& path,
                                        std::uint32_t bound) {
  const auto n = take<std::uint32_t>(in, path);
  if (n > bound) throw DataError("corrupt target cache " + path.string());
  std::vector<std::uint32_t> v(n);
  for (auto& x : v) {
    x = take<std::uint32_t>(in, path);
    if (x >= bound) throw DataError("corrupt target cache " + path.string());
  }
  return v;
}

}  // namespace

void write_target_cache(const TargetCache& cache,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write target cache " + path.string());
  out.write(kCacheMagic, sizeof(kCacheMagic));
  put(out, kCacheVersion);
  put(out, cache.num_classes);
  put(out, cache.vocab_size);
  put(out, cache.vocab_fingerprint);
  put<std::uint64_t>(out, cache.records.size());
  for (const auto& rec : cache.records) {
    put(out, rec.image_id);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(rec.image_path.size()));
    out.write(rec.image_path.data(),
              static_cast<std::streamsize>(rec.image_path.size()));
    put_indices(out, rec.class_indices);
    put_indices(out, rec.word_indices);
  }
  if (!out) throw DataError("failed writing target cache " + path.string());
}

TargetCache read_target_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open target cache " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0) {
    throw DataError(path.string() + " is not a target cache");
  }
  if (take<std::uint32_t>(in, path) != kCacheVersion) {
    throw DataError("unsupported target cache version in " + path.string());
  }
  TargetCache cache;
  cache.num_classes = take<std::uint32_t>(in, path);
  cache.vocab_size = take<std::uint32_t>(in, path);
  cache.vocab_fingerprint = take<std::uint64_t>(in, path);
  const auto count = take<std::uint64_t>(in, path);
  cache.records.reserve(static_cast<std::size_t>(count));
  for (std::uint64_t r = 0; r < count; ++r) {
    TargetCacheRecord rec;
    rec.image_id = take<std::int64_t>(in, path);
    const auto len = take<std::uint32_t>(in, path);
    rec.image_path.resize(len);
    if (!in.read(rec.image_path.data(), len)) {
      throw DataError("truncated target cache " + path.string());
    }
    rec.class_indices = take_indices(in, path, cache.num_classes);
    rec.word_indices = take_indices(in, path, cache.vocab_size);
    cache.records.push_back(std::move(rec));
  }
  return cache;
}

}  // namespace tenet
