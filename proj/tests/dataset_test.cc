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

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>
#include <opencv2/imgcodecs.hpp>

#include "tenet/error.h"
#include "tenet/fixture.h"
#include "test_util.h"

namespace tenet {
namespace {

void write_png(const std::filesystem::path& path, int h, int w,
               cv::Scalar bgr) {
  cv::Mat img(h, w, CV_8UC3, bgr);
  ASSERT_TRUE(cv::imwrite(path.string(), img));
}

// Three images on disk (1, 2, 3), a fourth listed but absent (4), and a
// caption for an unknown image (99). Image 3 has no instance annotations.
struct MiniCoco {
  testing::TempDir dir;
  std::filesystem::path images, instances, captions;

  MiniCoco() {
    images = dir / "imgs";
    std::filesystem::create_directories(images);
    write_png(images / "1.png", 8, 8, {0, 0, 255});
    write_png(images / "2.png", 8, 8, {0, 255, 0});
    write_png(images / "3.png", 8, 8, {255, 0, 0});
    instances = dir / "instances.json";
    captions = dir / "captions.json";
    std::ofstream(instances) << R"({
      "images": [{"id": 2, "file_name": "2.png"}, {"id": 1, "file_name": "1.png"},
                 {"id": 3, "file_name": "3.png"}, {"id": 4, "file_name": "4.png"}],
      "annotations": [{"id": 10, "image_id": 1, "category_id": 18},
                      {"id": 11, "image_id": 1, "category_id": 1},
                      {"id": 12, "image_id": 1, "category_id": 18},
                      {"id": 13, "image_id": 2, "category_id": 90}],
      "categories": []})";
    std::ofstream(captions) << R"({
      "images": [],
      "annotations": [{"id": 1, "image_id": 1, "caption": "A man and a dog."},
                      {"id": 2, "image_id": 1, "caption": "The dog runs"},
                      {"id": 3, "image_id": 2, "caption": "a toothbrush"},
                      {"id": 4, "image_id": 99, "caption": "orphan caption"}]})";
  }
};

HyperParams small_params() {
  HyperParams p;
  p.height = 4;
  p.width = 6;
  return p;
}

TEST(ClassIndexMap, EndpointsAndRoundTrip) {
  const auto m = class_index_map();
  EXPECT_EQ(m.size(), 91);
  EXPECT_EQ(*m.index_of(1), 0);
  EXPECT_EQ(*m.index_of(91), 90);
  EXPECT_FALSE(m.index_of(0).has_value());
  EXPECT_FALSE(m.index_of(92).has_value());
  for (std::int64_t i = 0; i < m.size(); ++i) {
    EXPECT_EQ(*m.index_of(m.category_id(i)), i);
  }
  EXPECT_THROW(m.category_id(91), std::out_of_range);
}

TEST(IndexCoco, JoinsByImageIdAndCountsSkips) {
  MiniCoco coco;
  const auto r = index_coco(coco.instances, coco.captions, coco.images);
  ASSERT_EQ(r.samples.size(), 3u);
  EXPECT_EQ(r.missing_images, 1u);
  EXPECT_EQ(r.orphan_caption_images, 1u);
  EXPECT_EQ(r.samples[0].image_id, 1);
  EXPECT_EQ(r.samples[0].category_ids, (std::vector<int>{1, 18}));
  EXPECT_EQ(r.samples[0].captions.size(), 2u);
  EXPECT_EQ(r.samples[1].category_ids, (std::vector<int>{90}));
  EXPECT_TRUE(r.samples[2].category_ids.empty());
  EXPECT_TRUE(r.samples[2].captions.empty());
  EXPECT_EQ(r.samples[2].image_path, coco.images / "3.png");
}

TEST(IndexCoco, EmptyListsGiveEmptyIndex) {
  testing::TempDir dir;
  std::ofstream(dir / "i.json") << R"({"images": [], "annotations": []})";
  std::ofstream(dir / "c.json") << R"({"images": [], "annotations": []})";
  const auto r = index_coco(dir / "i.json", dir / "c.json", dir.path());
  EXPECT_TRUE(r.samples.empty());
}

TEST(IndexCoco, MalformedJsonIsDataError) {
  MiniCoco coco;
  std::ofstream(coco.captions) << "{\"annotations\": [";
  EXPECT_THROW(index_coco(coco.instances, coco.captions, coco.images),
               DataError);
}

TEST(SplitDisjoint, RejectsSharedIds) {
  std::vector<RawSample> a(2), b(1);
  a[0].image_id = 1;
  a[1].image_id = 2;
  b[0].image_id = 3;
  EXPECT_NO_THROW(check_split_disjoint(a, b));
  b[0].image_id = 2;
  EXPECT_THROW(check_split_disjoint(a, b), DataError);
}

TEST(EncodeTargets, ClassesAndWords) {
  RawSample s;
  s.image_id = 5;
  s.category_ids = {1, 18, 91};
  s.captions = {"A man with a dog.", "dogs and a MAN"};
  const Vocabulary v({"man", "dog", "cat"}, {5, 4, 3}, 1, 3);
  HyperParams p;
  const auto t = encode_targets(s, v, p);
  ASSERT_EQ(t.class_target.sizes(), (std::vector<std::int64_t>{91}));
  EXPECT_EQ(t.class_target.sum().item<float>(), 3.0f);
  EXPECT_EQ(t.class_target[0].item<float>(), 1.0f);
  EXPECT_EQ(t.class_target[17].item<float>(), 1.0f);
  EXPECT_EQ(t.class_target[90].item<float>(), 1.0f);
  EXPECT_TRUE(torch::equal(t.word_target, torch::tensor({1.0f, 1.0f, 0.0f})));
}

TEST(EncodeTargets, NoCaptionsNoCategoriesGiveZeros) {
  RawSample s;
  const Vocabulary v({"man"}, {5}, 1, 3);
  const auto t = encode_targets(s, v, HyperParams{});
  EXPECT_EQ(t.class_target.sum().item<float>(), 0.0f);
  EXPECT_EQ(t.word_target.sum().item<float>(), 0.0f);
}

TEST(EncodeTargets, Errors) {
  RawSample s;
  s.category_ids = {200};
  const Vocabulary v({"man"}, {5}, 1, 3);
  EXPECT_THROW(encode_targets(s, v, HyperParams{}), DataError);
  HyperParams p;
  p.num_classes = 80;
  s.category_ids = {};
  EXPECT_THROW(encode_targets(s, v, p), ConfigError);
}

TEST(IndexCoco, ThreeImagesTwoCategoriesTwoCaptions) {
  testing::TempDir dir;
  for (int id = 1; id <= 3; ++id) {
    write_png(dir / (std::to_string(id) + ".png"), 4, 4, {10.0 * id, 0, 0});
  }
  std::ofstream(dir / "i.json") << R"({
    "images": [{"id": 1, "file_name": "1.png"}, {"id": 2, "file_name": "2.png"},
               {"id": 3, "file_name": "3.png"}],
    "annotations": [{"image_id": 1, "category_id": 17},
                    {"image_id": 2, "category_id": 18},
                    {"image_id": 3, "category_id": 17},
                    {"image_id": 3, "category_id": 18}]})";
  std::ofstream(dir / "c.json") << R"({"annotations": [
    {"image_id": 3, "caption": "cat and dog"}, {"image_id": 1, "caption": "a cat"},
    {"image_id": 2, "caption": "a dog"}, {"image_id": 1, "caption": "one cat"},
    {"image_id": 2, "caption": "one dog"}, {"image_id": 3, "caption": "two pets"}]})";
  const auto r = index_coco(dir / "i.json", dir / "c.json", dir.path());
  ASSERT_EQ(r.samples.size(), 3u);
  EXPECT_EQ(r.samples[0].category_ids, (std::vector<int>{17}));
  EXPECT_EQ(r.samples[1].category_ids, (std::vector<int>{18}));
  EXPECT_EQ(r.samples[2].category_ids, (std::vector<int>{17, 18}));
  EXPECT_EQ(r.samples[0].captions, (std::vector<std::string>{"a cat", "one cat"}));
  EXPECT_EQ(r.samples[1].captions, (std::vector<std::string>{"a dog", "one dog"}));
  EXPECT_EQ(r.samples[2].captions, (std::vector<std::string>{"cat and dog", "two pets"}));
  EXPECT_EQ(r.missing_images, 0u);
  EXPECT_EQ(r.orphan_caption_images, 0u);
}

TEST(EncodeTargets, PersonTieDiningTable) {
  RawSample s;
  s.category_ids = {1, 32, 67};
  s.captions = {"A man sitting at a table with a cake.", "man, tie, TABLE"};
  const Vocabulary v({"table", "man", "cake", "dog"}, {9, 8, 7, 6}, 1, 3);
  const auto t = encode_targets(s, v, HyperParams{});
  EXPECT_EQ(t.class_target.sum().item<float>(), 3.0f);
  const auto names = class_index_map();
  for (int id : s.category_ids) {
    EXPECT_EQ(t.class_target[*names.index_of(id)].item<float>(), 1.0f);
  }
  EXPECT_EQ(names.name(*names.index_of(32)), "tie");
  EXPECT_EQ(names.name(*names.index_of(67)), "dining table");
  EXPECT_TRUE(torch::equal(t.word_target, torch::tensor({1.0f, 1.0f, 1.0f, 0.0f})));
}

TEST(EncodeTargets, PresenceNotCount) {
  RawSample s;
  s.captions = {"dog dog dog dog dog"};
  const Vocabulary v({"dog"}, {5}, 1, 3);
  EXPECT_EQ(encode_targets(s, v, HyperParams{}).word_target[0].item<float>(), 1.0f);
}

TEST(EncodeTargets, DeterministicWithPopcountBound) {
  std::mt19937 rng(4);
  const Vocabulary v({"aaa", "bbb", "ccc", "ddd"}, {4, 3, 2, 1}, 1, 3);
  for (int trial = 0; trial < 50; ++trial) {
    RawSample s;
    for (int i = 0; i < 6; ++i) s.category_ids.push_back(1 + static_cast<int>(rng() % 91));
    s.captions = {std::string("aaa ") + (rng() % 2 ? "ccc" : "zzz")};
    const auto a = encode_targets(s, v, HyperParams{});
    const auto b = encode_targets(s, v, HyperParams{});
    EXPECT_TRUE(torch::equal(a.class_target, b.class_target));
    EXPECT_TRUE(torch::equal(a.word_target, b.word_target));
    std::set<int> distinct(s.category_ids.begin(), s.category_ids.end());
    EXPECT_EQ(a.class_target.sum().item<float>(), static_cast<float>(distinct.size()));
    EXPECT_LE(a.class_target.sum().item<float>(), static_cast<float>(s.category_ids.size()));
  }
}

TEST(LoadImage, ShapeAndNormalization) {
  testing::TempDir dir;
  // Pure red in BGR order.
  write_png(dir / "red.png", 10, 20, {0, 0, 255});
  const auto img = load_image(dir / "red.png", 4, 6);
  ASSERT_EQ(img.sizes(), (std::vector<std::int64_t>{3, 4, 6}));
  for (int c = 0; c < 3; ++c) {
    const float raw = c == 0 ? 1.0f : 0.0f;
    const float want = (raw - kImageNetMean[c]) / kImageNetStd[c];
    EXPECT_NEAR(img[c].min().item<float>(), want, 1e-5);
    EXPECT_NEAR(img[c].max().item<float>(), want, 1e-5);
  }
}

TEST(LoadImage, ErrorsAreImageDecodeErrors) {
  testing::TempDir dir;
  EXPECT_THROW(load_image(dir / "missing.png", 4, 4), ImageDecodeError);
  std::ofstream(dir / "junk.png") << "not an image";
  EXPECT_THROW(load_image(dir / "junk.png", 4, 4), ImageDecodeError);
}

TEST(HorizontalFlip, ReversesColumnsAndIsInvolution) {
  const auto x = torch::arange(24, torch::kFloat).view({1, 3, 2, 4});
  const auto y = horizontal_flip(x);
  EXPECT_EQ(y[0][1][1][0].item<float>(), x[0][1][1][3].item<float>());
  EXPECT_TRUE(torch::equal(horizontal_flip(y), x));
  EXPECT_TRUE(torch::equal(horizontal_flip(x[0]), y[0]));
}

TEST(EncodedDataset, BatchesStackSamples) {
  MiniCoco coco;
  const auto r = index_coco(coco.instances, coco.captions, coco.images);
  const Vocabulary v({"dog", "man"}, {2, 1}, 1, 3);
  const auto p = small_params();
  EncodedDataset data(r.samples, v, p);
  ASSERT_EQ(data.size(), 3u);
  const std::vector<std::size_t> idx = {2, 0};
  const auto batch = data.make_batch(idx, {true, false});
  EXPECT_EQ(batch.image_ids, (std::vector<std::int64_t>{3, 1}));
  EXPECT_EQ(batch.images.sizes(), (std::vector<std::int64_t>{2, 3, 4, 6}));
  EXPECT_EQ(batch.class_targets.sizes(), (std::vector<std::int64_t>{2, 91}));
  EXPECT_TRUE(torch::equal(batch.word_targets[1], torch::tensor({1.0f, 1.0f})));
  EXPECT_TRUE(torch::allclose(batch.images[1], data.image(0)));
  EXPECT_TRUE(torch::allclose(batch.images[0], horizontal_flip(data.image(2))));

  const auto sub = data.select(idx);
  EXPECT_EQ(sub.size(), 2u);
  EXPECT_EQ(sub.image_id(0), 3);
}

TEST(EncodedDataset, CachedImagesDropUndecodable) {
  MiniCoco coco;
  auto r = index_coco(coco.instances, coco.captions, coco.images);
  std::ofstream(coco.images / "2.png", std::ios::trunc) << "garbage";
  const Vocabulary v({"dog"}, {2}, 1, 3);
  EncodedDataset data(r.samples, v, small_params(), /*cache_images=*/true);
  EXPECT_EQ(data.size(), 2u);
  EXPECT_EQ(data.skipped(), 1u);
}

TEST(TargetCache, RoundTrip) {
  MiniCoco coco;
  const auto r = index_coco(coco.instances, coco.captions, coco.images);
  const Vocabulary v({"dog", "man", "toothbrush"}, {2, 1, 1}, 1, 3);
  const auto p = small_params();
  const auto cache = build_target_cache(r.samples, v, p);
  EXPECT_EQ(cache.vocab_fingerprint, v.fingerprint());
  testing::TempDir dir;
  write_target_cache(cache, dir / "t.tgt");
  const auto back = read_target_cache(dir / "t.tgt");
  ASSERT_EQ(back.records.size(), 3u);
  EXPECT_EQ(back.num_classes, 91u);
  EXPECT_EQ(back.vocab_size, 3u);
  EXPECT_EQ(back.vocab_fingerprint, cache.vocab_fingerprint);
  EXPECT_EQ(back.records[0].class_indices, (std::vector<std::uint32_t>{0, 17}));
  EXPECT_EQ(back.records[0].word_indices, (std::vector<std::uint32_t>{0, 1}));
  EXPECT_EQ(back.records[1].word_indices, (std::vector<std::uint32_t>{2}));

  const auto from_cache = EncodedDataset::from_cache(back, p);
  const EncodedDataset direct(r.samples, v, p);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_TRUE(torch::equal(from_cache.class_target(i), direct.class_target(i)));
    EXPECT_TRUE(torch::equal(from_cache.word_target(i), direct.word_target(i)));
  }

  std::ofstream(dir / "bad.tgt") << "NOTACACHE";
  EXPECT_THROW(read_target_cache(dir / "bad.tgt"), DataError);
}

TEST(Fixture, DeterministicAndIndexable) {
  testing::TempDir a, b;
  const auto la = generate_fixture(a.path());
  const auto lb = generate_fixture(b.path());
  ASSERT_EQ(la.train.size(), 20u);
  ASSERT_EQ(la.val.size(), 8u);
  for (std::size_t i = 0; i < la.train.size(); ++i) {
    EXPECT_EQ(la.train[i].category_ids, lb.train[i].category_ids);
    EXPECT_EQ(la.train[i].words, lb.train[i].words);
  }
  std::ifstream fa(la.train_captions), fb(lb.train_captions);
  const std::string ca((std::istreambuf_iterator<char>(fa)), {});
  const std::string cb((std::istreambuf_iterator<char>(fb)), {});
  EXPECT_EQ(ca, cb);

  const auto train = index_coco(la.train_instances, la.train_captions, la.train_images);
  const auto val = index_coco(la.val_instances, la.val_captions, la.val_images);
  EXPECT_EQ(train.samples.size(), 20u);
  EXPECT_EQ(val.samples.size(), 8u);
  EXPECT_NO_THROW(check_split_disjoint(train.samples, val.samples));
  for (const auto& s : train.samples) EXPECT_GE(s.category_ids.size(), 3u);
}

}  // namespace
}  // namespace tenet
