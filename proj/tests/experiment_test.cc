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

#include "tenet/experiment.h"

#include <gtest/gtest.h>

#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "tenet/backbone.h"
#include "tenet/error.h"
#include "test_util.h"

namespace tenet {
namespace {

// Produces NaN features, so training fails on the first step.
class NanBackbone : public BackboneImpl {
 public:
  NanBackbone() { w = register_parameter("w", torch::ones({1})); }
  torch::Tensor forward(torch::Tensor images) override {
    return w * torch::full({images.size(0), 4},
                           std::numeric_limits<float>::quiet_NaN());
  }
  torch::Tensor w;
};

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class ExperimentTest : public ::testing::Test {
 protected:
  void SetUp() override {
    config_ = fixture_preset();
    config_.output_dir = (dir_ / "run").string();
    config_.fixture_dir = (dir_ / "fixture").string();
    config_.params.num_epochs = 3;
    config_.seeds = {0, 1};
  }

  testing::TempDir dir_;
  ExperimentConfig config_;
};

TEST_F(ExperimentTest, PrepareDataOnFixture) {
  const auto data = prepare_data(config_);
  EXPECT_EQ(data.train.size(), 20u);
  EXPECT_EQ(data.val.size(), 8u);
  EXPECT_GE(data.vocab.size(), static_cast<std::size_t>(config_.params.top_w));
  EXPECT_LE(data.vocab.size(), static_cast<std::size_t>(config_.params.vocab_size));
}

TEST_F(ExperimentTest, TopWLargerThanVocabularyIsConfigError) {
  config_.params.top_w = 900;
  EXPECT_THROW(prepare_data(config_), ConfigError);
}

TEST_F(ExperimentTest, RunsAreReproducibleAndWriteArtifacts) {
  const auto first = run_experiment(config_);
  ASSERT_EQ(first.size(), 2u);
  for (const auto& row : first) {
    EXPECT_TRUE(row.ok) << row.error;
    EXPECT_EQ(row.backbone, "tiny_cnn");
    EXPECT_EQ(row.overall, (row.task + row.explanation) / 2.0);
    const auto sd = seed_dir(config_, row.seed);
    for (const char* f : {"config.cfg", "vocab.tsv", "loss.csv", "eval.json",
                          "predictions.jsonl", "result.json",
                          "checkpoints/last.pt"}) {
      EXPECT_TRUE(std::filesystem::exists(sd / f)) << f;
    }
  }
  const auto csv = read_file(std::filesystem::path(config_.output_dir) / "results.csv");
  EXPECT_EQ(csv.rfind("backbone,seed,status,overall,task,explanation\n", 0), 0u);
  const auto loss_first = read_file(seed_dir(config_, 0) / "loss.csv");

  const auto second = run_experiment(config_);
  EXPECT_EQ(first, second);
  EXPECT_EQ(loss_first, read_file(seed_dir(config_, 0) / "loss.csv"));
}

TEST_F(ExperimentTest, FailedSeedIsRecorded) {
  BackboneRegistry::instance().add("nan_backbone",
                                   [] { return std::make_shared<NanBackbone>(); });
  config_.backbone.name = "nan_backbone";
  config_.seeds = {4};
  const auto rows = run_experiment(config_);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_FALSE(rows[0].ok);
  EXPECT_NE(rows[0].error.find("non-finite"), std::string::npos);
  const auto csv = read_file(std::filesystem::path(config_.output_dir) / "results.csv");
  EXPECT_NE(csv.find("nan_backbone,4,failed"), std::string::npos);
}

TEST(ResultRows, SortGroupsByBackboneThenAccuracy) {
  std::vector<ResultRow> rows = {
      {"b", 0, true, 0.5, 0.5, 0.5, ""},
      {"a", 1, true, 0.4, 0.4, 0.4, ""},
      {"b", 2, false, 0.0, 0.0, 0.0, "x"},
      {"b", 3, true, 0.7, 0.7, 0.7, ""},
      {"a", 4, true, 0.4, 0.4, 0.4, ""},
  };
  sort_result_rows(rows);
  std::vector<std::uint64_t> seeds;
  for (const auto& r : rows) seeds.push_back(r.seed);
  EXPECT_EQ(seeds, (std::vector<std::uint64_t>{3, 0, 2, 1, 4}));
  for (const auto& r : rows) EXPECT_EQ(result_row_from_json(to_json(r)), r);
}

TEST(ResultRows, CsvUsesThreeDecimals) {
  testing::TempDir dir;
  const std::vector<ResultRow> rows = {{"resnet50", 2, true, 0.57812, 0.61, 0.5462, ""}};
  write_results_csv(dir / "r.csv", rows);
  EXPECT_EQ(read_file(dir / "r.csv"),
            "backbone,seed,status,overall,task,explanation\n"
            "resnet50,2,ok,0.578,0.610,0.546\n");
}

class QualitativeTest : public ExperimentTest {
 protected:
  void SetUp() override {
    ExperimentTest::SetUp();
    data_ = prepare_data(config_);
    val_ = EncodedDataset(data_.val, data_.vocab, config_.params, true);
    model_ = build_model(config_.backbone, config_.params.num_classes,
                         static_cast<std::int64_t>(data_.vocab.size()),
                         config_.params.height, config_.params.width, 0);
  }

  PreparedData data_;
  EncodedDataset val_;
  TENetModel model_{nullptr};
};

TEST_F(QualitativeTest, OnePanelPerRequestedImage) {
  std::vector<std::int64_t> ids;
  for (std::size_t i = 0; i < 4; ++i) ids.push_back(val_.image_id(i));
  const auto out = dir_ / "report";
  const auto r = emit_qualitative(model_, val_, ids, data_.vocab, config_.params, out);
  ASSERT_EQ(r.panels.size(), 4u);
  EXPECT_TRUE(r.missing_ids.empty());
  EXPECT_EQ(r.page, out / "index.html");
  const auto html = read_file(r.page);
  for (const auto& p : r.panels) {
    EXPECT_EQ(p.classes.size(), static_cast<std::size_t>(config_.params.top_c));
    EXPECT_EQ(p.words.size(), static_cast<std::size_t>(config_.params.top_w));
    EXPECT_TRUE(std::filesystem::exists(out / p.image_file));
    EXPECT_NE(html.find(p.image_file), std::string::npos);
  }
}

TEST_F(QualitativeTest, EmptyRequestGivesEmptyPage) {
  const auto r = emit_qualitative(model_, val_, {}, data_.vocab, config_.params,
                                  dir_ / "empty");
  EXPECT_TRUE(r.panels.empty());
  EXPECT_TRUE(std::filesystem::exists(r.page));
}

TEST_F(QualitativeTest, UnknownIdsAreListedAsMissing) {
  const std::vector<std::int64_t> ids = {val_.image_id(0), 424242};
  const auto r = emit_qualitative(model_, val_, ids, data_.vocab, config_.params,
                                  dir_ / "missing");
  EXPECT_EQ(r.panels.size(), 1u);
  EXPECT_EQ(r.missing_ids, (std::vector<std::int64_t>{424242}));
  EXPECT_NE(read_file(r.page).find("424242"), std::string::npos);
}

}  // namespace
}  // namespace tenet
