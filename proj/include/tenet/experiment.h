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

// End-to-end experiment orchestration: data, vocabulary, training,
// evaluation and reports for a list of seeds.

#ifndef TENET_EXPERIMENT_H_
#define TENET_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tenet/config.h"
#include "tenet/dataset.h"
#include "tenet/metrics.h"
#include "tenet/model.h"
#include "tenet/vocab.h"

namespace tenet {

struct DataPaths {
  std::filesystem::path train_images;
  std::filesystem::path train_instances;
  std::filesystem::path train_captions;
  std::filesystem::path val_images;
  std::filesystem::path val_instances;
  std::filesystem::path val_captions;
};

std::filesystem::path fixture_root(const ExperimentConfig& config);

// The configured COCO paths, or in fixture mode the paths of a synthetic
// dataset, generated on the spot if it is not there yet.
DataPaths resolve_data(const ExperimentConfig& config);

// Loads config.vocab_path, or builds the vocabulary from the training
// captions. Throws ConfigError if it has fewer than top_w words.
Vocabulary prepare_vocabulary(const ExperimentConfig& config,
                              const DataPaths& paths);

struct PreparedData {
  DataPaths paths;
  Vocabulary vocab;
  std::vector<RawSample> train;
  std::vector<RawSample> val;
};

// resolve_data + prepare_vocabulary + index_coco of both splits.
PreparedData prepare_data(const ExperimentConfig& config);

std::filesystem::path seed_dir(const ExperimentConfig& config,
                               std::uint64_t seed);

struct ResultRow {
  std::string backbone;
  std::uint64_t seed = 0;
  bool ok = false;
  double overall = 0.0;
  double task = 0.0;
  double explanation = 0.0;
  std::string error;  // set when !ok

  bool operator==(const ResultRow&) const = default;
};

nlohmann::json to_json(const ResultRow& row);
ResultRow result_row_from_json(const nlohmann::json& j);

// Trains and evaluates one seed on prepared data. Writes the resolved
// config, loss log, evaluation report, predictions and checkpoints under
// seed_dir(config, seed) and returns the validation result. Failures are
// returned as a row with ok == false.
ResultRow run_seed(const ExperimentConfig& config, std::uint64_t seed,
                   const PreparedData& data);

// Runs every configured seed and writes results.csv and results.json to the
// output directory. With parallel_seeds > 1, seeds run as separate
// `worker_executable run-experiment --seed-worker` processes, each in its own
// seed directory; without an executable they run sequentially.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      const std::string& worker_executable = {});

// Rows grouped by backbone (first appearance order), then by overall
// accuracy descending; failed runs last.
void sort_result_rows(std::vector<ResultRow>& rows);

// backbone,seed,status,overall,task,explanation with three decimals.
void write_results_csv(const std::filesystem::path& path,
                       std::span<const ResultRow> rows);

struct QualitativePanel {
  std::int64_t image_id = 0;
  std::string image_file;  // relative to the report directory
  std::vector<std::string> classes;
  std::vector<std::string> words;
};

struct QualitativeReport {
  std::filesystem::path page;
  std::vector<QualitativePanel> panels;
  std::vector<std::int64_t> missing_ids;
};

// Writes out_dir/index.html with one panel per requested image: the image
// copied next to the page, its top classes and top words. Unknown ids are
// listed as missing; an empty request yields an empty page and a warning.
QualitativeReport emit_qualitative(TENetModel& model,
                                   const EncodedDataset& samples,
                                   std::span<const std::int64_t> image_ids,
                                   const Vocabulary& vocab,
                                   const HyperParams& params,
                                   const std::filesystem::path& out_dir);

}  // namespace tenet

#endif  // TENET_EXPERIMENT_H_
