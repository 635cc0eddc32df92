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

#include <spawn.h>
#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "tenet/error.h"
#include "tenet/fixture.h"
#include "tenet/log.h"
#include "tenet/predictor.h"
#include "tenet/trainer.h"

extern char** environ;

namespace tenet {

namespace fs = std::filesystem;

fs::path fixture_root(const ExperimentConfig& config) {
  return config.fixture_dir.empty() ? fs::path(config.output_dir) / "fixture"
                                    : fs::path(config.fixture_dir);
}

DataPaths resolve_data(const ExperimentConfig& config) {
  if (!config.fixture) {
    return {config.train_images, config.train_instances, config.train_captions,
            config.val_images,   config.val_instances,   config.val_captions};
  }
  const auto root = fixture_root(config);
  auto layout = fixture_layout(root);
  if (!fs::exists(layout.val_captions)) {
    log::info("generating synthetic dataset under ", root.string());
    layout = generate_fixture(root);
  }
  return {layout.train_images, layout.train_instances, layout.train_captions,
          layout.val_images,   layout.val_instances,   layout.val_captions};
}

Vocabulary prepare_vocabulary(const ExperimentConfig& config,
                              const DataPaths& paths) {
  Vocabulary vocab;
  if (!config.vocab_path.empty()) {
    vocab = Vocabulary::read_tsv(config.vocab_path);
  } else {
    vocab = build_vocabulary(count_caption_file(paths.train_captions),
                             config.min_count, config.min_length,
                             config.params.vocab_size);
  }
  if (static_cast<std::int64_t>(vocab.size()) > config.params.vocab_size) {
    throw ConfigError("vocabulary has " + std::to_string(vocab.size()) +
                      " words, more than vocab_size " +
                      std::to_string(config.params.vocab_size));
  }
  if (static_cast<std::int64_t>(vocab.size()) < config.params.top_w) {
    throw ConfigError("vocabulary has " + std::to_string(vocab.size()) +
                      " words, fewer than top_w " +
                      std::to_string(config.params.top_w));
  }
  return vocab;
}

PreparedData prepare_data(const ExperimentConfig& config) {
  PreparedData data;
  data.paths = resolve_data(config);
  data.vocab = prepare_vocabulary(config, data.paths);
  data.train = index_coco(data.paths.train_instances, data.paths.train_captions,
                          data.paths.train_images)
                   .samples;
  data.val = index_coco(data.paths.val_instances, data.paths.val_captions,
                        data.paths.val_images)
                 .samples;
  check_split_disjoint(data.train, data.val);
  return data;
}

fs::path seed_dir(const ExperimentConfig& config, std::uint64_t seed) {
  return fs::path(config.output_dir) / ("seed_" + std::to_string(seed));
}

nlohmann::json to_json(const ResultRow& row) {
  return {{"backbone", row.backbone},       {"seed", row.seed},
          {"ok", row.ok},                   {"overall", row.overall},
          {"task", row.task},               {"explanation", row.explanation},
          {"error", row.error}};
}

ResultRow result_row_from_json(const nlohmann::json& j) {
  ResultRow row;
  row.backbone = j.at("backbone").get<std::string>();
  row.seed = j.at("seed").get<std::uint64_t>();
  row.ok = j.at("ok").get<bool>();
  row.overall = j.at("overall").get<double>();
  row.task = j.at("task").get<double>();
  row.explanation = j.at("explanation").get<double>();
  row.error = j.value("error", std::string());
  return row;
}

namespace {

void write_json(const fs::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

ResultRow run_seed_unchecked(const ExperimentConfig& config,
                             std::uint64_t seed, const PreparedData& data) {
  const auto dir = seed_dir(config, seed);
  fs::create_directories(dir);
  ExperimentConfig resolved = config;
  resolved.seeds = {seed};
  resolved.params.seed = seed;
  save_config(dir / "config.cfg", resolved);
  data.vocab.write_tsv(dir / "vocab.tsv");

  HyperParams params = config.params;
  params.seed = seed;
  EncodedDataset train_set(data.train, data.vocab, params, config.cache_images);
  EncodedDataset val_set(data.val, data.vocab, params, config.cache_images);
  if (train_set.empty()) throw DataError("no usable training images");
  if (val_set.empty()) throw DataError("no usable validation images");

  auto model = build_model(config.backbone, params.num_classes,
                           static_cast<std::int64_t>(data.vocab.size()),
                           params.height, params.width, seed);
  TrainOptions options;
  options.augment = config.augment;
  options.validation = &val_set;
  if (config.save_checkpoints) options.checkpoint_dir = dir / "checkpoints";
  auto trained = train(model, train_set, params, data.vocab, options);
  write_loss_csv(dir / "loss.csv", trained.log);

  auto predictions = predict_dataset(model, val_set, params);
  auto report = evaluate_predictions(predictions, val_set, params);
  write_eval_report(dir / "eval.json", report);
  write_predictions_jsonl(dir / "predictions.jsonl", predictions, data.vocab);

  ResultRow row;
  row.backbone = config.backbone.name;
  row.seed = seed;
  row.ok = true;
  row.overall = report.mean_overall;
  row.task = report.mean_acc_t;
  row.explanation = report.mean_acc_e;
  return row;
}

std::vector<ResultRow> run_parallel(const ExperimentConfig& config,
                                    const PreparedData& data,
                                    const std::string& executable) {
  // Workers get explicit paths and the shared vocabulary so they do no
  // setup of their own.
  const auto vocab_file = fs::path(config.output_dir) / "vocab.tsv";
  data.vocab.write_tsv(vocab_file);
  std::vector<fs::path> worker_configs;
  for (auto seed : config.seeds) {
    ExperimentConfig worker = config;
    worker.fixture = false;
    worker.train_images = data.paths.train_images.string();
    worker.train_instances = data.paths.train_instances.string();
    worker.train_captions = data.paths.train_captions.string();
    worker.val_images = data.paths.val_images.string();
    worker.val_instances = data.paths.val_instances.string();
    worker.val_captions = data.paths.val_captions.string();
    worker.vocab_path = vocab_file.string();
    worker.seeds = {seed};
    worker.params.seed = seed;
    worker.parallel_seeds = 1;
    const auto path = seed_dir(config, seed) / "worker.cfg";
    save_config(path, worker);
    worker_configs.push_back(path);
  }

  std::vector<ResultRow> rows(config.seeds.size());
  std::map<pid_t, std::size_t> running;
  std::size_t next = 0;
  auto reap_one = [&] {
    int status = 0;
    const pid_t pid = waitpid(-1, &status, 0);
    auto it = running.find(pid);
    if (it == running.end()) return;
    const auto i = it->second;
    running.erase(it);
    const auto seed = config.seeds[i];
    const auto result_file = seed_dir(config, seed) / "result.json";
    std::ifstream in(result_file);
    if (in) {
      rows[i] = result_row_from_json(nlohmann::json::parse(in));
    } else {
      rows[i] = {config.backbone.name, seed, false, 0, 0, 0,
                 "worker exited with status " + std::to_string(status)};
    }
  };
  while (next < worker_configs.size() || !running.empty()) {
    while (next < worker_configs.size() &&
           static_cast<std::int64_t>(running.size()) < config.parallel_seeds) {
      const auto cfg = worker_configs[next].string();
      std::vector<std::string> args = {executable, "run-experiment", "--config",
                                       cfg, "--seed-worker", "--log-level",
                                       std::string(log::level_name(log::level()))};
      std::vector<char*> argv;
      for (auto& a : args) argv.push_back(a.data());
      argv.push_back(nullptr);
      pid_t pid = 0;
      if (posix_spawn(&pid, executable.c_str(), nullptr, nullptr, argv.data(),
                      environ) != 0) {
        rows[next] = {config.backbone.name, config.seeds[next], false, 0, 0, 0,
                      "cannot start worker " + executable};
      } else {
        running[pid] = next;
      }
      ++next;
    }
    if (!running.empty()) reap_one();
  }
  return rows;
}

std::string format3(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << v;
  return out.str();
}

}  // namespace

ResultRow run_seed(const ExperimentConfig& config, std::uint64_t seed,
                   const PreparedData& data) {
  ResultRow row;
  try {
    row = run_seed_unchecked(config, seed, data);
    log::info(config.backbone.name, " seed ", seed, ": overall ",
              format3(row.overall), ", task ", format3(row.task),
              ", explanation ", format3(row.explanation));
  } catch (const std::exception& e) {
    row = {config.backbone.name, seed, false, 0, 0, 0, e.what()};
    log::error(config.backbone.name, " seed ", seed, " failed: ", e.what());
  }
  write_json(seed_dir(config, seed) / "result.json", to_json(row));
  return row;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      const std::string& worker_executable) {
  config.validate();
  const auto data = prepare_data(config);
  log::info("vocabulary: ", data.vocab.size(), " words; ", data.train.size(),
            " training and ", data.val.size(), " validation images");

  std::vector<ResultRow> rows;
  if (config.parallel_seeds > 1 && !worker_executable.empty()) {
    rows = run_parallel(config, data, worker_executable);
  } else {
    for (auto seed : config.seeds) rows.push_back(run_seed(config, seed, data));
  }
  sort_result_rows(rows);
  const fs::path out(config.output_dir);
  write_results_csv(out / "results.csv", rows);
  nlohmann::json all = nlohmann::json::array();
  for (const auto& r : rows) all.push_back(to_json(r));
  write_json(out / "results.json", all);
  return rows;
}

void sort_result_rows(std::vector<ResultRow>& rows) {
  std::map<std::string, std::size_t> group;
  for (const auto& r : rows) group.emplace(r.backbone, group.size());
  std::stable_sort(rows.begin(), rows.end(),
                   [&](const ResultRow& a, const ResultRow& b) {
                     const auto ga = group.at(a.backbone);
                     const auto gb = group.at(b.backbone);
                     if (ga != gb) return ga < gb;
                     if (a.ok != b.ok) return a.ok;
                     if (a.overall != b.overall) return a.overall > b.overall;
                     return a.seed < b.seed;
                   });
}

void write_results_csv(const fs::path& path, std::span<const ResultRow> rows) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "backbone,seed,status,overall,task,explanation\n";
  for (const auto& r : rows) {
    out << r.backbone << ',' << r.seed << ',' << (r.ok ? "ok" : "failed") << ','
        << (r.ok ? format3(r.overall) : "") << ','
        << (r.ok ? format3(r.task) : "") << ','
        << (r.ok ? format3(r.explanation) : "") << '\n';
  }
}

namespace {

std::string html_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

}  // namespace

QualitativeReport emit_qualitative(TENetModel& model,
                                   const EncodedDataset& samples,
                                   std::span<const std::int64_t> image_ids,
                                   const Vocabulary& vocab,
                                   const HyperParams& params,
                                   const fs::path& out_dir) {
  QualitativeReport report;
  fs::create_directories(out_dir / "images");
  report.page = out_dir / "index.html";

  std::map<std::int64_t, std::size_t> by_id;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    by_id.emplace(samples.image_id(i), i);
  }
  if (image_ids.empty()) log::warn("qualitative report requested for no images");

  const auto classes = class_index_map();
  for (auto id : image_ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      log::warn("image id ", id, " not found; listed as missing");
      report.missing_ids.push_back(id);
      continue;
    }
    const auto i = it->second;
    auto decoded = decode(predict(model, samples.image(i), id, params),
                          classes, vocab);
    QualitativePanel panel;
    panel.image_id = id;
    const auto& src = samples.image_path(i);
    panel.image_file = "images/" + std::to_string(id) + src.extension().string();
    fs::copy_file(src, out_dir / panel.image_file,
                  fs::copy_options::overwrite_existing);
    panel.classes = std::move(decoded.classes);
    panel.words = std::move(decoded.words);
    report.panels.push_back(std::move(panel));
  }

  std::ofstream out(report.page);
  if (!out) throw DataError("cannot write " + report.page.string());
  out << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n"
      << "<title>Predicted classes and explanation words</title>\n"
      << "<style>\n"
      << "body { font-family: sans-serif; }\n"
      << ".grid { display: grid; grid-template-columns: repeat(2, 1fr); "
         "gap: 1em; }\n"
      << "figure { margin: 0; }\n"
      << "img { max-width: 100%; }\n"
      << "</style>\n</head>\n<body>\n";
  if (report.panels.empty() && report.missing_ids.empty()) {
    out << "<p>No images requested.</p>\n";
  }
  out << "<div class=\"grid\">\n";
  for (const auto& p : report.panels) {
    out << "<figure class=\"panel\" id=\"image-" << p.image_id << "\">\n"
        << "<img src=\"" << html_escape(p.image_file) << "\" alt=\"image "
        << p.image_id << "\">\n"
        << "<figcaption>Image " << p.image_id
        << "<br>Classes: " << html_escape(join(p.classes))
        << "<br>Words: " << html_escape(join(p.words)) << "</figcaption>\n"
        << "</figure>\n";
  }
  out << "</div>\n";
  if (!report.missing_ids.empty()) {
    out << "<p class=\"missing\">Missing image ids:";
    for (auto id : report.missing_ids) out << ' ' << id;
    out << "</p>\n";
  }
  out << "</body>\n</html>\n";
  return report;
}

}  // namespace tenet
