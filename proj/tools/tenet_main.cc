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

// Command-line entry point.

#include <torch/torch.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "tenet/config.h"
#include "tenet/dataset.h"
#include "tenet/error.h"
#include "tenet/experiment.h"
#include "tenet/fixture.h"
#include "tenet/log.h"
#include "tenet/metrics.h"
#include "tenet/model.h"
#include "tenet/predictor.h"
#include "tenet/trainer.h"
#include "tenet/vocab.h"

namespace fs = std::filesystem;

namespace tenet {
namespace {

// Flags shared by the experiment commands. Every set flag overrides the
// config file.
struct ExperimentFlags {
  std::string config_path;
  bool fixture = false;
  std::optional<std::uint64_t> seed;
  std::map<std::string, std::string> overrides;
  std::vector<std::string> sets;
};

void add_override(CLI::App* cmd, ExperimentFlags& flags,
                  const std::string& flag, const std::string& key,
                  const std::string& help) {
  cmd->add_option_function<std::string>(
      flag, [&flags, key](const std::string& v) { flags.overrides[key] = v; },
      help);
}

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Config file (key = value)")
      ->check(CLI::ExistingFile);
  cmd->add_flag("--fixture", flags.fixture,
                "Use the synthetic dataset and its fast preset");
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&flags](std::uint64_t s) { flags.seed = s; },
      "Run this single seed");
  add_override(cmd, flags, "--output-dir", "output_dir", "Output directory");
  add_override(cmd, flags, "--backbone", "backbone", "Backbone name");
  add_override(cmd, flags, "--pretrained", "pretrained",
               "Load pretrained backbone weights (true/false)");
  add_override(cmd, flags, "--weights", "weights_path",
               "Pretrained backbone state dict");
  add_override(cmd, flags, "--freeze-backbone", "freeze_backbone",
               "Train only the heads (true/false)");
  add_override(cmd, flags, "--num-classes", "num_classes", "NUM_CLASSES");
  add_override(cmd, flags, "--vocab-size", "vocab_size", "VOCAB_SIZE");
  add_override(cmd, flags, "--num-epochs", "num_epochs", "NUM_EPOCHS");
  add_override(cmd, flags, "--batch-size", "batch_size", "BATCH_SIZE");
  add_override(cmd, flags, "--height", "height", "HEIGHT");
  add_override(cmd, flags, "--width", "width", "WIDTH");
  add_override(cmd, flags, "--top-c", "top_c", "TOP_C");
  add_override(cmd, flags, "--top-w", "top_w", "TOP_W");
  add_override(cmd, flags, "--optimizer", "optimizer", "adamw, adam or sgd");
  add_override(cmd, flags, "--learning-rate", "learning_rate", "Learning rate");
  add_override(cmd, flags, "--weight-decay", "weight_decay", "Weight decay");
  add_override(cmd, flags, "--min-count", "min_count",
               "Minimum vocabulary word count");
  add_override(cmd, flags, "--min-length", "min_length",
               "Minimum vocabulary word length");
  add_override(cmd, flags, "--vocab", "vocab_path",
               "Existing vocabulary TSV");
  add_override(cmd, flags, "--seeds", "seeds", "Comma-separated seed list");
  add_override(cmd, flags, "--parallel-seeds", "parallel_seeds",
               "Seeds to run concurrently");
  cmd->add_option("--set", flags.sets, "Any config key: key=value")
      ->take_all();
}

ExperimentConfig resolve_config(const ExperimentFlags& flags) {
  ExperimentConfig config = flags.fixture ? fixture_preset() : default_config();
  if (!flags.config_path.empty()) config = load_config(flags.config_path, config);
  if (flags.fixture) config.fixture = true;
  for (const auto& [key, value] : flags.overrides) {
    set_config_value(config, key, value);
  }
  for (const auto& kv : flags.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--set expects key=value, got '" + kv + "'");
    }
    set_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (flags.seed) {
    config.seeds = {*flags.seed};
    config.params.seed = *flags.seed;
  }
  config.validate();
  return config;
}

std::vector<std::int64_t> parse_ids(const std::string& list) {
  std::vector<std::int64_t> ids;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) ids.push_back(std::stoll(item));
  }
  return ids;
}

fs::path default_checkpoint(const ExperimentConfig& config) {
  return seed_dir(config, config.seeds.front()) / "checkpoints" / "last.pt";
}

// Validation samples encoded against a checkpoint's vocabulary.
EncodedDataset load_split(const ExperimentConfig& config,
                          const Checkpoint& ckpt, const std::string& split) {
  const auto paths = resolve_data(config);
  IndexResult indexed;
  if (split == "train") {
    indexed = index_coco(paths.train_instances, paths.train_captions,
                         paths.train_images);
  } else if (split == "val") {
    indexed = index_coco(paths.val_instances, paths.val_captions,
                         paths.val_images);
  } else {
    throw ConfigError("unknown split '" + split + "' (train or val)");
  }
  return EncodedDataset(indexed.samples, ckpt.vocab, ckpt.params,
                        config.cache_images);
}

void print_row(const std::string& backbone, std::uint64_t seed,
               const EvalReport& report) {
  std::printf("backbone,seed,overall,task,explanation\n%s,%llu,%.3f,%.3f,%.3f\n",
              backbone.c_str(), static_cast<unsigned long long>(seed),
              report.mean_overall, report.mean_acc_t, report.mean_acc_e);
}

int run(int argc, char** argv) {
  CLI::App app{"Joint object classification and explanation-word prediction"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "debug, info, warn, error or off");

  // vocab build / vocab stats
  auto* vocab_cmd = app.add_subcommand("vocab", "Caption vocabulary tools");
  vocab_cmd->require_subcommand(1);
  std::string captions_path, vocab_out, stats_out;
  std::int64_t min_count = 4, min_length = 3, vocab_size = 1000;
  auto* vocab_build = vocab_cmd->add_subcommand("build", "Build a vocabulary TSV");
  vocab_build->add_option("--captions", captions_path,
                          "COCO captions JSON or one caption per line")
      ->required()
      ->check(CLI::ExistingFile);
  vocab_build->add_option("--min-count", min_count, "Minimum occurrences");
  vocab_build->add_option("--min-length", min_length, "Minimum characters");
  vocab_build->add_option("--vocab-size", vocab_size, "Maximum words");
  vocab_build->add_option("--out", vocab_out, "Output TSV")->required();
  auto* vocab_stats = vocab_cmd->add_subcommand("stats", "Raw corpus statistics");
  vocab_stats->add_option("--captions", captions_path,
                          "COCO captions JSON or one caption per line")
      ->required()
      ->check(CLI::ExistingFile);
  vocab_stats->add_option("--out", stats_out, "Also write the JSON here");

  // make-fixture
  auto* fixture_cmd =
      app.add_subcommand("make-fixture", "Write the synthetic COCO-format dataset");
  std::string fixture_out;
  FixtureOptions fixture_options;
  fixture_cmd->add_option("--out", fixture_out, "Root directory")->required();
  fixture_cmd->add_option("--num-train", fixture_options.num_train);
  fixture_cmd->add_option("--num-val", fixture_options.num_val);
  fixture_cmd->add_option("--image-size", fixture_options.image_size);
  fixture_cmd->add_option("--seed", fixture_options.seed);

  ExperimentFlags flags;
  auto* show_cmd = app.add_subcommand("show-config", "Print the resolved config");
  add_experiment_flags(show_cmd, flags);

  auto* build_vocab_cmd = app.add_subcommand(
      "build-vocab", "Build the vocabulary from the training captions");
  add_experiment_flags(build_vocab_cmd, flags);

  auto* prepare_cmd = app.add_subcommand(
      "prepare-data", "Index both splits and cache encoded targets");
  add_experiment_flags(prepare_cmd, flags);

  auto* train_cmd = app.add_subcommand("train", "Train one seed");
  add_experiment_flags(train_cmd, flags);

  std::string checkpoint, out_path, split = "val", ids, image_path;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a checkpoint");
  add_experiment_flags(eval_cmd, flags);
  eval_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file");
  eval_cmd->add_option("--split", split, "train or val");
  eval_cmd->add_option("--out", out_path, "Evaluation report JSON");

  auto* predict_cmd = app.add_subcommand("predict", "Top classes and words");
  add_experiment_flags(predict_cmd, flags);
  predict_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file");
  predict_cmd->add_option("--split", split, "train or val");
  predict_cmd->add_option("--image", image_path,
                          "Predict one image file and print it")
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--out", out_path, "Predictions JSON lines");

  auto* report_cmd = app.add_subcommand("report", "Qualitative HTML report");
  add_experiment_flags(report_cmd, flags);
  report_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file");
  report_cmd->add_option("--split", split, "train or val");
  report_cmd->add_option("--ids", ids, "Comma-separated image ids");
  report_cmd->add_option("--out", out_path, "Report directory");

  auto* experiment_cmd = app.add_subcommand(
      "run-experiment", "Train and evaluate every configured seed");
  add_experiment_flags(experiment_cmd, flags);
  bool seed_worker = false;
  experiment_cmd->add_flag("--seed-worker", seed_worker)->group("");

  CLI11_PARSE(app, argc, argv);
  log::set_level(log::parse_level(log_level));

  if (*vocab_build) {
    const auto table = count_caption_file(captions_path);
    const auto vocab = build_vocabulary(table, min_count, min_length, vocab_size);
    vocab.write_tsv(vocab_out);
    log::info("wrote ", vocab.size(), " words to ", vocab_out);
    return 0;
  }
  if (*vocab_stats) {
    const auto stats = to_json(corpus_stats(count_caption_file(captions_path)));
    std::cout << stats.dump(2) << '\n';
    if (!stats_out.empty()) std::ofstream(stats_out) << stats.dump(2) << '\n';
    return 0;
  }
  if (*fixture_cmd) {
    const auto layout = generate_fixture(fixture_out, fixture_options);
    log::info("wrote ", layout.train.size(), " training and ",
              layout.val.size(), " validation images under ", fixture_out);
    return 0;
  }

  const auto config = resolve_config(flags);
  const fs::path out_dir(config.output_dir);

  if (*show_cmd) {
    std::cout << serialize_config(config);
    return 0;
  }
  if (*build_vocab_cmd) {
    const auto paths = resolve_data(config);
    const auto table = count_caption_file(paths.train_captions);
    fs::create_directories(out_dir);
    std::ofstream(out_dir / "vocab_stats.json")
        << to_json(corpus_stats(table)).dump(2) << '\n';
    const auto vocab = build_vocabulary(table, config.min_count,
                                        config.min_length,
                                        config.params.vocab_size);
    vocab.write_tsv(out_dir / "vocab.tsv");
    log::info("wrote ", vocab.size(), " words to ", (out_dir / "vocab.tsv").string());
    return 0;
  }
  if (*prepare_cmd) {
    const auto data = prepare_data(config);
    fs::create_directories(out_dir / "data");
    data.vocab.write_tsv(out_dir / "vocab.tsv");
    write_target_cache(build_target_cache(data.train, data.vocab, config.params),
                       out_dir / "data" / "train.tgt");
    write_target_cache(build_target_cache(data.val, data.vocab, config.params),
                       out_dir / "data" / "val.tgt");
    save_config(out_dir / "config.cfg", config);
    log::info("prepared ", data.train.size(), " training and ", data.val.size(),
              " validation samples with ", data.vocab.size(), " words");
    return 0;
  }
  if (*train_cmd) {
    const auto data = prepare_data(config);
    const auto seed = config.seeds.front();
    auto params = config.params;
    params.seed = seed;
    EncodedDataset train_set(data.train, data.vocab, params, config.cache_images);
    EncodedDataset val_set(data.val, data.vocab, params, config.cache_images);
    auto model = build_model(config.backbone, params.num_classes,
                             static_cast<std::int64_t>(data.vocab.size()),
                             params.height, params.width, seed);
    const auto dir = seed_dir(config, seed);
    save_config(dir / "config.cfg", config);
    data.vocab.write_tsv(dir / "vocab.tsv");
    TrainOptions options;
    options.augment = config.augment;
    options.validation = val_set.empty() ? nullptr : &val_set;
    options.checkpoint_dir = dir / "checkpoints";
    options.on_epoch = [&](const EpochSummary& s) {
      log::info("epoch ", s.epoch, "/", params.num_epochs, ": loss ",
                s.mean_total_loss,
                s.validation_overall
                    ? ", validation overall " + std::to_string(*s.validation_overall)
                    : std::string());
    };
    auto result = train(model, train_set, params, data.vocab, options);
    write_loss_csv(dir / "loss.csv", result.log);
    log::info("checkpoints in ", options.checkpoint_dir.string());
    return 0;
  }
  if (*eval_cmd || *predict_cmd || *report_cmd) {
    const fs::path ckpt_path =
        checkpoint.empty() ? default_checkpoint(config) : fs::path(checkpoint);
    auto ckpt = load_checkpoint(ckpt_path);
    const auto run_dir = ckpt_path.parent_path().parent_path();
    if (*predict_cmd && !image_path.empty()) {
      auto image = load_image(image_path, ckpt.params.height, ckpt.params.width);
      auto p = predict(ckpt.model, image, 0, ckpt.params);
      std::cout << to_json(decode(p, class_index_map(), ckpt.vocab)).dump(2)
                << '\n';
      return 0;
    }
    const auto samples = load_split(config, ckpt, split);
    if (*eval_cmd) {
      const auto report = evaluate(ckpt.model, samples, ckpt.params);
      write_eval_report(out_path.empty() ? run_dir / ("eval_" + split + ".json")
                                         : fs::path(out_path),
                        report);
      print_row(ckpt.model->spec().name, ckpt.params.seed, report);
      return 0;
    }
    if (*predict_cmd) {
      const auto predictions = predict_dataset(ckpt.model, samples, ckpt.params);
      const fs::path out = out_path.empty()
                               ? run_dir / ("predictions_" + split + ".jsonl")
                               : fs::path(out_path);
      write_predictions_jsonl(out, predictions, ckpt.vocab);
      log::info("wrote ", predictions.size(), " predictions to ", out.string());
      return 0;
    }
    const auto report = emit_qualitative(
        ckpt.model, samples, parse_ids(ids), ckpt.vocab, ckpt.params,
        out_path.empty() ? run_dir / "report" : fs::path(out_path));
    log::info("wrote ", report.panels.size(), " panels to ",
              report.page.string(),
              report.missing_ids.empty()
                  ? std::string()
                  : "; " + std::to_string(report.missing_ids.size()) +
                        " ids missing");
    return 0;
  }
  if (*experiment_cmd) {
    if (seed_worker) {
      const auto data = prepare_data(config);
      return run_seed(config, config.seeds.front(), data).ok ? 0 : 1;
    }
    const auto rows = run_experiment(config, fs::read_symlink("/proc/self/exe"));
    std::printf("backbone,seed,status,overall,task,explanation\n");
    for (const auto& r : rows) {
      if (r.ok) {
        std::printf("%s,%llu,ok,%.3f,%.3f,%.3f\n", r.backbone.c_str(),
                    static_cast<unsigned long long>(r.seed), r.overall, r.task,
                    r.explanation);
      } else {
        std::printf("%s,%llu,failed,,,\n", r.backbone.c_str(),
                    static_cast<unsigned long long>(r.seed));
      }
    }
    return 0;
  }
  return 0;
}

}  // namespace
}  // namespace tenet

int main(int argc, char** argv) {
  try {
    return tenet::run(argc, argv);
  } catch (const tenet::ConfigError& e) {
    tenet::log::error(e.what());
    return 2;
  } catch (const std::exception& e) {
    tenet::log::error(e.what());
    return 1;
  }
}
