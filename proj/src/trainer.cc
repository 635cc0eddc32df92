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

#include "tenet/trainer.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "tenet/error.h"
#include "tenet/log.h"
#include "tenet/loss.h"

namespace tenet {

std::unique_ptr<torch::optim::Optimizer> make_optimizer(
    const HyperParams& params, std::vector<torch::Tensor> parameters) {
  if (params.optimizer == "adamw") {
    return std::make_unique<torch::optim::AdamW>(
        std::move(parameters), torch::optim::AdamWOptions(params.learning_rate)
                                   .weight_decay(params.weight_decay));
  }
  if (params.optimizer == "adam") {
    return std::make_unique<torch::optim::Adam>(
        std::move(parameters), torch::optim::AdamOptions(params.learning_rate)
                                   .weight_decay(params.weight_decay));
  }
  if (params.optimizer == "sgd") {
    return std::make_unique<torch::optim::SGD>(
        std::move(parameters), torch::optim::SGDOptions(params.learning_rate)
                                   .momentum(0.9)
                                   .weight_decay(params.weight_decay));
  }
  throw ConfigError("unknown optimizer '" + params.optimizer + "'");
}

TrainResult train(TENetModel& model, const EncodedDataset& train_set,
                  const HyperParams& params, const Vocabulary& vocab,
                  const TrainOptions& options) {
  params.validate();
  if (train_set.empty()) throw DataError("train: empty training set");
  TrainResult result;
  if (params.num_epochs == 0) return result;

  torch::manual_seed(params.seed);
  std::mt19937_64 rng(params.seed);
  auto optimizer = make_optimizer(params, trainable_parameters(model));

  const auto batch_size = static_cast<std::size_t>(params.batch_size);
  std::vector<std::size_t> order(train_set.size());
  std::int64_t step = 0;
  for (int epoch = 1; epoch <= params.num_epochs; ++epoch) {
    model->train();
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    EpochSummary summary;
    summary.epoch = epoch;
    std::int64_t batch_index = 0;
    for (std::size_t start = 0; start < order.size();
         start += batch_size, ++batch_index, ++step) {
      const auto end = std::min(order.size(), start + batch_size);
      std::span<const std::size_t> indices(order.data() + start, end - start);
      std::vector<bool> flip(indices.size(), false);
      if (options.augment) {
        for (std::size_t i = 0; i < flip.size(); ++i) flip[i] = (rng() & 1) != 0;
      }
      auto batch = train_set.make_batch(indices, flip);

      auto out = model->forward(batch.images);
      auto loss = total_loss(out.class_logits, batch.class_targets,
                             out.word_logits, batch.word_targets,
                             params.explanation_loss_weight);
      const double total = loss.total.item<double>();
      if (!std::isfinite(total)) {
        throw NonFiniteLossError(epoch, batch_index, total);
      }
      optimizer->zero_grad();
      loss.total.backward();
      optimizer->step();

      LossRecord record{epoch, step, loss.class_part.item<double>(),
                        loss.word_part.item<double>(), total};
      summary.mean_class_loss += record.class_loss;
      summary.mean_word_loss += record.word_loss;
      summary.mean_total_loss += record.total_loss;
      result.log.push_back(record);
      if (options.on_step) options.on_step(record);
    }
    const auto batches = static_cast<double>(batch_index);
    summary.mean_class_loss /= batches;
    summary.mean_word_loss /= batches;
    summary.mean_total_loss /= batches;

    bool improved = false;
    if (options.validation != nullptr && !options.validation->empty()) {
      const auto report = evaluate(model, *options.validation, params);
      summary.validation_overall = report.mean_overall;
      if (!result.best_validation_overall ||
          report.mean_overall > *result.best_validation_overall) {
        result.best_validation_overall = report.mean_overall;
        result.best_epoch = epoch;
        improved = true;
      }
    }
    if (!options.checkpoint_dir.empty()) {
      nlohmann::json extra = {{"mean_total_loss", summary.mean_total_loss}};
      if (summary.validation_overall) {
        extra["validation_overall"] = *summary.validation_overall;
      }
      save_checkpoint(options.checkpoint_dir / "last.pt", model, params, vocab,
                      epoch, extra);
      if (improved) {
        save_checkpoint(options.checkpoint_dir / "best.pt", model, params,
                        vocab, epoch, extra);
      }
    }
    log::debug("epoch ", epoch, "/", params.num_epochs, " loss ",
               summary.mean_total_loss, " (class ", summary.mean_class_loss,
               ", word ", summary.mean_word_loss, ")",
               summary.validation_overall
                   ? " val overall " + std::to_string(*summary.validation_overall)
                   : std::string());
    result.epochs.push_back(summary);
    if (options.on_epoch) options.on_epoch(summary);
  }
  return result;
}

void write_loss_csv(const std::filesystem::path& path,
                    std::span<const LossRecord> log) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "epoch,step,class_loss,word_loss,total_loss\n";
  out.precision(9);
  for (const auto& r : log) {
    out << r.epoch << ',' << r.step << ',' << r.class_loss << ','
        << r.word_loss << ',' << r.total_loss << '\n';
  }
}

}  // namespace tenet
