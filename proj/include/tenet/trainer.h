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

// Joint training of both heads and the shared backbone.

#ifndef TENET_TRAINER_H_
#define TENET_TRAINER_H_

#include <torch/torch.h>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "tenet/dataset.h"
#include "tenet/hyperparams.h"
#include "tenet/metrics.h"
#include "tenet/model.h"
#include "tenet/vocab.h"

namespace tenet {

struct LossRecord {
  int epoch = 0;           // 1-based
  std::int64_t step = 0;   // 0-based, counted across epochs
  double class_loss = 0.0;
  double word_loss = 0.0;
  double total_loss = 0.0;

  bool operator==(const LossRecord&) const = default;
};

struct EpochSummary {
  int epoch = 0;
  double mean_class_loss = 0.0;
  double mean_word_loss = 0.0;
  double mean_total_loss = 0.0;
  std::optional<double> validation_overall;
};

struct TrainOptions {
  // Receives last.pt every epoch and best.pt whenever validation accuracy
  // improves. Empty disables checkpointing.
  std::filesystem::path checkpoint_dir;
  // Scored after every epoch when set.
  const EncodedDataset* validation = nullptr;
  // Mirror each training image with probability 1/2.
  bool augment = true;
  std::function<void(const LossRecord&)> on_step;
  std::function<void(const EpochSummary&)> on_epoch;
};

struct TrainResult {
  std::vector<LossRecord> log;
  std::vector<EpochSummary> epochs;
  int best_epoch = 0;
  std::optional<double> best_validation_overall;
};

std::unique_ptr<torch::optim::Optimizer> make_optimizer(
    const HyperParams& params, std::vector<torch::Tensor> parameters);

// Runs params.num_epochs epochs of shuffled mini-batches. Shuffling, flips
// and any stochastic layers are driven by params.seed, so equal inputs give
// equal loss curves. Throws NonFiniteLossError on a NaN or infinite loss and
// DataError for an empty training set.
TrainResult train(TENetModel& model, const EncodedDataset& train_set,
                  const HyperParams& params, const Vocabulary& vocab,
                  const TrainOptions& options = {});

void write_loss_csv(const std::filesystem::path& path,
                    std::span<const LossRecord> log);

}  // namespace tenet

#endif  // TENET_TRAINER_H_
