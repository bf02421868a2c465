// Copyright 2026 The IrisNet Authors. All Rights Reserved.
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "irisnet/adam.hpp"
#include "irisnet/losses.hpp"
#include "irisnet/model.hpp"
#include "irisnet/synth.hpp"

namespace irisnet {

struct TrainOptions {
  int epochs = 50;
  std::size_t batch_size = 20;
  AdamConfig adam;
  LossMode loss = LossMode::dice_bce;
  AugmentRanges augmentation;
  std::uint64_t seed = 0;
  /// Written whenever validation Dice loss improves; empty disables saving.
  std::filesystem::path checkpoint_path;
  /// Record elapsed seconds in the history; off keeps the history reproducible.
  bool history_wall_time = false;
  std::function<void(const struct EpochRecord&)> on_epoch;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;  ///< 1-based
  double train_dice = 0.0;
  double train_bce = 0.0;
  double val_dice = 0.0;
  double val_bce = 0.0;
  double seconds = 0.0;
  bool saved = false;
};

struct TrainHistory {
  std::vector<EpochRecord> records;

  /// 1-based epoch with the lowest validation Dice loss (first on ties).
  int best_epoch() const;
  std::string to_csv() const;
  void write_csv(const std::filesystem::path& path) const;
};

struct TrainResult {
  TrainHistory history;
  Model best;  ///< weights and BN state at the best epoch
  double wall_seconds = 0.0;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LossPair {
  double dice = 0.0;
  double bce = 0.0;
};

/// Stacks samples into B x 1 x H x W images and B x 2 x H x W targets.
std::pair<Tensor, Tensor> make_batch(const std::vector<const SegmentationSample*>& samples);

/// Eval-mode foreground probabilities for each sample (H x W each).
std::vector<Tensor> predict(Model& model, const std::vector<SegmentationSample>& samples, std::size_t batch_size);

/// Global Dice and BCE over a dataset in eval mode.
LossPair evaluate_losses(Model& model, const std::vector<SegmentationSample>& samples, std::size_t batch_size);

/// Seeded shuffle, per-sample augmentation, Adam on the configured loss,
/// validation after every epoch, checkpoint on validation improvement.
TrainResult train(Model& model, const std::vector<SegmentationSample>& train_set,
                  const std::vector<SegmentationSample>& validation_set, const TrainOptions& options);

}  // namespace irisnet
