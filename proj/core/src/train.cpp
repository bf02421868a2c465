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

#include "irisnet/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace irisnet {

void TrainOptions::validate() const {
  if (epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("train: batch size must be >= 1");
  adam.validate();
  augmentation.validate();
}

int TrainHistory::best_epoch() const {
  if (records.empty()) throw std::logic_error("TrainHistory: no epochs recorded");
  std::size_t best = 0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].val_dice < records[best].val_dice) best = i;
  }
  return records[best].epoch;
}

std::string TrainHistory::to_csv() const {
  std::string out = "epoch,train_dice,train_bce,val_dice,val_bce,seconds,saved\n";
  char line[256];
  for (const auto& r : records) {
    std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g,%.17g,%.3f,%d\n", r.epoch, r.train_dice, r.train_bce,
                  r.val_dice, r.val_bce, r.seconds, r.saved ? 1 : 0);
    out += line;
  }
  return out;
}

void TrainHistory::write_csv(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << to_csv();
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

std::pair<Tensor, Tensor> make_batch(const std::vector<const SegmentationSample*>& samples) {
  if (samples.empty()) throw std::invalid_argument("make_batch: no samples");
  const std::size_t rows = samples.front()->rows(), cols = samples.front()->cols(), plane = rows * cols;
  Tensor images({samples.size(), 1, rows, cols}, 0.0);
  Tensor targets({samples.size(), 2, rows, cols}, 0.0);
  for (std::size_t b = 0; b < samples.size(); ++b) {
    const auto& s = *samples[b];
    if (s.rows() != rows || s.cols() != cols) {
      throw ShapeError("make_batch: sample '" + s.id + "' is " + std::to_string(s.rows()) + "x" +
                       std::to_string(s.cols()) + ", batch is " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    std::copy(s.image.storage().begin(), s.image.storage().end(), images.storage().begin() + b * plane);
    std::copy(s.mask.storage().begin(), s.mask.storage().end(), targets.storage().begin() + b * 2 * plane);
  }
  return {std::move(images), std::move(targets)};
}

namespace {

std::vector<Tensor> predict_batches(Model& model, const std::vector<SegmentationSample>& samples,
                                    std::size_t batch_size, Tensor* all_targets, Tensor* all_preds) {
  std::vector<Tensor> out;
  std::vector<double> preds, targets;
  for (std::size_t start = 0; start < samples.size(); start += batch_size) {
    std::vector<const SegmentationSample*> chunk;
    for (std::size_t i = start; i < std::min(samples.size(), start + batch_size); ++i) chunk.push_back(&samples[i]);
    auto [x, y] = make_batch(chunk);
    const Tensor p = forward(model, x, Mode::eval);
    for (std::size_t b = 0; b < chunk.size(); ++b) {
      const Tensor one = slice_batch(p, b, b + 1);
      out.push_back(slice_channels(one, 1, 2).reshaped({p.height(), p.width()}));
    }
    preds.insert(preds.end(), p.storage().begin(), p.storage().end());
    targets.insert(targets.end(), y.storage().begin(), y.storage().end());
  }
  if (all_preds != nullptr) {
    const auto& s = samples.front();
    *all_preds = Tensor({samples.size(), 2, s.rows(), s.cols()}, std::move(preds));
    *all_targets = Tensor({samples.size(), 2, s.rows(), s.cols()}, std::move(targets));
  }
  return out;
}

}  // namespace

std::vector<Tensor> predict(Model& model, const std::vector<SegmentationSample>& samples, std::size_t batch_size) {
  if (batch_size < 1) throw std::invalid_argument("predict: batch size must be >= 1");
  return predict_batches(model, samples, batch_size, nullptr, nullptr);
}

LossPair evaluate_losses(Model& model, const std::vector<SegmentationSample>& samples, std::size_t batch_size) {
  if (samples.empty()) throw std::invalid_argument("evaluate_losses: empty dataset");
  Tensor preds, targets;
  predict_batches(model, samples, batch_size, &targets, &preds);
  return {dice_loss(preds, targets), bce_loss(preds, targets)};
}

TrainResult train(Model& model, const std::vector<SegmentationSample>& train_set,
                  const std::vector<SegmentationSample>& validation_set, const TrainOptions& options) {
  options.validate();
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");
  if (validation_set.empty()) throw std::invalid_argument("train: empty validation set");

  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  OptimizerState opt(model.parameters(), options.adam);
  TrainResult result{{}, model, 0.0};
  double best_val = INFINITY;

  std::vector<std::size_t> order(train_set.size());
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng shuffle(derive_seed(options.seed, 0xE90C, static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);

    double dice_total = 0.0, bce_total = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size, ++batch_index) {
      const std::size_t end = std::min(order.size(), start + options.batch_size);
      std::vector<SegmentationSample> augmented;
      augmented.reserve(end - start);
      for (std::size_t k = start; k < end; ++k) {
        Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(epoch), order[k]));
        augmented.push_back(augment(train_set[order[k]], rng, options.augmentation));
      }
      std::vector<const SegmentationSample*> ptrs;
      for (const auto& s : augmented) ptrs.push_back(&s);
      auto [x, y] = make_batch(ptrs);

      auto where = [&] {
        return "epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch_index);
      };
      try {
        Tape tape;
        const Var pred = forward(tape, model, tape.input(std::move(x)), Mode::train);
        const Var dice = ag::dice_loss(tape, pred, y);
        const Var bce = ag::bce_loss(tape, pred, y);
        Var loss = dice;
        if (options.loss == LossMode::bce) loss = bce;
        if (options.loss == LossMode::dice_bce) loss = ag::add(tape, dice, bce);
        const double dv = tape.value(dice)[0], bv = tape.value(bce)[0];
        if (!std::isfinite(tape.value(loss)[0])) throw NumericError("non-finite loss");
        const double weight = static_cast<double>(end - start);
        dice_total += dv * weight;
        bce_total += bv * weight;

        const Gradients grads = backward_pass(tape, loss, Tensor({1}, 1.0));
        std::vector<Tensor> g;
        g.reserve(model.parameters().size());
        for (const auto& p : model.parameters()) {
          g.push_back(grads.has(p) ? grads.of(p) : Tensor::zeros_like(p.value));
        }
        adam_step(model.parameters(), g, opt);
      } catch (const NumericError& e) {
        throw TrainingError("training diverged at " + where() + ": " + e.what());
      } catch (const std::domain_error& e) {
        throw TrainingError("training diverged at " + where() + ": " + e.what());
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_dice = dice_total / static_cast<double>(order.size());
    rec.train_bce = bce_total / static_cast<double>(order.size());
    const LossPair val = evaluate_losses(model, validation_set, options.batch_size);
    rec.val_dice = val.dice;
    rec.val_bce = val.bce;
    if (val.dice < best_val) {
      best_val = val.dice;
      result.best = model;
      rec.saved = true;
      if (!options.checkpoint_path.empty()) save_checkpoint(model, options.checkpoint_path);
    }
    if (options.history_wall_time) {
      rec.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    }
    result.history.records.push_back(rec);
    if (options.on_epoch) options.on_epoch(rec);
  }
  result.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return result;
}

}  // namespace irisnet
