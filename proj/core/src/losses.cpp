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

#include "irisnet/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace irisnet {

void check_segmentation_pair(const Tensor& pred, const Tensor& target, const char* where) {
  require_rank(target, 4, where);
  require_same_shape(pred, target, where);
  if (target.channels() < 2) {
    throw ShapeError(std::string(where) + ": need at least 2 channels, got " + shape_to_string(target.shape()));
  }
  const std::size_t C = target.channels(), plane = target.height() * target.width();
  for (std::size_t b = 0; b < target.batch(); ++b) {
    for (std::size_t i = 0; i < plane; ++i) {
      double total = 0.0;
      for (std::size_t c = 0; c < C; ++c) {
        const double v = target[(b * C + c) * plane + i];
        if (v != 0.0 && v != 1.0) {
          throw std::invalid_argument(std::string(where) + ": target is not binary (value " + std::to_string(v) + ")");
        }
        total += v;
      }
      if (total != 1.0) throw std::invalid_argument(std::string(where) + ": target channels are not one-hot");
    }
  }
  if (!pred.all_finite()) throw std::invalid_argument(std::string(where) + ": prediction has non-finite values");
}

namespace {

struct DiceSums {
  double inter = 0.0, pred = 0.0, target = 0.0;
};

DiceSums dice_sums(const Tensor& pred, const Tensor& target) {
  DiceSums s;
  const std::size_t C = target.channels(), plane = target.height() * target.width();
  for (std::size_t b = 0; b < target.batch(); ++b) {
    const std::size_t off = (b * C + 1) * plane;
    for (std::size_t i = 0; i < plane; ++i) {
      const double p = pred[off + i], t = target[off + i];
      s.inter += p * t;
      s.pred += p;
      s.target += t;
    }
  }
  return s;
}

}  // namespace

double dice_loss(const Tensor& pred, const Tensor& target, double smoothing) {
  check_segmentation_pair(pred, target, "dice_loss");
  const DiceSums s = dice_sums(pred, target);
  return 1.0 - (2.0 * s.inter + smoothing) / (s.pred + s.target + smoothing);
}

Tensor dice_loss_grad(const Tensor& pred, const Tensor& target, double smoothing) {
  check_segmentation_pair(pred, target, "dice_loss");
  const DiceSums s = dice_sums(pred, target);
  const double num = 2.0 * s.inter + smoothing, den = s.pred + s.target + smoothing;
  Tensor g = Tensor::zeros_like(pred);
  const std::size_t C = target.channels(), plane = target.height() * target.width();
  for (std::size_t b = 0; b < target.batch(); ++b) {
    const std::size_t off = (b * C + 1) * plane;
    for (std::size_t i = 0; i < plane; ++i) {
      g[off + i] = -(2.0 * target[off + i] * den - num) / (den * den);
    }
  }
  return g;
}

double bce_loss(const Tensor& pred, const Tensor& target, double clamp) {
  check_segmentation_pair(pred, target, "bce_loss");
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = std::clamp(pred[i], clamp, 1.0 - clamp), t = target[i];
    total -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
  }
  return total / static_cast<double>(pred.size());
}

Tensor bce_loss_grad(const Tensor& pred, const Tensor& target, double clamp) {
  check_segmentation_pair(pred, target, "bce_loss");
  Tensor g = Tensor::zeros_like(pred);
  const double n = static_cast<double>(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = pred[i], t = target[i];
    if (p < clamp || p > 1.0 - clamp) continue;
    g[i] = -(t / p - (1.0 - t) / (1.0 - p)) / n;
  }
  return g;
}

const char* loss_mode_name(LossMode mode) {
  switch (mode) {
    case LossMode::dice_bce: return "dice+bce";
    case LossMode::dice: return "dice";
    case LossMode::bce: return "bce";
  }
  return "?";
}

LossMode loss_mode_from_name(const std::string& name) {
  if (name == "dice+bce") return LossMode::dice_bce;
  if (name == "dice") return LossMode::dice;
  if (name == "bce") return LossMode::bce;
  throw std::invalid_argument("unknown loss mode '" + name + "' (expected dice+bce, dice or bce)");
}

namespace ag {

Var dice_loss(Tape& t, Var pred, const Tensor& target, double smoothing) {
  return t.record(
      "dice_loss", {pred},
      [target, smoothing](const Tape::Inputs& in) { return Tensor({1}, irisnet::dice_loss(*in[0], target, smoothing)); },
      [target, smoothing](const Tensor& g, const Tape::Inputs& in, const Tensor&) {
        return std::vector<Tensor>{scale(dice_loss_grad(*in[0], target, smoothing), g[0])};
      });
}

Var bce_loss(Tape& t, Var pred, const Tensor& target, double clamp) {
  return t.record(
      "bce_loss", {pred},
      [target, clamp](const Tape::Inputs& in) { return Tensor({1}, irisnet::bce_loss(*in[0], target, clamp)); },
      [target, clamp](const Tensor& g, const Tape::Inputs& in, const Tensor&) {
        return std::vector<Tensor>{scale(bce_loss_grad(*in[0], target, clamp), g[0])};
      });
}

}  // namespace ag

}  // namespace irisnet
