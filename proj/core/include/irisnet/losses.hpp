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

#include "irisnet/autograd.hpp"
#include "irisnet/tensor.hpp"

namespace irisnet {

inline constexpr double kDiceSmoothing = 1e-6;
inline constexpr double kBceClamp = 1e-7;

/// Throws unless `target` is B x C x H x W with one-hot 0/1 channels and
/// `pred` has the same shape with finite values.
void check_segmentation_pair(const Tensor& pred, const Tensor& target, const char* where);

/// 1 - (2 sum(p t) + s) / (sum(p) + sum(t) + s) on channel 1, summed over
/// the whole batch.
double dice_loss(const Tensor& pred, const Tensor& target, double smoothing = kDiceSmoothing);
Tensor dice_loss_grad(const Tensor& pred, const Tensor& target, double smoothing = kDiceSmoothing);

/// Mean over every element of -[t ln(p) + (1 - t) ln(1 - p)] with p clipped
/// to [e, 1 - e].
double bce_loss(const Tensor& pred, const Tensor& target, double clamp = kBceClamp);
Tensor bce_loss_grad(const Tensor& pred, const Tensor& target, double clamp = kBceClamp);

enum class LossMode { dice_bce, dice, bce };

const char* loss_mode_name(LossMode mode);
LossMode loss_mode_from_name(const std::string& name);

namespace ag {

Var dice_loss(Tape& t, Var pred, const Tensor& target, double smoothing = kDiceSmoothing);
Var bce_loss(Tape& t, Var pred, const Tensor& target, double clamp = kBceClamp);

}  // namespace ag

}  // namespace irisnet
