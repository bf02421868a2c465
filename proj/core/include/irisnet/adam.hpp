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
#include <stdexcept>
#include <vector>

#include "irisnet/autograd.hpp"

namespace irisnet {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double epsilon = 1e-8;

  void validate() const;
  friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// First and second moments per parameter plus the step counter.
struct OptimizerState {
  AdamConfig config;
  std::vector<Tensor> m, v;
  std::uint64_t t = 0;

  OptimizerState() = default;
  OptimizerState(const std::vector<Parameter>& params, AdamConfig config);
};

/// One bias-corrected Adam update. All gradients are checked before any
/// parameter moves; a non-finite entry throws NumericError naming the
/// parameter and leaves parameters and state untouched.
void adam_step(std::vector<Parameter>& params, const std::vector<Tensor>& grads, OptimizerState& state);

}  // namespace irisnet
