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

#include "irisnet/adam.hpp"

#include <cmath>
#include <string>

namespace irisnet {

void AdamConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("adam: learning rate must be finite and >= 0");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw std::invalid_argument("adam: beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw std::invalid_argument("adam: beta2 must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("adam: epsilon must be > 0");
}

OptimizerState::OptimizerState(const std::vector<Parameter>& params, AdamConfig cfg) : config(cfg) {
  config.validate();
  for (const auto& p : params) {
    m.push_back(Tensor::zeros_like(p.value));
    v.push_back(Tensor::zeros_like(p.value));
  }
}

void adam_step(std::vector<Parameter>& params, const std::vector<Tensor>& grads, OptimizerState& state) {
  if (grads.size() != params.size() || state.m.size() != params.size()) {
    throw std::invalid_argument("adam_step: " + std::to_string(params.size()) + " parameters, " +
                                std::to_string(grads.size()) + " gradients, " + std::to_string(state.m.size()) +
                                " moment slots");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    require_same_shape(params[i].value, grads[i], "adam_step");
    require_same_shape(params[i].value, state.m[i], "adam_step");
    if (!grads[i].all_finite()) {
      throw NumericError("adam_step: non-finite gradient for parameter '" + params[i].name + "' at step " +
                         std::to_string(state.t + 1));
    }
  }
  const auto& c = state.config;
  state.t += 1;
  const double corr1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.t));
  const double corr2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i].value;
    auto& m = state.m[i];
    auto& v = state.v[i];
    const auto& g = grads[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = c.beta1 * m[k] + (1.0 - c.beta1) * g[k];
      v[k] = c.beta2 * v[k] + (1.0 - c.beta2) * g[k] * g[k];
      const double m_hat = m[k] / corr1, v_hat = v[k] / corr2;
      p[k] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
  }
}

}  // namespace irisnet
