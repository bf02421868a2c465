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

#include <cstddef>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "irisnet/ops.hpp"
#include "irisnet/tensor.hpp"

namespace irisnet {

/// A learnable tensor with a stable identity. Gradients are keyed by address,
/// so parameters must not move while a tape refers to them.
struct Parameter {
  std::string name;
  Tensor value;
};

/// Handle to a node on a Tape.
struct Var {
  std::size_t id = 0;
};
class Gradients;


/// Records executed operations in order. Every node keeps its output value; the
/// backward rule receives the input values and the output value, so nothing
/// else has to be captured.
class Tape {
 public:
  using Inputs = std::vector<const Tensor*>;
  using ForwardFn = std::function<Tensor(const Inputs&)>;
  using BackwardFn =
      std::function<std::vector<Tensor>(const Tensor& grad_output, const Inputs& inputs,
                                        const Tensor& output)>;

  Var input(Tensor value);
  Var parameter(const Parameter& p);

  /// Runs `forward` on the inputs' values and records the result.
  Var record(std::string op, std::vector<Var> inputs, ForwardFn forward, BackwardFn backward);

  const Tensor& value(Var v) const { return nodes_.at(v.id).value; }
  const std::string& op(Var v) const { return nodes_.at(v.id).op; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

  /// Re-executes every recorded operation from its recorded inputs and
  /// returns true when all outputs are reproduced bit-exactly.
  bool replay_matches() const;

 private:
  friend class Gradients;
  friend Gradients backward_pass(const Tape& tape, Var output, const Tensor& seed);

  struct Node {
    std::string op;
    Tensor value;
    std::vector<std::size_t> inputs;
    ForwardFn forward;
    BackwardFn backward;
    const Parameter* param = nullptr;
  };

  Inputs input_values(const Node& node) const;

  std::vector<Node> nodes_;
};

class Gradients {
 public:
  /// Gradient with respect to any recorded node (zeros if unreached).
  const Tensor& operator[](Var v) const { return node_grads_.at(v.id); }
  /// Gradient with respect to a parameter registered on the tape.
  const Tensor& of(const Parameter& p) const;
  bool has(const Parameter& p) const { return param_grads_.count(&p) != 0; }
  const std::unordered_map<const Parameter*, Tensor>& parameters() const { return param_grads_; }
  /// Node ids in the order backward rules were applied.
  const std::vector<std::size_t>& visit_order() const { return visit_order_; }

 private:
  friend Gradients backward_pass(const Tape& tape, Var output, const Tensor& seed);
  std::vector<Tensor> node_grads_;
  std::unordered_map<const Parameter*, Tensor> param_grads_;
  std::vector<std::size_t> visit_order_;
};

/// Reverse sweep from `output` seeded with `seed` (same shape as the output).
Gradients backward_pass(const Tape& tape, Var output, const Tensor& seed);

// ---------------------------------------------------------------------------
// Finite-difference verification.

/// Max over coordinates of |a - n| / max(|a|, |n|, 1e-8), with n the central
/// difference (fn(x + step) - fn(x - step)) / (2 step).
double finite_difference_check(const std::function<double(const Tensor&)>& fn,
                               const Tensor& input, const Tensor& analytic_grad, double step);

/// Builds a scalar-valued graph with `build`, differentiates it on a tape, and
/// checks the input gradient against central differences of the same graph.
double finite_difference_check(const std::function<Var(Tape&, Var)>& build, const Tensor& input,
                               double step);

// ---------------------------------------------------------------------------
// Differentiable wrappers over the nn kernels.

namespace ag {

Var add(Tape& t, Var a, Var b);
Var sum(Tape& t, Var a);
/// Sum of a * weights, a fixed random projection used to reduce to a scalar.
Var weighted_sum(Tape& t, Var a, const Tensor& weights);
Var concat_channels(Tape& t, Var a, Var b);
Var conv2d(Tape& t, Var input, Var kernel, Var bias, const ConvSpec& spec);
Var conv2d(Tape& t, Var input, Var kernel, const ConvSpec& spec);
Var transposed_conv2d(Tape& t, Var input, Var kernel, int stride, int padding = 0);
Var maxpool2d(Tape& t, Var input);
/// In train mode the running statistics in `state` are updated once, at
/// record time; replay and backward use only the batch statistics.
Var batchnorm2d(Tape& t, Var input, Var gamma, Var beta, BatchNormState& state, Mode mode);
Var relu(Tape& t, Var input);
Var softmax_channels(Tape& t, Var input);

}  // namespace ag
}  // namespace irisnet
