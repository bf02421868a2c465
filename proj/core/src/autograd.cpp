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

#include "irisnet/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace irisnet {

Var Tape::input(Tensor value) {
  Node n;
  n.op = "input";
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Var Tape::parameter(const Parameter& p) {
  Node n;
  n.op = "parameter:" + p.name;
  n.value = p.value;
  n.param = &p;
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Tape::Inputs Tape::input_values(const Node& node) const {
  Inputs values;
  values.reserve(node.inputs.size());
  for (auto id : node.inputs) values.push_back(&nodes_[id].value);
  return values;
}

Var Tape::record(std::string op, std::vector<Var> inputs, ForwardFn forward, BackwardFn backward) {
  Node n;
  n.op = std::move(op);
  for (const auto& v : inputs) {
    if (v.id >= nodes_.size()) throw std::out_of_range("tape: input refers to an unknown node");
    n.inputs.push_back(v.id);
  }
  n.value = forward(input_values(n));
  if (!n.value.all_finite()) {
    throw std::domain_error("tape: operation '" + n.op + "' produced a non-finite value");
  }
  n.forward = std::move(forward);
  n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

bool Tape::replay_matches() const {
  for (const auto& n : nodes_) {
    if (!n.forward) continue;
    if (!(n.forward(input_values(n)) == n.value)) return false;
  }
  return true;
}

const Tensor& Gradients::of(const Parameter& p) const {
  auto it = param_grads_.find(&p);
  if (it == param_grads_.end()) {
    throw std::out_of_range("no gradient recorded for parameter '" + p.name + "'");
  }
  return it->second;
}

Gradients backward_pass(const Tape& tape, Var output, const Tensor& seed) {
  if (tape.empty()) throw std::invalid_argument("backward_pass: tape is empty");
  if (output.id >= tape.size()) throw std::out_of_range("backward_pass: unknown output node");
  const auto& nodes = tape.nodes_;
  if (seed.shape() != nodes[output.id].value.shape()) {
    throw ShapeError("backward_pass: seed shape " + shape_to_string(seed.shape()) +
                     " != output shape " + shape_to_string(nodes[output.id].value.shape()));
  }

  std::vector<std::optional<Tensor>> grads(nodes.size());
  grads[output.id] = seed;
  Gradients result;
  for (std::size_t id = output.id + 1; id-- > 0;) {
    const auto& node = nodes[id];
    if (!grads[id] || !node.backward) continue;
    result.visit_order_.push_back(id);
    auto inputs = tape.input_values(node);
    auto in_grads = node.backward(*grads[id], inputs, node.value);
    if (in_grads.size() != node.inputs.size()) {
      throw std::logic_error("backward rule of '" + node.op + "' returned the wrong arity");
    }
    for (std::size_t k = 0; k < node.inputs.size(); ++k) {
      auto& slot = grads[node.inputs[k]];
      if (in_grads[k].empty()) continue;  // input is not differentiable
      if (!slot) {
        slot = std::move(in_grads[k]);
      } else {
        accumulate(*slot, in_grads[k]);
      }
    }
  }

  result.node_grads_.reserve(nodes.size());
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    result.node_grads_.push_back(grads[id] ? std::move(*grads[id])
                                           : Tensor::zeros_like(nodes[id].value));
    if (const Parameter* p = nodes[id].param) {
      auto it = result.param_grads_.find(p);
      if (it == result.param_grads_.end()) {
        result.param_grads_.emplace(p, result.node_grads_.back());
      } else {
        accumulate(it->second, result.node_grads_.back());
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

double finite_difference_check(const std::function<double(const Tensor&)>& fn,
                               const Tensor& input, const Tensor& analytic_grad, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite_difference_check: step must be > 0");
  require_same_shape(input, analytic_grad, "finite_difference_check");
  double worst = 0.0;
  Tensor x = input;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + step;
    const double up = fn(x);
    x[i] = orig - step;
    const double down = fn(x);
    x[i] = orig;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw std::runtime_error("finite_difference_check: non-finite function value at coordinate " +
                               std::to_string(i));
    }
    const double numeric = (up - down) / (2.0 * step);
    const double a = analytic_grad[i];
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(a - numeric) / denom);
  }
  return worst;
}

double finite_difference_check(const std::function<Var(Tape&, Var)>& build, const Tensor& input,
                               double step) {
  auto evaluate = [&](const Tensor& x) {
    Tape tape;
    Var out = build(tape, tape.input(x));
    const Tensor& v = tape.value(out);
    if (v.size() != 1) throw ShapeError("finite_difference_check: graph output must be scalar");
    return v[0];
  };
  Tape tape;
  Var in = tape.input(input);
  Var out = build(tape, in);
  if (tape.value(out).size() != 1) {
    throw ShapeError("finite_difference_check: graph output must be scalar");
  }
  const auto grads = backward_pass(tape, out, Tensor(tape.value(out).shape(), 1.0));
  return finite_difference_check(evaluate, input, grads[in], step);
}

// ---------------------------------------------------------------------------

namespace ag {

Var add(Tape& t, Var a, Var b) {
  return t.record(
      "add", {a, b},
      [](const Tape::Inputs& in) { return elementwise_add(*in[0], *in[1]); },
      [](const Tensor& g, const Tape::Inputs&, const Tensor&) { return std::vector<Tensor>{g, g}; });
}

Var sum(Tape& t, Var a) {
  return t.record(
      "sum", {a}, [](const Tape::Inputs& in) { return Tensor({1}, irisnet::sum(*in[0])); },
      [](const Tensor& g, const Tape::Inputs& in, const Tensor&) {
        return std::vector<Tensor>{Tensor(in[0]->shape(), g[0])};
      });
}

Var weighted_sum(Tape& t, Var a, const Tensor& weights) {
  return t.record(
      "weighted_sum", {a},
      [weights](const Tape::Inputs& in) { return Tensor({1}, dot(*in[0], weights)); },
      [weights](const Tensor& g, const Tape::Inputs&, const Tensor&) {
        return std::vector<Tensor>{scale(weights, g[0])};
      });
}

Var concat_channels(Tape& t, Var a, Var b) {
  return t.record(
      "concat_channels", {a, b},
      [](const Tape::Inputs& in) { return irisnet::concat_channels(*in[0], *in[1]); },
      [](const Tensor& g, const Tape::Inputs& in, const Tensor&) {
        const std::size_t ca = in[0]->channels();
        return std::vector<Tensor>{slice_channels(g, 0, ca), slice_channels(g, ca, g.channels())};
      });
}

Var conv2d(Tape& t, Var input, Var kernel, Var bias, const ConvSpec& spec) {
  return t.record(
      "conv2d", {input, kernel, bias},
      [spec](const Tape::Inputs& in) { return irisnet::conv2d(*in[0], *in[1], *in[2], spec); },
      [spec](const Tensor& g, const Tape::Inputs& in, const Tensor&) {
        auto r = conv2d_backward(g, *in[0], *in[1], spec);
        return std::vector<Tensor>{std::move(r.input), std::move(r.kernel), std::move(r.bias)};
      });
}

Var conv2d(Tape& t, Var input, Var kernel, const ConvSpec& spec) {
  return t.record(
      "conv2d", {input, kernel},
      [spec](const Tape::Inputs& in) { return irisnet::conv2d(*in[0], *in[1], Tensor(), spec); },
      [spec](const Tensor& g, const Tape::Inputs& in, const Tensor&) {
        return std::vector<Tensor>{conv2d_backward_input(g, *in[1], spec, in[0]->shape()),
                                   conv2d_backward_kernel(g, *in[0], spec)};
      });
}

Var transposed_conv2d(Tape& t, Var input, Var kernel, int stride, int padding) {
  return t.record(
      "transposed_conv2d", {input, kernel},
      [=](const Tape::Inputs& in) {
        return irisnet::transposed_conv2d(*in[0], *in[1], stride, padding);
      },
      [=](const Tensor& g, const Tape::Inputs& in, const Tensor&) {
        auto r = transposed_conv2d_backward(g, *in[0], *in[1], stride, padding);
        return std::vector<Tensor>{std::move(r.input), std::move(r.kernel)};
      });
}

Var maxpool2d(Tape& t, Var input) {
  return t.record(
      "maxpool2d", {input}, [](const Tape::Inputs& in) { return irisnet::maxpool2d(*in[0]).output; },
      [](const Tensor& g, const Tape::Inputs& in, const Tensor&) {
        const auto fwd = irisnet::maxpool2d(*in[0]);
        return std::vector<Tensor>{maxpool2d_backward(g, fwd, in[0]->shape())};
      });
}

Var batchnorm2d(Tape& t, Var input, Var gamma, Var beta, BatchNormState& state, Mode mode) {
  const BatchNormState snapshot = state;
  Var out = t.record(
      "batchnorm2d", {input, gamma, beta},
      [snapshot, mode](const Tape::Inputs& in) {
        return batchnorm2d_stateless(*in[0], *in[1], *in[2], snapshot, mode);
      },
      [snapshot, mode](const Tensor& g, const Tape::Inputs& in, const Tensor&) {
        auto r = batchnorm2d_backward(g, *in[0], *in[1], snapshot, mode);
        return std::vector<Tensor>{std::move(r.input), std::move(r.gamma), std::move(r.beta)};
      });
  if (mode == Mode::train) {
    // Fold this batch into the running statistics exactly once.
    (void)irisnet::batchnorm2d(t.value(input), t.value(gamma), t.value(beta), state, mode);
  }
  return out;
}

Var relu(Tape& t, Var input) {
  return t.record(
      "relu", {input}, [](const Tape::Inputs& in) { return irisnet::relu(*in[0]); },
      [](const Tensor& g, const Tape::Inputs& in, const Tensor&) {
        return std::vector<Tensor>{relu_backward(g, *in[0])};
      });
}

Var softmax_channels(Tape& t, Var input) {
  return t.record(
      "softmax_channels", {input},
      [](const Tape::Inputs& in) { return irisnet::softmax_channels(*in[0]); },
      [](const Tensor& g, const Tape::Inputs&, const Tensor& out) {
        return std::vector<Tensor>{softmax_channels_backward(g, out)};
      });
}

}  // namespace ag
}  // namespace irisnet
